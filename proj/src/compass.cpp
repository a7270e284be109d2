#include "skillcompass/compass.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

namespace skillcompass {

std::optional<std::size_t> ComplementarityGrid::skill_index(std::string_view key) const {
  auto it = std::find(skills.begin(), skills.end(), key);
  if (it == skills.end()) return std::nullopt;
  return static_cast<std::size_t>(it - skills.begin());
}

std::optional<std::size_t> ComplementarityGrid::domain_index(DomainId id) const {
  auto it = std::find_if(domains.begin(), domains.end(), [&](auto& d) { return d.id == id; });
  if (it == domains.end()) return std::nullopt;
  return static_cast<std::size_t>(it - domains.begin());
}

std::vector<WorkerProfile> subset_by_domain(const std::vector<WorkerProfile>& profiles,
                                            const DomainPartition& partition, const SkillGraph& graph,
                                            DomainId domain) {
  if (domain >= partition.domain_count()) {
    throw Error(ErrorCode::UnknownDomain, fmt::format("domain {} does not exist", domain));
  }
  std::vector<WorkerProfile> out;
  for (const auto& p : profiles) {
    if (dominant_domain(p, partition, graph) == domain) out.push_back(p);
  }
  return out;
}

namespace {

std::vector<double> wages_of(const std::vector<WorkerProfile>& profiles) {
  std::vector<double> w;
  w.reserve(profiles.size());
  for (const auto& p : profiles) w.push_back(p.wage);
  return w;
}

GridCell cell_from(const Coefficient& c, std::size_t n, double median_wage) {
  return {c.beta, c.se, c.p, c.stars, n, 100.0 * c.beta / median_wage, ""};
}

GridCell excluded_cell(std::size_t n, std::string reason) {
  GridCell cell;
  cell.n = n;
  cell.excluded_reason = std::move(reason);
  return cell;
}

std::vector<std::string> canonical_targets(const FeatureSpec& spec) {
  std::vector<std::string> out;
  for (const auto& raw : spec.target_skills) {
    auto key = normalize_skill(raw);
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
  }
  return out;
}

}  // namespace

ComplementarityGrid build_grid(const std::vector<WorkerProfile>& profiles,
                               const DomainPartition& partition, const SkillGraph& graph,
                               const FeatureSpec& spec, const FitResult& full,
                               std::size_t min_subset_size) {
  ComplementarityGrid grid;
  grid.min_subset_size = min_subset_size;
  grid.skills = canonical_targets(spec);
  const auto all_wages = wages_of(profiles);
  grid.full_median_wage = median(all_wages);
  for (const auto& key : grid.skills) {
    const auto* c = full.find_skill(key);
    if (!c) throw Error(ErrorCode::InvalidConfig, fmt::format("full fit lacks skill '{}'", key));
    grid.all.push_back(cell_from(*c, full.n, grid.full_median_wage));
  }

  std::map<DomainId, std::vector<WorkerProfile>> subsets;
  for (const auto& p : profiles) subsets[dominant_domain(p, partition, graph)].push_back(p);

  for (auto& [d, members] : subsets) {
    GridDomain gd{d, partition.label(d), members.size(), median(wages_of(members)), ""};
    std::vector<GridCell> row(grid.skills.size());
    auto exclude_all = [&](const std::string& reason) {
      gd.excluded_reason = reason;
      for (auto& cell : row) cell = excluded_cell(members.size(), reason);
    };

    if (members.size() < min_subset_size) {
      exclude_all(fmt::format("only {} workers (minimum {})", members.size(), min_subset_size));
    } else {
      // skills with no variation inside the subset cannot be estimated there
      FeatureSpec sub = spec;
      sub.target_skills.clear();
      sub.domain_baseline.reset();
      std::map<std::string, std::string> skipped;
      for (const auto& key : grid.skills) {
        const auto holders = std::count_if(members.begin(), members.end(),
                                           [&](auto& p) { return p.has_skill(key); });
        if (holders == 0) {
          skipped[key] = "no worker in this domain holds the skill";
        } else if (static_cast<std::size_t>(holders) == members.size()) {
          skipped[key] = "every worker in this domain holds the skill";
        } else {
          sub.target_skills.push_back(key);
        }
      }
      // baselines carry over when the level exists in the subset
      const bool has_country = sub.country_baseline &&
          std::any_of(members.begin(), members.end(),
                      [&](auto& p) { return p.country == *sub.country_baseline; });
      if (!has_country) sub.country_baseline.reset();
      sub.diversity_baseline.reset();

      try {
        const auto design = build_design_matrix(members, partition, graph, sub,
                                                DesignOptions{.include_domain_dummies = false});
        const auto fit = fit_ols(design);
        for (std::size_t s = 0; s < grid.skills.size(); ++s) {
          const auto& key = grid.skills[s];
          if (auto it = skipped.find(key); it != skipped.end()) {
            row[s] = excluded_cell(members.size(), it->second);
          } else {
            row[s] = cell_from(*fit.find_skill(key), members.size(), gd.median_wage);
          }
        }
      } catch (const RankDeficientError& e) {
        std::string list;
        for (const auto& a : e.aliased()) list += (list.empty() ? "" : ", ") + a;
        exclude_all("rank-deficient design (aliased: " + list + ")");
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Underdetermined) {
          throw Error(e.code(), fmt::format("domain {}: {}", d, e.what()));
        }
        exclude_all(e.what());
      }
    }
    grid.domains.push_back(std::move(gd));
    grid.cells.push_back(std::move(row));
  }
  return grid;
}

ComplementarityGrid build_grid(const std::vector<WorkerProfile>& profiles,
                               const DomainPartition& partition, const SkillGraph& graph,
                               const FeatureSpec& spec, std::size_t min_subset_size) {
  const auto design = build_design_matrix(profiles, partition, graph, spec);
  FeatureSpec resolved = spec;
  resolved.country_baseline = design.country_baseline;
  resolved.diversity_baseline = design.diversity_baseline;
  resolved.domain_baseline = design.domain_baseline;
  return build_grid(profiles, partition, graph, resolved, fit_ols(design), min_subset_size);
}

namespace {

std::vector<std::string> canonical_bundle(std::span<const std::string> bundle) {
  std::vector<std::string> out;
  for (const auto& s : bundle) out.push_back(normalize_skill(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

WhatIf what_if(std::span<const std::string> bundle, const std::string& candidate,
               const ComplementarityGrid& grid, const DomainPartition& partition,
               const SkillGraph& graph) {
  const auto held = canonical_bundle(bundle);
  if (held.empty()) throw Error(ErrorCode::EmptySkillList, "skill bundle is empty");
  const auto key = normalize_skill(candidate);
  for (const auto& s : held) {
    if (!partition.find_domain(s)) {
      throw Error(ErrorCode::UnknownSkill, fmt::format("unknown skill '{}' in bundle", s));
    }
  }
  const auto skill = grid.skill_index(key);
  if (!skill) {
    throw Error(ErrorCode::UnknownSkill, fmt::format("'{}' is not a skill in the grid", key));
  }
  if (std::binary_search(held.begin(), held.end(), key)) {
    throw Error(ErrorCode::SkillAlreadyHeld, fmt::format("bundle already holds '{}'", key));
  }

  WhatIf out;
  out.candidate = key;
  out.domain = dominant_domain(held, partition, graph);
  out.domain_label = partition.label(out.domain);
  out.diversity = diversity(held, partition);

  const GridCell* cell = nullptr;
  if (auto d = grid.domain_index(out.domain)) {
    cell = &grid.cells[*d][*skill];
    if (cell->excluded()) {
      out.fallback = true;
      out.fallback_reason = cell->excluded_reason;
      cell = nullptr;
    }
  } else {
    out.fallback = true;
    out.fallback_reason = "no worker has this dominant domain";
  }
  if (!cell) cell = &grid.all[*skill];
  out.delta = cell->beta;
  out.percent_of_median = cell->percent_of_median;
  out.se = cell->se;
  out.p = cell->p;
  out.stars = cell->stars;
  out.n = cell->n;
  return out;
}

std::vector<WhatIf> recommend(std::span<const std::string> bundle, const ComplementarityGrid& grid,
                              const DomainPartition& partition, const SkillGraph& graph,
                              std::size_t top_n, double alpha) {
  const auto held = canonical_bundle(bundle);
  std::vector<WhatIf> out;
  for (const auto& key : grid.skills) {
    if (std::binary_search(held.begin(), held.end(), key)) continue;
    auto w = what_if(held, key, grid, partition, graph);
    if (alpha >= 1.0 || w.p < alpha) out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end(), [](const WhatIf& a, const WhatIf& b) {
    return a.delta != b.delta ? a.delta > b.delta : a.candidate < b.candidate;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

}  // namespace skillcompass
