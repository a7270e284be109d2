#include "skillcompass/econo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

namespace skillcompass {

std::vector<std::string> default_target_skills() {
  return {"python", "java", "javascript", "c++", "c#",     "kotlin", "swift",
          "sql",    "r",    "php",        "matlab", "scala", "go",  "ruby"};
}

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Intercept: return "intercept";
    case ColumnKind::Country: return "country";
    case ColumnKind::LogEarnings: return "log_earnings";
    case ColumnKind::Diversity: return "diversity";
    case ColumnKind::Domain: return "domain";
    case ColumnKind::Skill: return "skill";
    case ColumnKind::Other: return "other";
  }
  return "other";
}

std::optional<Eigen::Index> DesignMatrix::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

DomainId dominant_domain(std::span<const std::string> skills, const DomainPartition& partition,
                         const SkillGraph& graph) {
  if (skills.empty()) throw Error(ErrorCode::EmptySkillList, "skill bundle is empty");
  std::map<DomainId, std::pair<std::size_t, std::size_t>> tally;  // count, summed degree
  for (const auto& key : skills) {
    auto& t = tally[partition.domain_of(key)];
    ++t.first;
    t.second += degree(graph, key);
  }
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    if (it->second > best->second) best = it;  // strict: lower id wins full ties
  }
  return best->first;
}

DomainId dominant_domain(const WorkerProfile& profile, const DomainPartition& partition,
                         const SkillGraph& graph) {
  return dominant_domain(profile.skills, partition, graph);
}

int diversity(std::span<const std::string> skills, const DomainPartition& partition) {
  std::set<DomainId> seen;
  for (const auto& key : skills) seen.insert(partition.domain_of(key));
  return static_cast<int>(seen.size());
}

int diversity(const WorkerProfile& profile, const DomainPartition& partition) {
  return diversity(profile.skills, partition);
}

std::string diversity_level_name(int level, int cap) {
  return level >= cap ? fmt::format("{}+", cap) : std::to_string(level);
}

DesignMatrix build_design_matrix(const std::vector<WorkerProfile>& profiles,
                                 const DomainPartition& partition, const SkillGraph& graph,
                                 const FeatureSpec& spec, const DesignOptions& options) {
  if (profiles.empty()) throw Error(ErrorCode::EmptyPopulation, "no workers to model");
  if (spec.diversity_cap < 1) throw Error(ErrorCode::InvalidConfig, "diversity cap must be >= 1");
  if (!(spec.log_offset >= 0.0)) throw Error(ErrorCode::InvalidConfig, "log offset must be >= 0");
  const std::size_t n = profiles.size();

  std::vector<int> level(n);
  std::vector<DomainId> dominant(n);
  std::map<std::string, std::size_t> country_count;
  std::map<int, std::size_t> level_count;
  std::map<DomainId, std::size_t> domain_count;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    level[i] = std::min(diversity(p, partition), spec.diversity_cap);
    dominant[i] = dominant_domain(p, partition, graph);
    ++country_count[p.country];
    ++level_count[level[i]];
    ++domain_count[dominant[i]];
  }

  DesignMatrix dm;
  if (spec.country_baseline) {
    if (!country_count.contains(*spec.country_baseline)) {
      throw Error(ErrorCode::BaselineNotFound,
                  fmt::format("country baseline '{}' not present in data", *spec.country_baseline));
    }
    dm.country_baseline = *spec.country_baseline;
  } else {
    auto best = std::max_element(country_count.begin(), country_count.end(),
                                 [](auto& a, auto& b) { return a.second < b.second; });
    dm.country_baseline = best->first;
  }
  if (spec.diversity_baseline) {
    const int wanted = std::min(*spec.diversity_baseline, spec.diversity_cap);
    if (!level_count.contains(wanted)) {
      throw Error(ErrorCode::BaselineNotFound,
                  fmt::format("diversity baseline {} not present in data", *spec.diversity_baseline));
    }
    dm.diversity_baseline = wanted;
  } else {
    dm.diversity_baseline = level_count.contains(1) ? 1 : level_count.begin()->first;
  }
  if (options.include_domain_dummies) {
    if (spec.domain_baseline) {
      if (!domain_count.contains(*spec.domain_baseline)) {
        throw Error(ErrorCode::BaselineNotFound,
                    fmt::format("domain baseline {} is no worker's dominant domain", *spec.domain_baseline));
      }
      dm.domain_baseline = *spec.domain_baseline;
    } else {
      auto best = std::max_element(domain_count.begin(), domain_count.end(),
                                   [](auto& a, auto& b) { return a.second < b.second; });
      dm.domain_baseline = best->first;
    }
  }

  std::vector<std::string> targets;
  for (const auto& raw : spec.target_skills) {
    auto key = normalize_skill(raw);
    if (std::find(targets.begin(), targets.end(), key) == targets.end()) targets.push_back(key);
  }

  auto& cols = dm.columns;
  cols.push_back({"(Intercept)", ColumnKind::Intercept, ""});
  for (const auto& [country, _] : country_count) {
    if (country != dm.country_baseline) {
      cols.push_back({fmt::format("country[{}]", country), ColumnKind::Country, country});
    }
  }
  cols.push_back({fmt::format("log(earned+{})", format_number(spec.log_offset)),
                  ColumnKind::LogEarnings, ""});
  for (const auto& [lvl, _] : level_count) {
    if (lvl != dm.diversity_baseline) {
      auto name = diversity_level_name(lvl, spec.diversity_cap);
      cols.push_back({fmt::format("diversity[{}]", name), ColumnKind::Diversity, name});
    }
  }
  if (options.include_domain_dummies) {
    for (const auto& [d, _] : domain_count) {
      if (d != *dm.domain_baseline) {
        cols.push_back({fmt::format("domain[{}]", d), ColumnKind::Domain, std::to_string(d)});
      }
    }
  }
  for (const auto& key : targets) cols.push_back({fmt::format("skill[{}]", key), ColumnKind::Skill, key});

  dm.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
  dm.y.resize(static_cast<Eigen::Index>(n));
  std::map<std::string, Eigen::Index> country_col, diversity_col, domain_col, skill_col;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    switch (cols[j].kind) {
      case ColumnKind::Country: country_col[cols[j].level] = idx; break;
      case ColumnKind::Diversity: diversity_col[cols[j].level] = idx; break;
      case ColumnKind::Domain: domain_col[cols[j].level] = idx; break;
      case ColumnKind::Skill: skill_col[cols[j].level] = idx; break;
      default: break;
    }
  }
  const auto log_col = static_cast<Eigen::Index>(
      std::find_if(cols.begin(), cols.end(), [](auto& c) { return c.kind == ColumnKind::LogEarnings; }) -
      cols.begin());

  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    const auto r = static_cast<Eigen::Index>(i);
    dm.x(r, 0) = 1.0;
    if (auto it = country_col.find(p.country); it != country_col.end()) dm.x(r, it->second) = 1.0;
    dm.x(r, log_col) = std::log(p.earned + spec.log_offset);
    if (auto it = diversity_col.find(diversity_level_name(level[i], spec.diversity_cap));
        it != diversity_col.end()) {
      dm.x(r, it->second) = 1.0;
    }
    if (auto it = domain_col.find(std::to_string(dominant[i])); it != domain_col.end()) {
      dm.x(r, it->second) = 1.0;
    }
    for (const auto& key : p.skills) {
      if (auto it = skill_col.find(key); it != skill_col.end()) dm.x(r, it->second) = 1.0;
    }
    dm.y(r) = spec.log_wage ? std::log(p.wage) : p.wage;
  }
  return dm;
}

std::string significance_stars(double p) {
  if (!(p < 0.1)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  return "*";
}

const Coefficient* FitResult::find(std::string_view name) const {
  for (const auto& c : coefficients) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Coefficient* FitResult::find_skill(std::string_view key) const {
  for (const auto& c : coefficients) {
    if (c.kind == ColumnKind::Skill && c.level == key) return &c;
  }
  return nullptr;
}

std::vector<AliasedSet> find_aliased(const Eigen::MatrixXd& x,
                                     const std::vector<DesignColumn>& columns, double tolerance) {
  // Gram-Schmidt with one re-orthogonalisation pass, in design order.
  const Eigen::Index n = x.rows(), p = x.cols();
  Eigen::MatrixXd q(n, p);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
  std::vector<Eigen::Index> basis;  // accepted original column per q column
  std::vector<AliasedSet> out;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd v = x.col(j);
    const double norm0 = v.norm();
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
    for (int pass = 0; pass < 2 && k > 0; ++pass) {
      Eigen::VectorXd c = q.leftCols(k).transpose() * v;
      v -= q.leftCols(k) * c;
      coef += c;
    }
    const double resid = v.norm();
    if (norm0 == 0.0 || resid <= tolerance * std::max(norm0, 1.0)) {
      AliasedSet set{columns.at(static_cast<std::size_t>(j)).name, {}};
      if (k > 0) {
        Eigen::VectorXd w = r.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(coef);
        for (Eigen::Index i = 0; i < k; ++i) {
          if (std::abs(w(i)) > 1e-8) {
            set.depends_on.push_back(columns.at(static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])).name);
          }
        }
      }
      out.push_back(std::move(set));
      continue;
    }
    r.block(0, k, k, 1) = coef;
    r(k, k) = resid;
    q.col(k) = v / resid;
    basis.push_back(j);
  }
  return out;
}

FitResult fit_ols(const DesignMatrix& design) { return fit_ols(design.x, design.y, design.columns); }

FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<DesignColumn>& columns) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (static_cast<std::size_t>(p) != columns.size() || y.size() != n) {
    throw Error(ErrorCode::InvalidConfig, "design matrix, response and column names disagree");
  }
  if (n <= p) {
    throw Error(ErrorCode::Underdetermined,
                fmt::format("{} observations cannot identify {} coefficients", n, p));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    auto aliased = find_aliased(x, columns);
    std::vector<std::string> names;
    for (const auto& a : aliased) names.push_back(a.column);
    if (names.empty()) {
      const auto& perm = qr.colsPermutation().indices();
      for (Eigen::Index i = qr.rank(); i < p; ++i) {
        names.push_back(columns[static_cast<std::size_t>(perm(i))].name);
      }
    }
    std::string list;
    for (const auto& a : names) list += (list.empty() ? "" : ", ") + a;
    throw RankDeficientError(names, fmt::format("design matrix is rank deficient (rank {} < {}); aliased: {}",
                                                qr.rank(), p, list));
  }

  const Eigen::VectorXd beta = qr.solve(y);
  FitResult fit;
  fit.n = static_cast<std::size_t>(n);
  fit.residuals = y - x * beta;
  fit.rss = fit.residuals.squaredNorm();
  fit.tss = (y.array() - y.mean()).matrix().squaredNorm();
  fit.df2 = static_cast<std::size_t>(n - p);
  const bool has_intercept =
      std::any_of(columns.begin(), columns.end(), [](auto& c) { return c.kind == ColumnKind::Intercept; });
  fit.df1 = static_cast<std::size_t>(p) - (has_intercept ? 1 : 0);
  const double df2 = static_cast<double>(fit.df2);
  const double sigma2 = fit.rss / df2;
  fit.sigma = std::sqrt(sigma2);
  fit.r2 = fit.tss > 0.0 ? 1.0 - fit.rss / fit.tss : 0.0;
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / df2;

  // diag((X'X)^-1) from the squared row norms of R^-1
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const auto& perm = qr.colsPermutation().indices();
  Eigen::VectorXd var(p);
  for (Eigen::Index i = 0; i < p; ++i) var(perm(i)) = r_inv.row(i).squaredNorm() * sigma2;

  boost::math::students_t t_dist(df2);
  fit.coefficients.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& col = columns[static_cast<std::size_t>(j)];
    Coefficient c{col.name, col.kind, col.level, beta(j), std::sqrt(var(j)), 0.0, 1.0, ""};
    if (c.se > 0.0) {
      c.t = c.beta / c.se;
      c.p = 2.0 * boost::math::cdf(boost::math::complement(t_dist, std::abs(c.t)));
    } else {
      c.t = c.beta == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.beta);
      c.p = c.beta == 0.0 ? 1.0 : 0.0;
    }
    c.stars = significance_stars(c.p);
    fit.coefficients.push_back(std::move(c));
  }

  if (fit.df1 == 0) {
    fit.f_stat = std::numeric_limits<double>::quiet_NaN();
    fit.f_p = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double explained = std::max(fit.tss - fit.rss, 0.0) / static_cast<double>(fit.df1);
    if (fit.rss > 0.0) {
      fit.f_stat = explained / sigma2;
      boost::math::fisher_f f_dist(static_cast<double>(fit.df1), df2);
      fit.f_p = boost::math::cdf(boost::math::complement(f_dist, fit.f_stat));
    } else {
      fit.f_stat = explained > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      fit.f_p = explained > 0.0 ? 0.0 : 1.0;
    }
  }
  return fit;
}

CollinearityReport detect_collinearity(const DesignMatrix& design, double threshold) {
  CollinearityReport report;
  report.threshold = threshold;
  report.aliased = find_aliased(design.x, design.columns);
  report.rank = design.cols() - static_cast<Eigen::Index>(report.aliased.size());

  std::set<std::string> in_dependency;
  for (const auto& a : report.aliased) {
    in_dependency.insert(a.column);
    in_dependency.insert(a.depends_on.begin(), a.depends_on.end());
  }

  // VIF_j = ||x_j - mean||^2 * [(Xc'Xc)^-1]_jj over the centred regressors
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const auto& col = design.columns[static_cast<std::size_t>(j)];
    if (col.kind != ColumnKind::Intercept && !in_dependency.contains(col.name)) keep.push_back(j);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
  Eigen::VectorXd vif_kept(k);
  if (k > 0) {
    Eigen::MatrixXd xc(design.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto& src = design.x.col(keep[static_cast<std::size_t>(i)]);
      xc.col(i) = src.array() - src.mean();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < k; ++i) {
      vif_kept(perm(i)) = r_inv.row(i).squaredNorm() * xc.col(perm(i)).squaredNorm();
    }
  }
  std::size_t next = 0;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const auto& col = design.columns[static_cast<std::size_t>(j)];
    if (col.kind == ColumnKind::Intercept) continue;
    VifEntry e{col.name, std::numeric_limits<double>::infinity(), true};
    if (next < keep.size() && keep[next] == j) {
      e.vif = vif_kept(static_cast<Eigen::Index>(next++));
      e.flagged = e.vif > threshold;
    }
    report.vif.push_back(std::move(e));
  }
  return report;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyPopulation, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, 0.5);
}

double percent_of_median(double coef, std::span<const double> wages) {
  return 100.0 * coef / median(wages);
}

std::vector<WageGroup> wage_quartiles(const std::vector<WorkerProfile>& profiles,
                                      const DomainPartition& partition, const SkillGraph& graph,
                                      WageGrouping group_by, std::size_t min_group_size,
                                      int diversity_cap) {
  std::map<std::pair<DomainId, int>, std::vector<double>> groups;
  for (const auto& p : profiles) {
    const auto d = dominant_domain(p, partition, graph);
    const int lvl = group_by == WageGrouping::DomainDiversity
                        ? std::min(diversity(p, partition), diversity_cap)
                        : 0;
    groups[{d, lvl}].push_back(p.wage);
  }
  std::vector<WageGroup> out;
  for (auto& [key, wages] : groups) {
    std::sort(wages.begin(), wages.end());
    WageGroup g;
    g.domain = key.first;
    if (group_by == WageGrouping::DomainDiversity) g.diversity_level = key.second;
    g.min = wages.front();
    g.q1 = quantile_sorted(wages, 0.25);
    g.median = quantile_sorted(wages, 0.5);
    g.q3 = quantile_sorted(wages, 0.75);
    g.max = wages.back();
    g.n = wages.size();
    g.low_n = g.n < min_group_size;
    out.push_back(g);
  }
  return out;
}

}  // namespace skillcompass
