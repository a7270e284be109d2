#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skillcompass/domains.hpp"
#include "skillcompass/econo.hpp"

namespace skillcompass {

// Attached to every rendered what-if and recommendation.
inline constexpr std::string_view kCausalCaveat =
    "Associations estimated from cross-sectional wage data, not causal effects of learning a skill.";

struct GridCell {
  double beta = 0.0;
  double se = 0.0;
  double p = 1.0;
  std::string stars;
  std::size_t n = 0;
  double percent_of_median = 0.0;
  std::string excluded_reason;  // empty when the cell holds an estimate

  bool excluded() const { return !excluded_reason.empty(); }
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridDomain {
  DomainId id = 0;
  std::string label;
  std::size_t n = 0;            // workers whose dominant domain this is
  double median_wage = 0.0;
  std::string excluded_reason;  // the whole column is excluded
  friend bool operator==(const GridDomain&, const GridDomain&) = default;
};

/// Skill x domain matrix of subset-regression coefficients plus the
/// full-sample "ALL" column.
struct ComplementarityGrid {
  std::vector<std::string> skills;         // target skill keys, row order
  std::vector<GridDomain> domains;         // domains with at least one worker
  std::vector<std::vector<GridCell>> cells;  // [domain index][skill index]
  std::vector<GridCell> all;               // [skill index]
  std::size_t min_subset_size = 100;
  double full_median_wage = 0.0;

  std::optional<std::size_t> skill_index(std::string_view key) const;
  std::optional<std::size_t> domain_index(DomainId id) const;
  friend bool operator==(const ComplementarityGrid&, const ComplementarityGrid&) = default;
};

std::vector<WorkerProfile> subset_by_domain(const std::vector<WorkerProfile>& profiles,
                                            const DomainPartition& partition, const SkillGraph& graph,
                                            DomainId domain);

// One regression per domain subset (domain dummies dropped). `full` must be
// the full-sample fit of the same spec; its skill rows become the ALL column.
ComplementarityGrid build_grid(const std::vector<WorkerProfile>& profiles,
                               const DomainPartition& partition, const SkillGraph& graph,
                               const FeatureSpec& spec, const FitResult& full,
                               std::size_t min_subset_size = 100);

// Convenience overload fitting the full sample first.
ComplementarityGrid build_grid(const std::vector<WorkerProfile>& profiles,
                               const DomainPartition& partition, const SkillGraph& graph,
                               const FeatureSpec& spec, std::size_t min_subset_size = 100);

struct WhatIf {
  std::string candidate;
  DomainId domain = 0;
  std::string domain_label;
  int diversity = 0;
  double delta = 0.0;  // USD/h
  double percent_of_median = 0.0;
  double se = 0.0;
  double p = 1.0;
  std::string stars;
  std::size_t n = 0;
  bool fallback = false;
  std::string fallback_reason;
};

WhatIf what_if(std::span<const std::string> bundle, const std::string& candidate,
               const ComplementarityGrid& grid, const DomainPartition& partition,
               const SkillGraph& graph);

// Grid skills not in the bundle with p < alpha (any p when alpha >= 1),
// by delta descending then key; at most top_n.
std::vector<WhatIf> recommend(std::span<const std::string> bundle, const ComplementarityGrid& grid,
                              const DomainPartition& partition, const SkillGraph& graph,
                              std::size_t top_n = 10, double alpha = 0.05);

}  // namespace skillcompass
