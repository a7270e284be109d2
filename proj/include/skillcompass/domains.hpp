#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillcompass/profiles.hpp"
#include "skillcompass/skillnet.hpp"

namespace skillcompass {

using DomainId = std::uint32_t;

/// Skill -> domain mapping over the nodes of one SkillGraph. Domain ids are
/// dense from 0, numbered by the smallest node id they contain.
struct DomainPartition {
  std::vector<std::string> keys;        // node id -> skill key (graph order)
  std::vector<DomainId> assignment;     // node id -> domain
  std::vector<std::string> labels;      // domain -> display label
  std::vector<std::vector<RankedSkill>> top_skills;  // domain -> top-k by degree
  double modularity_score = 0.0;        // classic Q of `assignment`
  double resolution = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> pass_objective;   // resolution-scaled Q after each Louvain level

  std::size_t domain_count() const { return labels.size(); }
  DomainId domain_of(std::string_view key) const;  // throws UnknownSkill
  std::optional<DomainId> find_domain(std::string_view key) const;
  std::vector<std::string> members(DomainId domain) const;
  std::vector<std::size_t> sizes() const;
  const std::string& label(DomainId domain) const;  // throws UnknownDomain
};

// Newman-Girvan modularity with a resolution factor:
//   Q = sum_c [ w_in(c)/m - resolution * (w_tot(c) / 2m)^2 ]
double modularity(const SkillGraph& graph, std::span<const DomainId> assignment,
                  double resolution = 1.0);

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 42;
  double min_gain = 1e-9;
  // Overrides the seeded visit order of the first level (a permutation of
  // node ids). Later levels still draw their order from the seed.
  std::optional<std::vector<std::uint32_t>> first_level_order;
};

// Two-phase Louvain (local moving + aggregation). Labels are the raw domain
// ids until label_domains runs.
DomainPartition louvain(const SkillGraph& graph, const LouvainOptions& options = {});

// Labels each domain with the display name of its top-degree skill and keeps
// the top-k list; `overrides` (domain -> label) is applied last.
void label_domains(DomainPartition& partition, const SkillGraph& graph, const SkillLexicon& lexicon,
                   std::size_t k = 5, const std::map<DomainId, std::string>& overrides = {});

std::map<DomainId, std::string> read_label_overrides(std::istream& in);
std::map<DomainId, std::string> read_label_overrides_file(const std::string& path);

struct Penetration {
  DomainId domain = 0;
  std::size_t flagged = 0;
  std::size_t size = 0;
  double share = 0.0;
};

std::vector<Penetration> cluster_penetration(const DomainPartition& partition,
                                             std::span<const std::string> flagged);

// `skill_key<TAB>domain_id<TAB>label`, sorted by key.
void write_partition(std::ostream& out, const DomainPartition& partition);

}  // namespace skillcompass
