#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skillcompass/profiles.hpp"

namespace skillcompass {

struct Neighbor {
  std::uint32_t node = 0;
  std::uint64_t weight = 0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Undirected skill co-occurrence graph. Node ids are lexicon ids; each
/// adjacency row is sorted by neighbour id and holds no self-loop.
class SkillGraph {
 public:
  SkillGraph() = default;
  SkillGraph(std::vector<std::string> keys, std::vector<std::vector<Neighbor>> adjacency);

  std::size_t node_count() const { return keys_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::uint64_t total_edge_weight() const { return total_weight_; }

  const std::vector<std::string>& keys() const { return keys_; }
  const std::string& key(std::uint32_t node) const { return keys_.at(node); }
  std::uint32_t node_of(std::string_view key) const;  // throws UnknownSkill
  bool contains(std::string_view key) const;

  std::span<const Neighbor> neighbors(std::uint32_t node) const { return adjacency_.at(node); }
  std::uint64_t weight(std::uint32_t a, std::uint32_t b) const;
  std::uint64_t weighted_degree(std::uint32_t node) const;
  std::size_t degree(std::uint32_t node) const { return adjacency_.at(node).size(); }

  friend bool operator==(const SkillGraph&, const SkillGraph&) = default;

 private:
  std::vector<std::string> keys_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::uint64_t total_weight_ = 0;
  std::size_t edge_count_ = 0;
};

// Every worker with k skills adds one to each of its C(k,2) skill pairs.
SkillGraph build_skill_graph(const std::vector<WorkerProfile>& profiles, const SkillLexicon& lexicon);

// Unweighted degree of a skill (distinct neighbours).
std::size_t degree(const SkillGraph& graph, std::string_view skill);

struct RankedSkill {
  std::string key;
  std::size_t degree = 0;
  friend bool operator==(const RankedSkill&, const RankedSkill&) = default;
};

// Highest-degree members, descending; ties by canonical key.
std::vector<RankedSkill> top_k_by_degree(const SkillGraph& graph,
                                         std::span<const std::string> members, std::size_t k);

// `a<TAB>b<TAB>weight` per edge, a < b, sorted.
void write_edge_list(std::ostream& out, const SkillGraph& graph);
// Rebuilds a graph over `keys` (sorted) from an edge list.
SkillGraph read_edge_list(std::istream& in, std::vector<std::string> keys);

}  // namespace skillcompass
