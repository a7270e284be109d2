#include "skillcompass/skillnet.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

namespace skillcompass {

SkillGraph::SkillGraph(std::vector<std::string> keys, std::vector<std::vector<Neighbor>> adjacency)
    : keys_(std::move(keys)), adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != keys_.size()) {
    throw Error(ErrorCode::InvariantViolation, "adjacency size does not match node count");
  }
  std::uint64_t twice = 0;
  std::size_t half_edges = 0;
  for (std::uint32_t u = 0; u < adjacency_.size(); ++u) {
    auto& row = adjacency_[u];
    std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.node < b.node; });
    auto dup = std::adjacent_find(row.begin(), row.end(),
                                  [](auto& a, auto& b) { return a.node == b.node; });
    if (dup != row.end()) {
      throw Error(ErrorCode::InvariantViolation, fmt::format("duplicate edge {} -> {}", u, dup->node));
    }
    for (const auto& nb : row) {
      if (nb.node == u || nb.node >= keys_.size() || nb.weight == 0) {
        throw Error(ErrorCode::InvariantViolation,
                    fmt::format("invalid adjacency entry {} -> {}", u, nb.node));
      }
      twice += nb.weight;
    }
    half_edges += row.size();
  }
  for (std::uint32_t u = 0; u < adjacency_.size(); ++u) {
    for (const auto& nb : adjacency_[u]) {
      if (weight(nb.node, u) != nb.weight) {
        throw Error(ErrorCode::InvariantViolation, fmt::format("asymmetric edge {} -> {}", u, nb.node));
      }
    }
  }
  total_weight_ = twice / 2;
  edge_count_ = half_edges / 2;
}

std::uint32_t SkillGraph::node_of(std::string_view key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) {
    throw Error(ErrorCode::UnknownSkill, fmt::format("skill '{}' is not in the graph", key));
  }
  return static_cast<std::uint32_t>(it - keys_.begin());
}

bool SkillGraph::contains(std::string_view key) const {
  return std::binary_search(keys_.begin(), keys_.end(), key);
}

std::uint64_t SkillGraph::weight(std::uint32_t a, std::uint32_t b) const {
  const auto& row = adjacency_.at(a);
  auto it = std::lower_bound(row.begin(), row.end(), b,
                             [](const Neighbor& n, std::uint32_t v) { return n.node < v; });
  return (it != row.end() && it->node == b) ? it->weight : 0;
}

std::uint64_t SkillGraph::weighted_degree(std::uint32_t node) const {
  std::uint64_t total = 0;
  for (const auto& nb : adjacency_.at(node)) total += nb.weight;
  return total;
}

SkillGraph build_skill_graph(const std::vector<WorkerProfile>& profiles, const SkillLexicon& lexicon) {
  const std::size_t n = lexicon.size();
  std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> acc(n);
  std::vector<std::uint32_t> ids;
  for (const auto& p : profiles) {
    ids.clear();
    for (const auto& key : p.skills) ids.push_back(lexicon.id_of(key));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        ++acc[ids[i]][ids[j]];
        ++acc[ids[j]][ids[i]];
      }
    }
  }
  std::vector<std::vector<Neighbor>> adjacency(n);
  for (std::size_t u = 0; u < n; ++u) {
    adjacency[u].reserve(acc[u].size());
    for (const auto& [v, w] : acc[u]) adjacency[u].push_back({v, w});
  }
  return SkillGraph(lexicon.keys(), std::move(adjacency));
}

std::size_t degree(const SkillGraph& graph, std::string_view skill) {
  return graph.degree(graph.node_of(skill));
}

std::vector<RankedSkill> top_k_by_degree(const SkillGraph& graph,
                                         std::span<const std::string> members, std::size_t k) {
  std::vector<RankedSkill> ranked;
  ranked.reserve(members.size());
  for (const auto& key : members) ranked.push_back({key, degree(graph, key)});
  auto by_degree = [](const RankedSkill& a, const RankedSkill& b) {
    return a.degree != b.degree ? a.degree > b.degree : a.key < b.key;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_degree);
  ranked.resize(keep);
  return ranked;
}

void write_edge_list(std::ostream& out, const SkillGraph& graph) {
  // node ids follow key order, so iterating u < v is already sorted
  for (std::uint32_t u = 0; u < graph.node_count(); ++u) {
    for (const auto& nb : graph.neighbors(u)) {
      if (nb.node > u) out << graph.key(u) << '\t' << graph.key(nb.node) << '\t' << nb.weight << '\n';
    }
  }
}

SkillGraph read_edge_list(std::istream& in, std::vector<std::string> keys) {
  if (!std::is_sorted(keys.begin(), keys.end()) ||
      std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw Error(ErrorCode::InvalidArtifact, "edge list node keys must be sorted and unique");
  }
  auto node = [&](std::string_view key) {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) {
      throw Error(ErrorCode::UnknownSkill, fmt::format("edge list references unknown skill '{}'", key));
    }
    return static_cast<std::uint32_t>(it - keys.begin());
  };
  std::vector<std::vector<Neighbor>> adjacency(keys.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::uint64_t w = 0;
    if (t2 == std::string::npos) {
      throw Error(ErrorCode::InvalidArtifact, fmt::format("edge list line {} is malformed", lineno));
    }
    auto [ptr, ec] = std::from_chars(line.data() + t2 + 1, line.data() + line.size(), w);
    if (ec != std::errc{} || ptr != line.data() + line.size() || w == 0) {
      throw Error(ErrorCode::InvalidArtifact, fmt::format("edge list line {} has a bad weight", lineno));
    }
    auto a = node(std::string_view(line).substr(0, t1));
    auto b = node(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    if (a >= b) {
      throw Error(ErrorCode::InvalidArtifact, fmt::format("edge list line {} is not ordered", lineno));
    }
    adjacency[a].push_back({b, w});
    adjacency[b].push_back({a, w});
  }
  return SkillGraph(std::move(keys), std::move(adjacency));
}

}  // namespace skillcompass
