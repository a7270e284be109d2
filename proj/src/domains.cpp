#include "skillcompass/domains.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "skillcompass/random.hpp"

namespace skillcompass {

DomainId DomainPartition::domain_of(std::string_view key) const {
  if (auto d = find_domain(key)) return *d;
  throw Error(ErrorCode::UnknownSkill, fmt::format("skill '{}' has no domain", key));
}

std::optional<DomainId> DomainPartition::find_domain(std::string_view key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return assignment[static_cast<std::size_t>(it - keys.begin())];
}

std::vector<std::string> DomainPartition::members(DomainId domain) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (assignment[i] == domain) out.push_back(keys[i]);
  }
  return out;
}

std::vector<std::size_t> DomainPartition::sizes() const {
  std::vector<std::size_t> out(domain_count(), 0);
  for (auto d : assignment) ++out.at(d);
  return out;
}

const std::string& DomainPartition::label(DomainId domain) const {
  if (domain >= labels.size()) {
    throw Error(ErrorCode::UnknownDomain, fmt::format("domain {} does not exist", domain));
  }
  return labels[domain];
}

double modularity(const SkillGraph& graph, std::span<const DomainId> assignment, double resolution) {
  if (assignment.size() != graph.node_count()) {
    throw Error(ErrorCode::InvariantViolation, "assignment does not cover every node");
  }
  const double m = static_cast<double>(graph.total_edge_weight());
  if (m == 0.0) throw Error(ErrorCode::EmptyGraph, "modularity is undefined without edges");
  const DomainId n_comm =
      assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<double> inside(n_comm, 0.0), total(n_comm, 0.0);
  for (std::uint32_t u = 0; u < graph.node_count(); ++u) {
    for (const auto& nb : graph.neighbors(u)) {
      const double w = static_cast<double>(nb.weight);
      total[assignment[u]] += w;
      if (assignment[nb.node] == assignment[u]) inside[assignment[u]] += w;  // seen twice
    }
  }
  double q = 0.0;
  for (DomainId c = 0; c < n_comm; ++c) {
    const double share = total[c] / (2.0 * m);
    q += inside[c] / (2.0 * m) - resolution * share * share;
  }
  return q;
}

namespace {

// Graph at one Louvain level. Self loops hold the weight internal to an
// aggregated node (each original edge counted once).
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;  // includes 2 * self_loop

  std::size_t size() const { return adj.size(); }
};

LevelGraph from_skill_graph(const SkillGraph& g) {
  LevelGraph lg;
  const std::size_t n = g.node_count();
  lg.adj.resize(n);
  lg.self_loop.assign(n, 0.0);
  lg.degree.assign(n, 0.0);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (const auto& nb : g.neighbors(u)) {
      lg.adj[u].emplace_back(nb.node, static_cast<double>(nb.weight));
      lg.degree[u] += static_cast<double>(nb.weight);
    }
  }
  return lg;
}

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const LevelGraph& g, std::span<const std::uint32_t> order, double m,
                double resolution, double min_gain, std::vector<std::uint32_t>& comm) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<double> link(n, 0.0);
  std::vector<char> touched_flag(n, 0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;

  for (;;) {
    bool moved = false;
    for (std::uint32_t node : order) {
      const std::uint32_t old = comm[node];
      const double k = g.degree[node];
      touched.clear();
      for (auto [v, w] : g.adj[node]) {
        const auto c = comm[v];
        if (!touched_flag[c]) {
          touched_flag[c] = 1;
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[old] -= k;
      // gain of inserting `node` into c, in units of m * dQ
      auto gain = [&](std::uint32_t c) { return link[c] - resolution * tot[c] * k / (2.0 * m); };
      const double stay = gain(old);
      std::sort(touched.begin(), touched.end());
      std::uint32_t best = old;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (auto c : touched) {
        if (c == old) continue;
        const double gc = gain(c);
        // ascending scan keeps the lowest id among equal gains
        if (best == old || gc > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
          best_gain = gc;
          best = c;
        }
      }
      if (best == old || (best_gain - stay) / m <= min_gain) best = old;
      tot[best] += k;
      if (best != old) {
        comm[node] = best;
        moved = true;
        any_move = true;
      }
      for (auto c : touched) {
        link[c] = 0.0;
        touched_flag[c] = 0;
      }
    }
    if (!moved) break;
  }
  return any_move;
}

// Renumbers communities densely by first appearance along `order`.
std::uint32_t renumber(std::vector<std::uint32_t>& comm, std::span<const std::uint32_t> order) {
  std::vector<std::uint32_t> remap(comm.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto node : order) {
    auto& r = remap[comm[node]];
    if (r == UINT32_MAX) r = next++;
  }
  for (auto& c : comm) c = remap[c];
  return next;
}

LevelGraph aggregate(const LevelGraph& g, std::span<const std::uint32_t> comm, std::uint32_t count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  std::vector<std::map<std::uint32_t, double>> acc(count);
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    const auto cu = comm[u];
    out.self_loop[cu] += g.self_loop[u];
    out.degree[cu] += g.degree[u];
    for (auto [v, w] : g.adj[u]) {
      const auto cv = comm[v];
      if (cu == cv) {
        out.self_loop[cu] += w / 2.0;  // each internal edge is visited from both ends
      } else {
        acc[cu][cv] += w;
      }
    }
  }
  for (std::uint32_t c = 0; c < count; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
  }
  return out;
}

}  // namespace

DomainPartition louvain(const SkillGraph& graph, const LouvainOptions& options) {
  if (!(options.resolution > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "resolution must be positive");
  }
  const double m = static_cast<double>(graph.total_edge_weight());
  if (m == 0.0) throw Error(ErrorCode::EmptyGraph, "cannot cluster a graph without edges");
  const std::size_t n = graph.node_count();

  Rng rng(options.seed);
  LevelGraph level = from_skill_graph(graph);
  std::vector<std::uint32_t> node_comm(n);  // original node -> current community
  std::iota(node_comm.begin(), node_comm.end(), 0u);

  DomainPartition result;
  result.resolution = options.resolution;
  result.seed = options.seed;
  double objective = modularity(graph, node_comm, options.resolution);
  result.pass_objective.push_back(objective);

  for (std::size_t depth = 0;; ++depth) {
    std::vector<std::uint32_t> order(level.size());
    if (depth == 0 && options.first_level_order) {
      order = *options.first_level_order;
      auto check = order;
      std::sort(check.begin(), check.end());
      bool valid = check.size() == n;
      for (std::uint32_t i = 0; valid && i < check.size(); ++i) valid = check[i] == i;
      if (!valid) {
        throw Error(ErrorCode::InvalidConfig, "first_level_order is not a permutation of nodes");
      }
    } else {
      std::iota(order.begin(), order.end(), 0u);
      rng.shuffle(order);
    }

    // singleton communities are numbered by visit position
    std::vector<std::uint32_t> comm(level.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) comm[order[i]] = i;
    if (!move_nodes(level, order, m, options.resolution, options.min_gain, comm)) break;

    const auto count = renumber(comm, order);
    for (auto& c : node_comm) c = comm[c];
    const double next = modularity(graph, node_comm, options.resolution);
    if (next < objective - 1e-10) {
      throw std::logic_error(fmt::format("Louvain objective decreased from {} to {}", objective, next));
    }
    objective = next;
    result.pass_objective.push_back(objective);
    if (count == level.size()) break;
    level = aggregate(level, comm, count);
  }

  // canonical numbering: by smallest member node id
  std::vector<std::uint32_t> by_node(n);
  std::iota(by_node.begin(), by_node.end(), 0u);
  const auto count = renumber(node_comm, by_node);

  result.keys = graph.keys();
  result.assignment.assign(node_comm.begin(), node_comm.end());
  result.labels.resize(count);
  for (DomainId d = 0; d < count; ++d) result.labels[d] = std::to_string(d);
  result.top_skills.resize(count);
  result.modularity_score = modularity(graph, result.assignment, 1.0);
  return result;
}

void label_domains(DomainPartition& partition, const SkillGraph& graph, const SkillLexicon& lexicon,
                   std::size_t k, const std::map<DomainId, std::string>& overrides) {
  const auto count = partition.domain_count();
  partition.top_skills.assign(count, {});
  for (DomainId d = 0; d < count; ++d) {
    const auto members = partition.members(d);
    auto top = top_k_by_degree(graph, members, std::max<std::size_t>(k, 1));
    partition.labels[d] = top.empty() ? std::to_string(d) : lexicon.display(top.front().key);
    if (top.size() > k) top.resize(k);
    partition.top_skills[d] = std::move(top);
  }
  for (const auto& [d, label] : overrides) {
    if (d < count) partition.labels[d] = label;
  }
}

std::map<DomainId, std::string> read_label_overrides(std::istream& in) {
  std::map<DomainId, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    DomainId d = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), d);
    if (tab == std::string::npos || ec != std::errc{} || ptr != line.data() + tab) {
      throw Error(ErrorCode::InvalidConfig,
                  fmt::format("label override line {} must be 'domain_id<TAB>label'", lineno));
    }
    out[d] = line.substr(tab + 1);
  }
  return out;
}

std::map<DomainId, std::string> read_label_overrides_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  return read_label_overrides(in);
}

std::vector<Penetration> cluster_penetration(const DomainPartition& partition,
                                             std::span<const std::string> flagged) {
  std::vector<Penetration> out(partition.domain_count());
  const auto sizes = partition.sizes();
  for (DomainId d = 0; d < out.size(); ++d) {
    out[d].domain = d;
    out[d].size = sizes[d];
  }
  std::vector<std::string> unique(flagged.begin(), flagged.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (const auto& key : unique) ++out[partition.domain_of(key)].flagged;
  for (auto& p : out) {
    p.share = p.size == 0 ? 0.0 : static_cast<double>(p.flagged) / static_cast<double>(p.size);
  }
  return out;
}

void write_partition(std::ostream& out, const DomainPartition& partition) {
  for (std::size_t i = 0; i < partition.keys.size(); ++i) {
    const auto d = partition.assignment[i];
    out << partition.keys[i] << '\t' << d << '\t' << partition.labels.at(d) << '\n';
  }
}

}  // namespace skillcompass
