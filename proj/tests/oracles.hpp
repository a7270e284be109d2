// Independent reference implementations used only by the tests. None of
// them calls into the library code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "skillcompass/random.hpp"
#include "skillcompass/skillnet.hpp"

namespace oracle {

using Pair = std::pair<std::string, std::string>;

// Every unordered pair of every worker, counted by exhaustive enumeration.
inline std::map<Pair, std::uint64_t> pair_counts(const std::vector<std::vector<std::string>>& bundles) {
  std::map<Pair, std::uint64_t> out;
  for (const auto& raw : bundles) {
    std::set<std::string> s(raw.begin(), raw.end());
    for (const auto& a : s) {
      for (const auto& b : s) {
        if (a < b) ++out[{a, b}];
      }
    }
  }
  return out;
}

inline std::map<std::string, std::size_t> neighbour_counts(const std::map<Pair, std::uint64_t>& pairs) {
  std::map<std::string, std::set<std::string>> nb;
  for (const auto& [p, w] : pairs) {
    nb[p.first].insert(p.second);
    nb[p.second].insert(p.first);
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [k, v] : nb) out[k] = v.size();
  return out;
}

// Q by a double loop over node pairs: (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j).
inline double modularity(const skillcompass::SkillGraph& g, const std::vector<std::uint32_t>& comm,
                         double resolution = 1.0) {
  const std::size_t n = g.node_count();
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (i != j) k[i] += static_cast<double>(g.weight(i, j));
    }
    two_m += k[i];
  }
  double q = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (comm[i] != comm[j]) continue;
      const double a = i == j ? 0.0 : static_cast<double>(g.weight(i, j));
      q += a - resolution * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

// Normalised mutual information, arithmetic-mean normalisation.
inline double nmi(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::uint32_t, double> pa, pb;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[{a[i], b[i]}] += 1.0 / n;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (auto [_, p] : pa) ha -= p * std::log(p);
  for (auto [_, p] : pb) hb -= p * std::log(p);
  for (auto [key, p] : pab) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
  if (ha + hb == 0.0) return 1.0;
  return 2.0 * mi / (ha + hb);
}

// Planted partition: blocks of `size` nodes, unit-weight edges with
// probability p_in inside a block and p_out across blocks.
inline skillcompass::SkillGraph planted_blocks(std::size_t blocks, std::size_t size, double p_in,
                                               double p_out, std::uint64_t seed,
                                               std::vector<std::uint32_t>* truth = nullptr) {
  skillcompass::Rng rng(seed);
  const std::size_t n = blocks * size;
  std::vector<std::string> keys;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "v%04zu", i);
    keys.emplace_back(buf);
  }
  std::vector<std::vector<skillcompass::Neighbor>> adj(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const bool same = i / size == j / size;
      if (rng.uniform() < (same ? p_in : p_out)) {
        adj[i].push_back({j, 1});
        adj[j].push_back({i, 1});
      }
    }
  }
  if (truth) {
    truth->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*truth)[i] = static_cast<std::uint32_t>(i / size);
  }
  return skillcompass::SkillGraph(std::move(keys), std::move(adj));
}

// Complete graphs on consecutive node ranges, unit weights.
inline skillcompass::SkillGraph cliques(const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  std::vector<std::string> keys;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "c%04zu", i);
    keys.emplace_back(buf);
  }
  std::vector<std::vector<skillcompass::Neighbor>> adj(n);
  std::size_t start = 0;
  for (auto s : sizes) {
    for (std::size_t i = start; i < start + s; ++i) {
      for (std::size_t j = start; j < start + s; ++j) {
        if (i != j) adj[i].push_back({static_cast<std::uint32_t>(j), 1});
      }
    }
    start += s;
  }
  return skillcompass::SkillGraph(std::move(keys), std::move(adj));
}

using Matrix = std::vector<std::vector<long double>>;

// Gauss-Jordan inverse with partial pivoting; empty on singularity.
inline Matrix invert(Matrix a) {
  const std::size_t p = a.size();
  Matrix inv(p, std::vector<long double>(p, 0.0L));
  for (std::size_t i = 0; i < p; ++i) inv[i][i] = 1.0L;
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (std::fabs(a[piv][c]) < 1e-300L) return {};
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const long double d = a[c][c];
    for (std::size_t j = 0; j < p; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c || a[r][c] == 0.0L) continue;
      const long double f = a[r][c];
      for (std::size_t j = 0; j < p; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

struct NormalFit {
  std::vector<double> beta, se;
  double r2 = 0.0, f = 0.0, rss = 0.0, tss = 0.0;
  bool ok = false;
};

// beta = (X'X)^-1 X'y in extended precision. Column 0 is the intercept.
inline NormalFit normal_equations(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  NormalFit out;
  const std::size_t n = x.size(), p = x.front().size();
  Matrix xtx(p, std::vector<long double>(p, 0.0L));
  std::vector<long double> xty(p, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += static_cast<long double>(x[i][a]) * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += static_cast<long double>(x[i][a]) * x[i][b];
    }
  }
  const auto inv = invert(xtx);
  if (inv.empty()) return out;
  std::vector<long double> beta(p, 0.0L);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) beta[a] += inv[a][b] * xty[b];
  }
  long double rss = 0.0L, mean = 0.0L, tss = 0.0L;
  for (double v : y) mean += v;
  mean /= static_cast<long double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double fitted = 0.0L;
    for (std::size_t a = 0; a < p; ++a) fitted += x[i][a] * beta[a];
    rss += (y[i] - fitted) * (y[i] - fitted);
    tss += (y[i] - mean) * (y[i] - mean);
  }
  const long double sigma2 = rss / static_cast<long double>(n - p);
  for (std::size_t a = 0; a < p; ++a) {
    out.beta.push_back(static_cast<double>(beta[a]));
    out.se.push_back(static_cast<double>(std::sqrt(sigma2 * inv[a][a])));
  }
  out.rss = static_cast<double>(rss);
  out.tss = static_cast<double>(tss);
  out.r2 = tss == 0.0L ? 0.0 : static_cast<double>(1.0L - rss / tss);
  out.f = p > 1 ? static_cast<double>(((tss - rss) / (p - 1)) / sigma2) : 0.0;
  out.ok = true;
  return out;
}

// VIF_j = 1 / (1 - R^2_j) from regressing column j on an intercept and the
// other non-intercept columns. Column 0 is the intercept and is skipped.
inline std::vector<double> vif_auxiliary(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size(), p = x.front().size();
  std::vector<double> out;
  for (std::size_t j = 1; j < p; ++j) {
    std::vector<std::vector<double>> others(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
      others[i].push_back(1.0);
      for (std::size_t k = 1; k < p; ++k) {
        if (k != j) others[i].push_back(x[i][k]);
      }
      target[i] = x[i][j];
    }
    const auto fit = normal_equations(others, target);
    out.push_back(1.0 / (1.0 - fit.r2));
  }
  return out;
}

}  // namespace oracle
