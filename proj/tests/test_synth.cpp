#include <set>

#include <fmt/format.h>

#include "doctest.h"
#include "oracles.hpp"

#include "skillcompass/domains.hpp"
#include "skillcompass/econo.hpp"
#include "skillcompass/skillnet.hpp"
#include "skillcompass/synth.hpp"

using namespace skillcompass;

namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig c = SynthConfig::defaults();
  c.seed = seed;
  c.n_workers = 2000;
  c.domain_sizes = {20, 20, 20};
  c.planted = {{"Alpha", 0, 5.0, {}, 0.4, 1.0 / 3.0},
               {"Beta", 1, -4.0, {}, 0.4, 1.0 / 3.0},
               {"Gamma", 2, 3.0, {}, 0.4, 1.0 / 3.0}};
  return c;
}

DomainPartition truth_partition(const SynthPopulation& pop, const SkillGraph& g, std::size_t domains) {
  DomainPartition p;
  p.keys = g.keys();
  for (const auto& k : p.keys) p.assignment.push_back(static_cast<DomainId>(pop.truth.skill_domain.at(k)));
  for (std::size_t d = 0; d < domains; ++d) p.labels.push_back(fmt::format("planted {}", d));
  return p;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = SynthConfig::defaults();
  CHECK(c.n_workers == 15000);
  CHECK(c.domain_sizes == std::vector<std::size_t>(7, 50));
  CHECK(c.cross_domain_leak == 0.15);
  CHECK(c.noise_sd == 8.0);
  CHECK(c.planted.size() == 5);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("same seed, same population") {
  const auto a = generate_population(small(5));
  const auto b = generate_population(small(5));
  const auto c = generate_population(small(6));
  CHECK(serialize_profiles(a.profiles) == serialize_profiles(b.profiles));
  CHECK(a.truth.worker_home == b.truth.worker_home);
  CHECK(serialize_profiles(a.profiles) != serialize_profiles(c.profiles));
  CHECK(a.profiles.size() == 2000);
  for (const auto& w : a.profiles) {
    CHECK(w.wage >= 3.0);
    CHECK(w.earned >= 0.0);
    CHECK(w.skills.size() >= 3);
  }
}

TEST_CASE("zero leak keeps workers inside their home domain") {
  auto c = small(11);
  c.cross_domain_leak = 0.0;
  const auto pop = generate_population(c);
  const auto g = build_skill_graph(pop.profiles, pop.lexicon);
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    for (const auto& nb : g.neighbors(u)) {
      CHECK(pop.truth.skill_domain.at(g.key(u)) == pop.truth.skill_domain.at(g.key(nb.node)));
    }
  }
  const auto part = truth_partition(pop, g, 3);
  for (std::size_t i = 0; i < pop.profiles.size(); ++i) {
    CHECK(diversity(pop.profiles[i], part) == 1);
    CHECK(dominant_domain(pop.profiles[i], part, g) == pop.truth.worker_home[i]);
  }
}

TEST_CASE("noiseless population is recovered exactly") {
  auto c = small(3);
  c.cross_domain_leak = 0.0;
  c.noise_sd = 0.0;
  c.gamma = 0.0;
  c.countries = {{"US", 1.0, 0.0}};
  const auto pop = generate_population(c);
  const auto g = build_skill_graph(pop.profiles, pop.lexicon);
  const auto part = truth_partition(pop, g, 3);
  FeatureSpec spec;
  spec.target_skills = {"Alpha", "Beta", "Gamma"};
  const auto dm = build_design_matrix(pop.profiles, part, g, spec);
  const auto fit = fit_ols(dm);
  CHECK(std::abs(fit.find_skill("alpha")->beta - 5.0) < 1e-8);
  CHECK(std::abs(fit.find_skill("beta")->beta + 4.0) < 1e-8);
  CHECK(std::abs(fit.find_skill("gamma")->beta - 3.0) < 1e-8);
  CHECK(std::abs(fit.find("(Intercept)")->beta - 40.0) < 1e-8);
}

TEST_CASE("raising a planted effect shifts its estimate by the same amount") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto lo = small(seed);
    auto hi = lo;
    hi.planted[0].effect_all += 3.0;
    const auto a = generate_population(lo);
    const auto b = generate_population(hi);
    const auto g = build_skill_graph(a.profiles, a.lexicon);
    const auto part = truth_partition(a, g, 3);
    FeatureSpec spec;
    spec.target_skills = {"Alpha", "Beta", "Gamma"};
    const auto fa = fit_ols(build_design_matrix(a.profiles, part, g, spec));
    const auto fb = fit_ols(build_design_matrix(b.profiles, part, g, spec));
    const auto* ca = fa.find_skill("alpha");
    const auto* cb = fb.find_skill("alpha");
    CHECK(std::abs(cb->beta - ca->beta - 3.0) < 2.0 * ca->se);
    CHECK(fb.find_skill("beta")->beta == doctest::Approx(fa.find_skill("beta")->beta));
  }
}

TEST_CASE("config validation") {
  auto bad = [](auto mutate) {
    auto c = small(1);
    mutate(c);
    try {
      c.validate();
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::InvalidConfig;
    }
  };
  CHECK(bad([](SynthConfig& c) { c.n_workers = 0; }));
  CHECK(bad([](SynthConfig& c) { c.cross_domain_leak = 1.5; }));
  CHECK(bad([](SynthConfig& c) { c.noise_sd = -1.0; }));
  CHECK(bad([](SynthConfig& c) { c.wage_floor = 0.0; }));
  CHECK(bad([](SynthConfig& c) { c.domain_sizes = {20, 0}; }));
  CHECK(bad([](SynthConfig& c) { c.skills_max = 50; }));
  CHECK(bad([](SynthConfig& c) { c.earned_zero_prob = -0.1; }));
  CHECK(bad([](SynthConfig& c) { c.planted[0].home_domain = 9; }));
  CHECK(bad([](SynthConfig& c) { c.planted[1].name = "alpha"; }));
  CHECK(bad([](SynthConfig& c) { c.countries.clear(); }));
  auto c = small(1);
  c.n_workers = 0;
  CHECK_THROWS_AS(generate_population(c), Error);
}

TEST_CASE("config JSON round trip") {
  const auto c = small(77);
  const auto back = synth_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(serialize_profiles(generate_population(back).profiles) ==
        serialize_profiles(generate_population(c).profiles));
  CHECK_THROWS_AS(synth_config_from_json(nlohmann::json{{"n_workers", "many"}}), Error);
}

TEST_CASE("default population: Louvain recovers the planted domains") {
  const auto pop = generate_population(SynthConfig::defaults());
  const auto g = build_skill_graph(pop.profiles, pop.lexicon);
  const auto part = louvain(g);
  std::vector<std::uint32_t> truth;
  for (const auto& k : g.keys()) truth.push_back(static_cast<std::uint32_t>(pop.truth.skill_domain.at(k)));
  const std::vector<std::uint32_t> found(part.assignment.begin(), part.assignment.end());
  CHECK(oracle::nmi(found, truth) >= 0.95);
  CHECK(part.domain_count() == 7);
}
