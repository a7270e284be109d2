#include "skillcompass/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "skillcompass/random.hpp"

namespace skillcompass {

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.countries = {
      {"US", 0.20, 10.0}, {"IN", 0.25, -6.0}, {"PH", 0.15, -8.0}, {"GB", 0.10, 8.0},
      {"DE", 0.10, 7.0},  {"UA", 0.10, -2.0}, {"PK", 0.10, -7.0},
  };
  c.planted = {
      {"C++", 0, 12.0, {}, 0.3, 1.0 / 3.0},
      {"Java", 1, 0.0, {{2, 10.0}, {3, -10.0}}, 0.3, 1.0 / 3.0},
      {"JavaScript", 6, 0.0, {}, 0.3, 1.0 / 3.0},
      {"Python", 4, 6.0, {}, 0.3, 1.0 / 3.0},
      {"SQL", 5, -8.0, {}, 0.3, 1.0 / 3.0},
  };
  return c;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (n_workers == 0) fail("n_workers must be positive");
  if (domain_sizes.empty()) fail("at least one domain is required");
  for (auto s : domain_sizes) {
    if (s == 0) fail("domain sizes must be >= 1");
  }
  if (skills_min < 1 || skills_max < skills_min) fail("skills-per-worker range is invalid");
  if (skills_max > *std::min_element(domain_sizes.begin(), domain_sizes.end())) {
    fail("skills_max exceeds the smallest domain size");
  }
  if (!prob(cross_domain_leak)) fail("cross_domain_leak must lie in [0,1]");
  if (domain_sizes.size() == 1 && cross_domain_leak > 0.0) fail("leak needs at least two domains");
  if (countries.empty()) fail("at least one country is required");
  for (const auto& c : countries) {
    if (c.code.empty() || !(c.weight >= 0.0)) fail("countries need a code and a weight >= 0");
  }
  if (!(noise_sd >= 0.0)) fail("noise_sd must be >= 0");
  if (!(wage_floor > 0.0)) fail("wage_floor must be positive");
  if (!prob(earned_zero_prob)) fail("earned_zero_prob must lie in [0,1]");
  if (!(earned_log_median > 0.0) || !(earned_log_sd >= 0.0)) fail("earnings distribution is invalid");
  if (diversity_effects.empty()) fail("diversity_effects needs at least one level");
  std::set<std::string> names;
  for (const auto& p : planted) {
    if (p.home_domain >= domain_sizes.size()) fail(fmt::format("planted skill '{}' has no home domain", p.name));
    if (!prob(p.adoption_home) || !prob(p.adoption_affinity)) {
      fail(fmt::format("planted skill '{}' has an invalid adoption probability", p.name));
    }
    for (const auto& [d, _] : p.domain_effects) {
      if (d >= domain_sizes.size()) fail(fmt::format("planted skill '{}' names unknown domain {}", p.name, d));
    }
    if (!names.insert(normalize_skill(p.name)).second) fail("planted skill names must be unique");
  }
}

namespace {

std::string regular_skill_name(std::size_t domain, std::size_t index) {
  return fmt::format("D{} Skill {:02}", domain, index);
}

}  // namespace

SynthPopulation generate_population(const SynthConfig& config) {
  config.validate();
  const std::size_t n_domains = config.domain_sizes.size();
  Rng rng(config.seed);

  SynthPopulation pop;
  pop.truth.seed = config.seed;
  pop.truth.planted = config.planted;

  std::map<std::string, std::string> key_to_display;
  std::vector<std::vector<std::string>> domain_keys(n_domains);
  for (std::size_t d = 0; d < n_domains; ++d) {
    for (std::size_t s = 0; s < config.domain_sizes[d]; ++s) {
      auto display = regular_skill_name(d, s);
      auto key = normalize_skill(display);
      domain_keys[d].push_back(key);
      key_to_display[key] = display;
      pop.truth.skill_domain[key] = d;
    }
  }
  std::vector<std::string> planted_keys;
  for (const auto& p : config.planted) {
    auto key = normalize_skill(p.name);
    if (key_to_display.contains(key)) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("planted skill '{}' collides with a generated name", p.name));
    }
    planted_keys.push_back(key);
    key_to_display[key] = p.name;
    pop.truth.skill_domain[key] = p.home_domain;
  }

  std::vector<double> country_weights;
  for (const auto& c : config.countries) country_weights.push_back(c.weight);
  const double log_mu = std::log(config.earned_log_median);
  const std::size_t n_levels = config.diversity_effects.size();

  pop.profiles.reserve(config.n_workers);
  pop.truth.worker_home.reserve(config.n_workers);
  std::set<std::string> used;
  for (std::size_t i = 0; i < config.n_workers; ++i) {
    const auto home = static_cast<std::size_t>(rng.below(n_domains));
    const auto k = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(config.skills_min),
                                                        static_cast<std::int64_t>(config.skills_max)));
    std::set<std::string> skills;
    std::set<std::size_t> domains_held;
    while (skills.size() < k) {
      std::size_t d = home;
      if (rng.bernoulli(config.cross_domain_leak)) {
        d = static_cast<std::size_t>(rng.below(n_domains - 1));
        if (d >= home) ++d;
      }
      const auto& pool = domain_keys[d];
      if (skills.insert(pool[rng.below(pool.size())]).second) domains_held.insert(d);
    }

    double wage = config.base_wage;
    for (std::size_t s = 0; s < config.planted.size(); ++s) {
      const auto& p = config.planted[s];
      const double rate = p.home_domain == home
                              ? p.adoption_home
                              : std::min(1.0, config.cross_domain_leak * p.adoption_affinity);
      if (!rng.bernoulli(rate)) continue;
      skills.insert(planted_keys[s]);
      domains_held.insert(p.home_domain);
      auto it = p.domain_effects.find(home);
      wage += it != p.domain_effects.end() ? it->second : p.effect_all;
    }

    const auto& country = config.countries[rng.categorical(country_weights)];
    double earned = 0.0;
    if (!rng.bernoulli(config.earned_zero_prob)) {
      earned = std::round(std::exp(log_mu + config.earned_log_sd * rng.normal()) * 100.0) / 100.0;
    }
    const double noise = rng.normal();

    const std::size_t level = std::min(domains_held.size(), n_levels);
    wage += country.wage_offset + config.gamma * std::log(earned + 1.0) +
            config.diversity_effects[level - 1] + config.noise_sd * noise;
    wage = std::max(wage, config.wage_floor);

    WorkerProfile w;
    w.worker_id = fmt::format("w{:06}", i + 1);
    w.country = country.code;
    w.wage = wage;
    w.earned = earned;
    w.skills.assign(skills.begin(), skills.end());
    for (const auto& key : w.skills) used.insert(key);
    pop.profiles.push_back(std::move(w));
    pop.truth.worker_home.push_back(home);
  }

  // the lexicon only covers skills somebody actually holds, as with parsed data
  std::erase_if(key_to_display, [&](auto& kv) { return !used.contains(kv.first); });
  pop.lexicon = SkillLexicon::from_entries(std::move(key_to_display));
  return pop;
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json j;
  j["seed"] = truth.seed;
  j["skill_domain"] = truth.skill_domain;
  auto& planted = j["planted"] = nlohmann::json::array();
  for (const auto& p : truth.planted) {
    nlohmann::json e;
    e["skill"] = normalize_skill(p.name);
    e["name"] = p.name;
    e["home_domain"] = p.home_domain;
    e["effect_all"] = p.effect_all;
    auto& by_domain = e["domain_effects"] = nlohmann::json::object();
    for (const auto& [d, v] : p.domain_effects) by_domain[std::to_string(d)] = v;
    planted.push_back(std::move(e));
  }
  j["worker_home"] = truth.worker_home;
  return j;
}

nlohmann::json to_json(const SynthConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["n_workers"] = c.n_workers;
  j["domain_sizes"] = c.domain_sizes;
  j["skills_min"] = c.skills_min;
  j["skills_max"] = c.skills_max;
  j["cross_domain_leak"] = c.cross_domain_leak;
  auto& countries = j["countries"] = nlohmann::json::array();
  for (const auto& k : c.countries) {
    countries.push_back({{"code", k.code}, {"weight", k.weight}, {"wage_offset", k.wage_offset}});
  }
  auto& planted = j["planted"] = nlohmann::json::array();
  for (const auto& p : c.planted) {
    nlohmann::json by_domain = nlohmann::json::object();
    for (const auto& [d, v] : p.domain_effects) by_domain[std::to_string(d)] = v;
    planted.push_back({{"name", p.name},
                       {"home_domain", p.home_domain},
                       {"effect_all", p.effect_all},
                       {"domain_effects", by_domain},
                       {"adoption_home", p.adoption_home},
                       {"adoption_affinity", p.adoption_affinity}});
  }
  j["gamma"] = c.gamma;
  j["diversity_effects"] = c.diversity_effects;
  j["noise_sd"] = c.noise_sd;
  j["base_wage"] = c.base_wage;
  j["wage_floor"] = c.wage_floor;
  j["earned_zero_prob"] = c.earned_zero_prob;
  j["earned_log_median"] = c.earned_log_median;
  j["earned_log_sd"] = c.earned_log_sd;
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c = SynthConfig::defaults();
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("seed", c.seed);
    get("n_workers", c.n_workers);
    get("domain_sizes", c.domain_sizes);
    get("skills_min", c.skills_min);
    get("skills_max", c.skills_max);
    get("cross_domain_leak", c.cross_domain_leak);
    if (j.contains("countries")) {
      c.countries.clear();
      for (const auto& e : j.at("countries")) {
        c.countries.push_back({e.at("code").get<std::string>(), e.value("weight", 1.0),
                               e.value("wage_offset", 0.0)});
      }
    }
    if (j.contains("planted")) {
      c.planted.clear();
      for (const auto& e : j.at("planted")) {
        PlantedSkill p;
        p.name = e.at("name").get<std::string>();
        p.home_domain = e.at("home_domain").get<std::size_t>();
        p.effect_all = e.value("effect_all", 0.0);
        if (e.contains("domain_effects")) {
          for (const auto& [d, v] : e.at("domain_effects").items()) {
            p.domain_effects[std::stoul(d)] = v.get<double>();
          }
        }
        p.adoption_home = e.value("adoption_home", p.adoption_home);
        p.adoption_affinity = e.value("adoption_affinity", p.adoption_affinity);
        c.planted.push_back(std::move(p));
      }
    }
    get("gamma", c.gamma);
    get("diversity_effects", c.diversity_effects);
    get("noise_sd", c.noise_sd);
    get("base_wage", c.base_wage);
    get("wage_floor", c.wage_floor);
    get("earned_zero_prob", c.earned_zero_prob);
    get("earned_log_median", c.earned_log_median);
    get("earned_log_sd", c.earned_log_sd);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad synth config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad synth config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace skillcompass
