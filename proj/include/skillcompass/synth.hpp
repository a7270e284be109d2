#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "skillcompass/profiles.hpp"

namespace skillcompass {

struct SynthCountry {
  std::string code;
  double weight = 1.0;       // sampling weight
  double wage_offset = 0.0;  // USD/h
};

/// A skill with a planted wage effect. It lives in `home_domain` but is also
/// adopted outside it, so its effect is estimable in every domain subset.
struct PlantedSkill {
  std::string name;  // display name; canonical key is normalize_skill(name)
  std::size_t home_domain = 0;
  double effect_all = 0.0;                  // applies unless overridden below
  std::map<std::size_t, double> domain_effects;  // worker home domain -> effect
  double adoption_home = 0.3;     // P(held) for workers of the home domain
  double adoption_affinity = 1.0 / 3.0;  // P(held) elsewhere = leak * affinity
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_workers = 15000;
  std::vector<std::size_t> domain_sizes = std::vector<std::size_t>(7, 50);
  std::size_t skills_min = 3;
  std::size_t skills_max = 8;
  double cross_domain_leak = 0.15;
  std::vector<SynthCountry> countries;
  std::vector<PlantedSkill> planted;
  double gamma = 3.0;  // coefficient on log(earned + 1)
  std::vector<double> diversity_effects = {0.0, 2.0, 4.0, 5.0, 6.0};  // level 1.., last is "cap+"
  double noise_sd = 8.0;
  double base_wage = 40.0;
  double wage_floor = 3.0;
  double earned_zero_prob = 0.08;
  double earned_log_median = 1000.0;
  double earned_log_sd = 1.5;

  // 15,000 workers, 7 x 50 skills, five planted language skills; "Java"
  // carries +10 in planted domain 2 and -10 in planted domain 3.
  static SynthConfig defaults();
  void validate() const;  // throws InvalidConfig
};

struct GroundTruth {
  std::map<std::string, std::size_t> skill_domain;  // canonical key -> planted domain
  std::vector<std::size_t> worker_home;             // per generated worker
  std::vector<PlantedSkill> planted;
  std::uint64_t seed = 0;
};

struct SynthPopulation {
  std::vector<WorkerProfile> profiles;  // canonical keys, as parse_profiles yields
  SkillLexicon lexicon;
  GroundTruth truth;
};

SynthPopulation generate_population(const SynthConfig& config);

nlohmann::json to_json(const GroundTruth& truth);
nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

}  // namespace skillcompass
