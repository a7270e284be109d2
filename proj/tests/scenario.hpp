// Small planted populations shared by the compass, artifact and service tests.
#pragma once

#include <map>

#include "skillcompass/artifact.hpp"
#include "skillcompass/synth.hpp"

namespace scenario {

// Four domains of 15 skills. "Xlang" is worth +10 to workers of planted
// domain 1 and -10 to domain 2; "Ylang" is worth nothing anywhere.
inline skillcompass::SynthConfig small_config(std::uint64_t seed) {
  skillcompass::SynthConfig c = skillcompass::SynthConfig::defaults();
  c.seed = seed;
  c.n_workers = 3000;
  c.domain_sizes = {15, 15, 15, 15};
  c.skills_max = 6;
  c.planted = {{"Xlang", 0, 0.0, {{1, 10.0}, {2, -10.0}}, 0.3, 1.0},
               {"Ylang", 3, 0.0, {}, 0.3, 1.0}};
  return c;
}

inline skillcompass::PipelineConfig pipeline_config(std::size_t min_subset = 100) {
  skillcompass::PipelineConfig p;
  p.spec.target_skills = {"Xlang", "Ylang"};
  p.targets_explicit = true;
  p.min_subset_size = min_subset;
  return p;
}

inline skillcompass::ModelArtifact run(const skillcompass::SynthPopulation& pop,
                                       const skillcompass::PipelineConfig& config) {
  skillcompass::ParseResult in{pop.profiles, pop.lexicon, {}};
  return skillcompass::run_pipeline(in, config, "synthetic");
}

// Planted domain -> recovered domain, by majority vote over its skills.
inline std::map<std::size_t, skillcompass::DomainId> map_domains(const skillcompass::GroundTruth& truth,
                                                                 const skillcompass::DomainPartition& part) {
  std::map<std::size_t, std::map<skillcompass::DomainId, std::size_t>> votes;
  for (const auto& [key, planted] : truth.skill_domain) {
    if (auto d = part.find_domain(key)) ++votes[planted][*d];
  }
  std::map<std::size_t, skillcompass::DomainId> out;
  for (const auto& [planted, v] : votes) {
    auto best = v.begin();
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    out[planted] = best->first;
  }
  return out;
}

}  // namespace scenario
