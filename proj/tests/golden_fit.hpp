// The fixed regression behind the golden report: the 20-worker fixture with
// hand-assigned domains.
#pragma once

#include "skillcompass/econo.hpp"
#include "skillcompass/report.hpp"

namespace golden {

inline std::string regression_report(const std::string& fixture) {
  using namespace skillcompass;
  const auto parsed = parse_profiles_file(fixture);
  const auto graph = build_skill_graph(parsed.profiles, parsed.lexicon);
  const std::map<std::string, DomainId> dom = {{"python", 0}, {"r", 0},           {"sql", 0},
                                               {"figma", 1},  {"illustrator", 1}, {"photoshop", 1},
                                               {"data entry", 2}, {"excel", 2}};
  DomainPartition part;
  part.keys = graph.keys();
  for (const auto& k : part.keys) part.assignment.push_back(dom.at(k));
  part.labels = {"Software", "Design", "Admin"};
  part.top_skills.resize(3);
  FeatureSpec spec;
  spec.target_skills = {"python", "sql"};
  const auto design = build_design_matrix(parsed.profiles, part, graph, spec);
  spec.country_baseline = design.country_baseline;
  spec.diversity_baseline = design.diversity_baseline;
  spec.domain_baseline = design.domain_baseline;
  const auto fit = fit_ols(design);
  RegressionTableOptions opts;
  opts.full = true;
  return render_regression_table(fit, spec, part, parsed.lexicon, opts);
}

}  // namespace golden
