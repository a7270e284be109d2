#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "skillcompass/artifact.hpp"
#include "skillcompass/compass.hpp"
#include "skillcompass/domains.hpp"
#include "skillcompass/econo.hpp"

namespace skillcompass {

// "One Domain", "Two Domains", ..., "Five+ Domains" at the cap.
std::string diversity_words(int level, int cap);

// Top skills per domain with their degree and domain label.
std::string render_centrality_table(const DomainPartition& partition, const SkillLexicon& lexicon);

struct RegressionTableOptions {
  bool full = false;  // also show the country dummies
  int decimals = 3;
  std::string dependent = "Asking wage (USD/h)";
};

// Skills, domains, earnings, diversity, constant; then the fit statistics.
std::string render_regression_table(const FitResult& fit, const FeatureSpec& spec,
                                    const DomainPartition& partition, const SkillLexicon& lexicon,
                                    const RegressionTableOptions& options = {});

// column, beta, se, t, p, stars
void write_coefficients_tsv(std::ostream& out, const FitResult& fit);

std::string render_collinearity(const CollinearityReport& report);

std::string render_grid(const ComplementarityGrid& grid, const SkillLexicon& lexicon);
// skill, domain, beta, se, p, stars, n, percent_of_median, excluded_reason
void write_grid_tsv(std::ostream& out, const ComplementarityGrid& grid);

std::string render_quartiles(const std::vector<WageGroup>& groups, const DomainPartition& partition,
                             int diversity_cap = 5);

std::string render_whatif(const WhatIf& w, const SkillLexicon& lexicon);
std::string render_recommendations(const std::vector<WhatIf>& list, const SkillLexicon& lexicon);

nlohmann::json whatif_to_json(const WhatIf& w, const SkillLexicon& lexicon);
nlohmann::json recommendations_to_json(const std::vector<WhatIf>& list, const SkillLexicon& lexicon);

// 0 success, 2 input error, 3 model or validation error.
int exit_code_for(ErrorCode code);

}  // namespace skillcompass
