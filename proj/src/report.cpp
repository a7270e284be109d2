#include "skillcompass/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace skillcompass {

namespace {

constexpr int kLabelWidth = 30;
constexpr int kValueWidth = 22;

std::string display_of(const SkillLexicon& lexicon, const std::string& key) {
  return lexicon.contains(key) ? lexicon.display(key) : key;
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.{}f}", v, decimals);
}

std::string row(std::string_view label, std::string_view value) {
  return fmt::format("{:<{}}{:>{}}\n", label, kLabelWidth, value, kValueWidth);
}

std::string truncate(std::string s, std::size_t width) {
  if (s.size() > width) s = s.substr(0, width - 1) + "~";
  return s;
}

}  // namespace

std::string diversity_words(int level, int cap) {
  static const char* words[] = {"Zero", "One", "Two", "Three", "Four", "Five",
                                "Six",  "Seven", "Eight", "Nine", "Ten"};
  if (cap > 0) level = std::min(level, cap);
  std::string w = level >= 0 && level <= 10 ? words[level] : std::to_string(level);
  if (level >= cap) w += "+";
  return w + (level == 1 && cap > 1 ? " Domain" : " Domains");
}

std::string render_centrality_table(const DomainPartition& partition, const SkillLexicon& lexicon) {
  std::string out = fmt::format("{:<34}{:>8}  {}\n", "Skill", "Degree", "Domain");
  out += std::string(64, '-') + "\n";
  for (DomainId d = 0; d < partition.domain_count(); ++d) {
    for (const auto& r : partition.top_skills[d]) {
      out += fmt::format("{:<34}{:>8}  {}\n", truncate(display_of(lexicon, r.key), 33), r.degree,
                         partition.labels[d]);
    }
  }
  out += std::string(64, '-') + "\n";
  out += fmt::format("{} domains, modularity Q = {:.4f} (resolution {}, seed {})\n",
                     partition.domain_count(), partition.modularity_score,
                     format_number(partition.resolution), partition.seed);
  return out;
}

std::string render_regression_table(const FitResult& fit, const FeatureSpec& spec,
                                    const DomainPartition& partition, const SkillLexicon& lexicon,
                                    const RegressionTableOptions& options) {
  const int dp = options.decimals;
  const std::string rule(kLabelWidth + kValueWidth, '=');
  const std::string thin(kLabelWidth + kValueWidth, '-');
  std::string out = rule + "\n";
  out += row("", "Dependent variable:");
  out += row("", options.dependent);
  out += thin + "\n";

  auto emit = [&](const Coefficient& c, const std::string& label) {
    out += row(label, fixed(c.beta, dp) + c.stars);
    out += row("", "(" + fixed(c.se, dp) + ")");
  };
  auto each = [&](ColumnKind kind, auto&& label_of) {
    for (const auto& c : fit.coefficients) {
      if (c.kind == kind) emit(c, label_of(c));
    }
  };
  const int cap = spec.diversity_cap;
  each(ColumnKind::Skill, [&](const Coefficient& c) { return display_of(lexicon, c.level); });
  each(ColumnKind::Domain, [&](const Coefficient& c) {
    return "Domain: " + partition.label(static_cast<DomainId>(std::stoul(c.level)));
  });
  each(ColumnKind::LogEarnings, [](const Coefficient&) { return std::string("Earnings (log)"); });
  each(ColumnKind::Diversity, [&](const Coefficient& c) { return diversity_words(std::stoi(c.level), cap); });
  each(ColumnKind::Other, [](const Coefficient& c) { return c.name; });
  if (options.full) {
    each(ColumnKind::Country, [](const Coefficient& c) { return "Country: " + c.level; });
  }
  each(ColumnKind::Intercept, [](const Coefficient&) { return std::string("Constant"); });

  out += thin + "\n";
  out += row("Observations", group_thousands(fit.n));
  out += row("R2", fixed(fit.r2, dp));
  out += row("Adjusted R2", fixed(fit.adj_r2, dp));
  out += row("Residual Std. Error", fmt::format("{} (df = {})", fixed(fit.sigma, dp), fit.df2));
  if (fit.df1 > 0) {
    out += row("F Statistic", fmt::format("{}{} (df = {}; {})", fixed(fit.f_stat, dp),
                                          significance_stars(fit.f_p), fit.df1, fit.df2));
  } else {
    out += row("F Statistic", "NA");
  }
  out += rule + "\n";
  out += row("Note:", "*p<0.1; **p<0.05; ***p<0.01");

  std::vector<std::string> base;
  if (spec.country_baseline) base.push_back("country " + *spec.country_baseline);
  if (spec.diversity_baseline) base.push_back(diversity_words(*spec.diversity_baseline, cap));
  if (spec.domain_baseline && *spec.domain_baseline < partition.domain_count()) {
    base.push_back(fmt::format("domain {} ({})", *spec.domain_baseline, partition.label(*spec.domain_baseline)));
  }
  if (!base.empty()) out += "Reference levels: " + fmt::format("{}", fmt::join(base, ", ")) + ".\n";
  const bool has_country = std::any_of(fit.coefficients.begin(), fit.coefficients.end(),
                                       [](auto& c) { return c.kind == ColumnKind::Country; });
  if (has_country && !options.full) out += "Country dummies are estimated but not shown.\n";
  return out;
}

void write_coefficients_tsv(std::ostream& out, const FitResult& fit) {
  out << "column\tbeta\tse\tt\tp\tstars\n";
  for (const auto& c : fit.coefficients) {
    out << c.name << '\t' << format_number(c.beta) << '\t' << format_number(c.se) << '\t'
        << format_number(c.t) << '\t' << format_number(c.p) << '\t' << c.stars << '\n';
  }
}

std::string render_collinearity(const CollinearityReport& report) {
  std::string out = fmt::format("{:<34}{:>12}\n", "Column", "VIF");
  for (const auto& v : report.vif) {
    out += fmt::format("{:<34}{:>12}{}\n", truncate(v.column, 33), fixed(v.vif, 2), v.flagged ? "  HIGH" : "");
  }
  out += fmt::format("rank {}, threshold {}\n", report.rank, format_number(report.threshold));
  for (const auto& a : report.aliased) {
    out += fmt::format("aliased: {} = f({})\n", a.column, fmt::join(a.depends_on, ", "));
  }
  return out;
}

std::string render_grid(const ComplementarityGrid& grid, const SkillLexicon& lexicon) {
  constexpr int w = 14;
  std::string out = fmt::format("{:<18}", "Skill");
  for (const auto& d : grid.domains) out += fmt::format("{:>{}}", truncate(d.label, w - 1), w);
  out += fmt::format("{:>{}}\n", "ALL", w);
  auto cell_text = [](const GridCell& c) {
    return c.excluded() ? std::string("excl.") : fmt::format("{:+.2f}{}", c.beta, c.stars);
  };
  for (std::size_t s = 0; s < grid.skills.size(); ++s) {
    out += fmt::format("{:<18}", truncate(display_of(lexicon, grid.skills[s]), 17));
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      out += fmt::format("{:>{}}", cell_text(grid.cells[d][s]), w);
    }
    out += fmt::format("{:>{}}\n", cell_text(grid.all[s]), w);
  }
  out += "\n";
  for (const auto& d : grid.domains) {
    out += fmt::format("domain {} {}: n = {}, median wage {:.2f}", d.id, d.label, group_thousands(d.n),
                       d.median_wage);
    if (!d.excluded_reason.empty()) out += " (excluded: " + d.excluded_reason + ")";
    out += "\n";
  }
  for (std::size_t s = 0; s < grid.skills.size(); ++s) {
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      const auto& c = grid.cells[d][s];
      if (c.excluded() && grid.domains[d].excluded_reason.empty()) {
        out += fmt::format("excl. {} in {}: {}\n", grid.skills[s], grid.domains[d].label, c.excluded_reason);
      }
    }
  }
  out += "Cells: USD/h coefficient; *p<0.1; **p<0.05; ***p<0.01.\n";
  out += std::string(kCausalCaveat) + "\n";
  return out;
}

void write_grid_tsv(std::ostream& out, const ComplementarityGrid& grid) {
  out << "skill\tdomain\tbeta\tse\tp\tstars\tn\tpercent_of_median\texcluded_reason\n";
  auto line = [&](const std::string& skill, const std::string& domain, const GridCell& c) {
    out << skill << '\t' << domain << '\t';
    if (c.excluded()) {
      out << "\t\t\t\t" << c.n << "\t\t" << c.excluded_reason << '\n';
    } else {
      out << format_number(c.beta) << '\t' << format_number(c.se) << '\t' << format_number(c.p) << '\t'
          << c.stars << '\t' << c.n << '\t' << format_number(c.percent_of_median) << "\t\n";
    }
  };
  for (std::size_t s = 0; s < grid.skills.size(); ++s) {
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      line(grid.skills[s], std::to_string(grid.domains[d].id), grid.cells[d][s]);
    }
    line(grid.skills[s], "ALL", grid.all[s]);
  }
}

std::string render_quartiles(const std::vector<WageGroup>& groups, const DomainPartition& partition,
                             int diversity_cap) {
  std::string out = fmt::format("{:<26}{:<16}{:>8}{:>9}{:>9}{:>9}{:>9}{:>9}\n", "Domain", "Diversity", "n",
                                "min", "Q1", "median", "Q3", "max");
  for (const auto& g : groups) {
    const auto div = g.diversity_level ? diversity_words(*g.diversity_level, diversity_cap) : std::string("all");
    out += fmt::format("{:<26}{:<16}{:>8}{:>9.2f}{:>9.2f}{:>9.2f}{:>9.2f}{:>9.2f}{}\n",
                       truncate(partition.label(g.domain), 25), div, g.n, g.min, g.q1, g.median, g.q3,
                       g.max, g.low_n ? "  low n" : "");
  }
  return out;
}

std::string render_whatif(const WhatIf& w, const SkillLexicon& lexicon) {
  std::string out = fmt::format("Bundle domain: {} (id {}), diversity {}\n", w.domain_label, w.domain, w.diversity);
  out += fmt::format("+ {}: {:+.2f} USD/h ({:+.1f}% of median), se {:.2f}, p = {:.4f}{}, n = {}\n",
                     display_of(lexicon, w.candidate), w.delta, w.percent_of_median, w.se, w.p,
                     w.stars.empty() ? "" : " " + w.stars, group_thousands(w.n));
  if (w.fallback) out += "Fallback: full-sample (ALL) estimate used; " + w.fallback_reason + "\n";
  out += std::string(kCausalCaveat) + "\n";
  return out;
}

std::string render_recommendations(const std::vector<WhatIf>& list, const SkillLexicon& lexicon) {
  if (list.empty()) return "No candidate skill passes the significance filter.\n" + std::string(kCausalCaveat) + "\n";
  std::string out = fmt::format("Bundle domain: {} (id {}), diversity {}\n", list.front().domain_label,
                                list.front().domain, list.front().diversity);
  int rank = 0;
  for (const auto& w : list) {
    out += fmt::format("{:>3}. {:<24}{:>+9.2f} USD/h{:>+9.1f}%  {:<3}{}\n", ++rank,
                       truncate(display_of(lexicon, w.candidate), 23), w.delta, w.percent_of_median,
                       w.stars, w.fallback ? "  (ALL)" : "");
  }
  out += std::string(kCausalCaveat) + "\n";
  return out;
}

nlohmann::json whatif_to_json(const WhatIf& w, const SkillLexicon& lexicon) {
  return {{"candidate", w.candidate},
          {"candidate_display", display_of(lexicon, w.candidate)},
          {"domain", w.domain},
          {"domain_label", w.domain_label},
          {"diversity", w.diversity},
          {"delta", json_number(w.delta)},
          {"percent_of_median", json_number(w.percent_of_median)},
          {"se", json_number(w.se)},
          {"p", json_number(w.p)},
          {"stars", w.stars},
          {"n", w.n},
          {"fallback", w.fallback},
          {"fallback_reason", w.fallback_reason},
          {"caveat", kCausalCaveat}};
}

nlohmann::json recommendations_to_json(const std::vector<WhatIf>& list, const SkillLexicon& lexicon) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& w : list) {
    auto j = whatif_to_json(w, lexicon);
    j.erase("caveat");
    items.push_back(std::move(j));
  }
  return {{"recommendations", items}, {"caveat", kCausalCaveat}};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySkill:
    case ErrorCode::MissingColumn:
    case ErrorCode::MalformedNumber:
    case ErrorCode::MalformedRow:
    case ErrorCode::EmptySkillList:
    case ErrorCode::NonPositiveWage:
    case ErrorCode::NegativeEarned:
    case ErrorCode::DuplicateWorker:
    case ErrorCode::UnknownSkill:
    case ErrorCode::UnknownDomain:
    case ErrorCode::SkillAlreadyHeld:
    case ErrorCode::BaselineNotFound:
    case ErrorCode::InvalidConfig:
    case ErrorCode::Io:
      return 2;
    default:
      return 3;
  }
}

}  // namespace skillcompass
