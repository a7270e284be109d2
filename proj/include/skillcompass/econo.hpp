#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "skillcompass/domains.hpp"
#include "skillcompass/profiles.hpp"
#include "skillcompass/skillnet.hpp"

namespace skillcompass {

// Default regression targets: fourteen common programming languages.
std::vector<std::string> default_target_skills();

struct FeatureSpec {
  std::vector<std::string> target_skills = default_target_skills();
  // Unset baselines resolve to: most frequent country (ties lexicographic),
  // diversity level 1 (else the lowest level present), the domain that is
  // dominant for the most workers (ties lowest id).
  std::optional<std::string> country_baseline;
  std::optional<int> diversity_baseline;
  std::optional<DomainId> domain_baseline;
  double log_offset = 1.0;
  int diversity_cap = 5;  // levels >= cap pool into "cap+"
  bool log_wage = false;  // regress log(wage) instead of wage
};

enum class ColumnKind { Intercept, Country, LogEarnings, Diversity, Domain, Skill, Other };

std::string_view to_string(ColumnKind kind);

struct DesignColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Other;
  std::string level;  // country code, diversity level, domain id or skill key
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<DesignColumn> columns;
  std::string country_baseline;
  int diversity_baseline = 1;
  std::optional<DomainId> domain_baseline;  // unset when domain dummies are omitted

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
  std::optional<Eigen::Index> find_column(std::string_view name) const;
};

struct DesignOptions {
  bool include_domain_dummies = true;
};

// Domain holding the most of `skills`; ties go to the larger summed degree of
// the tied skills, then to the lowest domain id.
DomainId dominant_domain(std::span<const std::string> skills, const DomainPartition& partition,
                         const SkillGraph& graph);
DomainId dominant_domain(const WorkerProfile& profile, const DomainPartition& partition,
                         const SkillGraph& graph);

// Number of distinct domains among `skills` (>= 1 for a non-empty set).
int diversity(std::span<const std::string> skills, const DomainPartition& partition);
int diversity(const WorkerProfile& profile, const DomainPartition& partition);

// "1".."4", "5+" for the default cap.
std::string diversity_level_name(int level, int cap);

DesignMatrix build_design_matrix(const std::vector<WorkerProfile>& profiles,
                                 const DomainPartition& partition, const SkillGraph& graph,
                                 const FeatureSpec& spec, const DesignOptions& options = {});

struct Coefficient {
  std::string name;
  ColumnKind kind = ColumnKind::Other;
  std::string level;
  double beta = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
  std::string stars;
};

struct FitResult {
  std::vector<Coefficient> coefficients;
  std::size_t n = 0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double sigma = 0.0;  // residual standard error
  double rss = 0.0;
  double tss = 0.0;
  double f_stat = 0.0;
  double f_p = 1.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  Eigen::VectorXd residuals;

  const Coefficient* find(std::string_view name) const;
  const Coefficient* find_skill(std::string_view key) const;
};

// "***" p < 0.01, "**" p < 0.05, "*" p < 0.1.
std::string significance_stars(double p);

// Least squares through a column-pivoted Householder QR. Throws
// Underdetermined when rows <= cols and RankDeficientError (naming the
// aliased columns) when the design is singular.
FitResult fit_ols(const DesignMatrix& design);
FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<DesignColumn>& columns);

struct AliasedSet {
  std::string column;                   // the dependent column
  std::vector<std::string> depends_on;  // earlier columns it is a combination of
};

// Exact linear dependencies, scanning columns in design order.
std::vector<AliasedSet> find_aliased(const Eigen::MatrixXd& x,
                                     const std::vector<DesignColumn>& columns,
                                     double tolerance = 1e-9);

struct VifEntry {
  std::string column;
  double vif = 1.0;  // +inf for columns in an exact dependency
  bool flagged = false;
};

struct CollinearityReport {
  std::vector<VifEntry> vif;  // non-intercept columns, design order
  std::vector<AliasedSet> aliased;
  Eigen::Index rank = 0;
  double threshold = 10.0;
};

CollinearityReport detect_collinearity(const DesignMatrix& design, double threshold = 10.0);

// Type-7 quantile (linear interpolation) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double prob);
double median(std::span<const double> values);

// 100 * coef / median(wages).
double percent_of_median(double coef, std::span<const double> wages);

struct WageGroup {
  DomainId domain = 0;
  std::optional<int> diversity_level;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  std::size_t n = 0;
  bool low_n = false;
};

enum class WageGrouping { Domain, DomainDiversity };

std::vector<WageGroup> wage_quartiles(const std::vector<WorkerProfile>& profiles,
                                      const DomainPartition& partition, const SkillGraph& graph,
                                      WageGrouping group_by = WageGrouping::Domain,
                                      std::size_t min_group_size = 30, int diversity_cap = 5);

}  // namespace skillcompass
