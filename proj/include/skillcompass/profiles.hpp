#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skillcompass/error.hpp"

namespace skillcompass {

inline constexpr std::string_view kUnknownCountry = "UNKNOWN";

/// One freelancer: the observation unit of the wage regressions.
struct WorkerProfile {
  std::string worker_id;
  std::string country;
  double wage = 0.0;    // asking wage, USD/hour
  double earned = 0.0;  // lifetime platform earnings, USD
  std::vector<std::string> skills;  // canonical keys, sorted, unique

  bool has_skill(std::string_view key) const;
  friend bool operator==(const WorkerProfile&, const WorkerProfile&) = default;
};

/// Canonical skill vocabulary. Ids are dense and follow the sorted key order,
/// so the lexicon of a population does not depend on row order.
class SkillLexicon {
 public:
  SkillLexicon() = default;

  // Builds from key -> display pairs; keys must already be canonical.
  static SkillLexicon from_entries(std::map<std::string, std::string> key_to_display);

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  bool contains(std::string_view key) const;
  std::optional<std::uint32_t> find(std::string_view key) const;
  std::uint32_t id_of(std::string_view key) const;  // throws UnknownSkill
  const std::string& key(std::uint32_t id) const { return keys_.at(id); }
  const std::string& display(std::uint32_t id) const { return display_.at(id); }
  const std::string& display(std::string_view key) const { return display_[id_of(key)]; }
  const std::vector<std::string>& keys() const { return keys_; }

  friend bool operator==(const SkillLexicon&, const SkillLexicon&) = default;

 private:
  std::vector<std::string> keys_;     // id -> key (sorted)
  std::vector<std::string> display_;  // id -> display name
};

/// Column names of the profile table.
struct ProfileSchema {
  std::string worker_id = "worker_id";
  std::string country = "country";
  std::string wage = "wage";
  std::string earned = "earned";
  std::string skills = "skills";
  char delimiter = ',';
  char skill_separator = '|';
};

struct RejectedRow {
  std::size_t row = 0;  // 1-based data row, header excluded
  ErrorCode reason = ErrorCode::MalformedRow;
  std::string field;
  std::string message;
};

struct ParseResult {
  std::vector<WorkerProfile> profiles;
  SkillLexicon lexicon;
  std::vector<RejectedRow> rejected;
};

struct PopulationSummary {
  std::size_t workers = 0;
  std::size_t distinct_skills = 0;
  double wage_min = 0.0, wage_max = 0.0;
  double earned_min = 0.0, earned_max = 0.0;
};

// Trim, collapse internal whitespace runs to one space, ASCII case-fold.
std::string normalize_skill(std::string_view raw);

// Header problems throw (MissingColumn); bad rows are collected in
// ParseResult::rejected and skipped.
ParseResult parse_profiles(std::istream& in, const ProfileSchema& schema = {});
ParseResult parse_profiles_file(const std::string& path, const ProfileSchema& schema = {});

PopulationSummary validate_population(const std::vector<WorkerProfile>& profiles);

// Canonical CSV form: default schema, skills joined by '|', shortest
// round-trip number formatting. parse_profiles reads it back unchanged.
void write_profiles(std::ostream& out, const std::vector<WorkerProfile>& profiles);
std::string serialize_profiles(const std::vector<WorkerProfile>& profiles);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// 14790 -> "14,790"
std::string group_thousands(std::size_t n);
std::string format_summary(const PopulationSummary& summary);

// Splits one delimited line honouring double quotes ("" escapes a quote).
// Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_delimited(std::string_view line, char delimiter);

}  // namespace skillcompass
