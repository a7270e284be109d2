#include "skillcompass/profiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

namespace skillcompass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySkill: return "EmptySkill";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptySkillList: return "EmptySkillList";
    case ErrorCode::NonPositiveWage: return "NonPositiveWage";
    case ErrorCode::NegativeEarned: return "NegativeEarned";
    case ErrorCode::DuplicateWorker: return "DuplicateWorker";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::UnknownSkill: return "UnknownSkill";
    case ErrorCode::UnknownDomain: return "UnknownDomain";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::BaselineNotFound: return "BaselineNotFound";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::SkillAlreadyHeld: return "SkillAlreadyHeld";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArtifact: return "InvalidArtifact";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Trim and collapse whitespace, keeping case.
std::string collapse_whitespace(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos ||
         (!s.empty() && (is_space(s.front()) || is_space(s.back())));
}

void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

bool WorkerProfile::has_skill(std::string_view key) const {
  return std::binary_search(skills.begin(), skills.end(), key);
}

std::string normalize_skill(std::string_view raw) {
  std::string out = collapse_whitespace(raw);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (out.empty()) throw Error(ErrorCode::EmptySkill, "skill name is empty after normalization");
  return out;
}

SkillLexicon SkillLexicon::from_entries(std::map<std::string, std::string> key_to_display) {
  SkillLexicon lex;
  lex.keys_.reserve(key_to_display.size());
  lex.display_.reserve(key_to_display.size());
  for (auto& [key, display] : key_to_display) {
    lex.keys_.push_back(key);
    lex.display_.push_back(display.empty() ? key : std::move(display));
  }
  return lex;
}

bool SkillLexicon::contains(std::string_view key) const { return find(key).has_value(); }

std::optional<std::uint32_t> SkillLexicon::find(std::string_view key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - keys_.begin());
}

std::uint32_t SkillLexicon::id_of(std::string_view key) const {
  if (auto id = find(key)) return *id;
  throw Error(ErrorCode::UnknownSkill, fmt::format("unknown skill '{}'", key));
}

std::optional<std::vector<std::string>> split_delimited(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (in_quotes) return std::nullopt;
  fields.push_back(std::move(current));
  return fields;
}

ParseResult parse_profiles(std::istream& in, const ProfileSchema& schema) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MissingColumn, "profile table has no header row");
  }
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_delimited(line, schema.delimiter);
  if (!header) throw Error(ErrorCode::MissingColumn, "unterminated quote in header row");

  const std::array<const std::string*, 5> wanted = {&schema.worker_id, &schema.country,
                                                    &schema.wage, &schema.earned, &schema.skills};
  std::array<std::size_t, 5> col{};
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    auto it = std::find_if(header->begin(), header->end(),
                           [&](const std::string& h) { return trim(h) == *wanted[k]; });
    if (it == header->end()) {
      throw Error(ErrorCode::MissingColumn, fmt::format("header lacks column '{}'", *wanted[k]));
    }
    col[k] = static_cast<std::size_t>(it - header->begin());
  }

  // raw display variant counts per canonical key
  std::map<std::string, std::map<std::string, std::size_t>> variants;
  std::set<std::string> seen_ids;
  std::size_t row = 0;

  auto reject = [&](ErrorCode code, std::string field, std::string message) {
    result.rejected.push_back({row, code, std::move(field), std::move(message)});
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_delimited(line, schema.delimiter);
    if (!fields || fields->size() != header->size()) {
      reject(ErrorCode::MalformedRow, "",
             fmt::format("row {}: expected {} fields", row, header->size()));
      continue;
    }
    const auto& f = *fields;
    WorkerProfile p;
    p.worker_id = std::string(trim(f[col[0]]));
    if (p.worker_id.empty()) {
      reject(ErrorCode::MalformedRow, schema.worker_id, fmt::format("row {}: empty worker id", row));
      continue;
    }
    if (seen_ids.contains(p.worker_id)) {
      reject(ErrorCode::DuplicateWorker, schema.worker_id,
             fmt::format("row {}: duplicate worker id '{}'", row, p.worker_id));
      continue;
    }
    p.country = std::string(trim(f[col[1]]));
    if (p.country.empty()) p.country = kUnknownCountry;

    auto wage = parse_double(f[col[2]]);
    if (!wage) {
      reject(ErrorCode::MalformedNumber, schema.wage,
             fmt::format("row {}: wage '{}' is not a number", row, f[col[2]]));
      continue;
    }
    if (*wage <= 0.0) {
      reject(ErrorCode::NonPositiveWage, schema.wage,
             fmt::format("row {}: wage must be positive, got {}", row, f[col[2]]));
      continue;
    }
    auto earned = parse_double(f[col[3]]);
    if (!earned) {
      reject(ErrorCode::MalformedNumber, schema.earned,
             fmt::format("row {}: earned '{}' is not a number", row, f[col[3]]));
      continue;
    }
    if (*earned < 0.0) {
      reject(ErrorCode::NegativeEarned, schema.earned,
             fmt::format("row {}: earned must be non-negative, got {}", row, f[col[3]]));
      continue;
    }
    p.wage = *wage;
    p.earned = *earned;

    std::vector<std::pair<std::string, std::string>> row_skills;  // key, raw variant
    std::string_view cell = f[col[4]];
    std::size_t start = 0;
    while (start <= cell.size()) {
      std::size_t end = cell.find(schema.skill_separator, start);
      if (end == std::string_view::npos) end = cell.size();
      std::string raw = collapse_whitespace(cell.substr(start, end - start));
      if (!raw.empty()) row_skills.emplace_back(normalize_skill(raw), std::move(raw));
      start = end + 1;
    }
    if (row_skills.empty()) {
      reject(ErrorCode::EmptySkillList, schema.skills, fmt::format("row {}: no skills listed", row));
      continue;
    }
    for (auto& [key, raw] : row_skills) {
      ++variants[key][raw];
      p.skills.push_back(key);
    }
    std::sort(p.skills.begin(), p.skills.end());
    p.skills.erase(std::unique(p.skills.begin(), p.skills.end()), p.skills.end());
    seen_ids.insert(p.worker_id);
    result.profiles.push_back(std::move(p));
  }

  std::map<std::string, std::string> key_to_display;
  for (const auto& [key, counts] : variants) {
    // most frequent variant; std::map order makes ties lexicographic
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    key_to_display.emplace(key, best->first);
  }
  result.lexicon = SkillLexicon::from_entries(std::move(key_to_display));
  return result;
}

ParseResult parse_profiles_file(const std::string& path, const ProfileSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  return parse_profiles(in, schema);
}

PopulationSummary validate_population(const std::vector<WorkerProfile>& profiles) {
  PopulationSummary s;
  std::vector<std::string> offenders;
  std::set<std::string> ids;
  std::set<std::string_view> skills;
  bool first = true;
  for (const auto& p : profiles) {
    bool ok = std::isfinite(p.wage) && p.wage > 0.0 && std::isfinite(p.earned) &&
              p.earned >= 0.0 && !p.skills.empty() && ids.insert(p.worker_id).second;
    for (std::size_t i = 0; ok && i < p.skills.size(); ++i) {
      if (i > 0 && p.skills[i - 1] >= p.skills[i]) ok = false;
      else if (p.skills[i].empty() || normalize_skill(p.skills[i]) != p.skills[i]) ok = false;
    }
    if (!ok) {
      offenders.push_back(p.worker_id);
      continue;
    }
    for (const auto& k : p.skills) skills.insert(k);
    if (first) {
      s.wage_min = s.wage_max = p.wage;
      s.earned_min = s.earned_max = p.earned;
      first = false;
    }
    s.wage_min = std::min(s.wage_min, p.wage);
    s.wage_max = std::max(s.wage_max, p.wage);
    s.earned_min = std::min(s.earned_min, p.earned);
    s.earned_max = std::max(s.earned_max, p.earned);
  }
  if (!offenders.empty()) {
    std::string list;
    for (const auto& id : offenders) list += (list.empty() ? "" : ", ") + id;
    throw InvariantViolationError(offenders, "profile invariants violated by: " + list);
  }
  s.workers = profiles.size();
  s.distinct_skills = skills.size();
  return s;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_profiles(std::ostream& out, const std::vector<WorkerProfile>& profiles) {
  out << "worker_id,country,wage,earned,skills\n";
  for (const auto& p : profiles) {
    write_field(out, p.worker_id);
    out << ',';
    write_field(out, p.country);
    out << ',' << format_number(p.wage) << ',' << format_number(p.earned) << ',';
    std::string joined;
    for (const auto& k : p.skills) {
      if (!joined.empty()) joined.push_back('|');
      joined += k;
    }
    write_field(out, joined);
    out << '\n';
  }
}

std::string serialize_profiles(const std::vector<WorkerProfile>& profiles) {
  std::ostringstream out;
  write_profiles(out, profiles);
  return out.str();
}

std::string group_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string format_summary(const PopulationSummary& s) {
  return fmt::format("{} workers, {} skills; wage {:.2f}-{:.2f} USD/h; earned {:.2f}-{:.2f} USD",
                     group_thousands(s.workers), group_thousands(s.distinct_skills), s.wage_min,
                     s.wage_max, s.earned_min, s.earned_max);
}

}  // namespace skillcompass
