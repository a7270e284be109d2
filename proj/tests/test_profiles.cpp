#include <set>
#include <sstream>

#include "doctest.h"

#include "skillcompass/profiles.hpp"
#include "skillcompass/random.hpp"

using namespace skillcompass;

namespace {

ParseResult parse_text(const std::string& text, const ProfileSchema& schema = {}) {
  std::istringstream in(text);
  return parse_profiles(in, schema);
}

const std::string kHeader = "worker_id,country,wage,earned,skills\n";

}  // namespace

TEST_CASE("normalize_skill trims, collapses and case-folds") {
  CHECK(normalize_skill("  Adobe   Photoshop ") == "adobe photoshop");
  CHECK(normalize_skill("Python") == "python");
  CHECK(normalize_skill("C++\t Dev") == "c++ dev");
  CHECK_THROWS_AS(normalize_skill("   "), Error);
  try {
    normalize_skill("");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySkill);
  }
}

TEST_CASE("normalize_skill is idempotent") {
  Rng rng(11);
  const std::string alphabet = "aB c\tD  e-+#";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const auto len = rng.between(1, 14);
    for (int k = 0; k < len; ++k) s += alphabet[rng.below(alphabet.size())];
    if (s.find_first_not_of(" \t") == std::string::npos) continue;
    const auto once = normalize_skill(s);
    CHECK(normalize_skill(once) == once);
  }
}

TEST_CASE("single valid row") {
  auto r = parse_text(kHeader + "w1,US,30.0,1200,python|sql\n");
  REQUIRE(r.profiles.size() == 1);
  CHECK(r.profiles[0].skills == std::vector<std::string>{"python", "sql"});
  CHECK(r.profiles[0].wage == 30.0);
  CHECK(r.profiles[0].earned == 1200.0);
  CHECK(r.rejected.empty());
}

TEST_CASE("non-positive wage is rejected with its row number") {
  auto r = parse_text(kHeader + "w1,US,30.0,1200,python|sql\nw2,DE,0,100,python\n");
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.rejected[0].row == 2);
  CHECK(r.rejected[0].reason == ErrorCode::NonPositiveWage);
  CHECK(r.rejected[0].field == "wage");
  CHECK(r.rejected[0].message.find("row 2") != std::string::npos);
}

TEST_CASE("row level errors") {
  auto r = parse_text(kHeader +
                      "a,US,abc,1,python\n"
                      "b,US,10,-1,python\n"
                      "c,US,10,1,\n"
                      "d,US,10,1\n"
                      "f,US,10,1,python\n"
                      "f,US,12,1,sql\n"
                      "e,US,10,zz,python\n");
  REQUIRE(r.rejected.size() == 6);
  CHECK(r.rejected[0].reason == ErrorCode::MalformedNumber);
  CHECK(r.rejected[1].reason == ErrorCode::NegativeEarned);
  CHECK(r.rejected[2].reason == ErrorCode::EmptySkillList);
  CHECK(r.rejected[3].reason == ErrorCode::MalformedRow);
  CHECK(r.rejected[4].reason == ErrorCode::DuplicateWorker);
  CHECK(r.rejected[5].reason == ErrorCode::MalformedNumber);
  CHECK(r.rejected[5].field == "earned");
  REQUIRE(r.profiles.size() == 1);
  CHECK(r.profiles[0].wage == 10.0);
}

TEST_CASE("missing column throws") {
  std::istringstream in("worker_id,country,wage\nw1,US,3\n");
  try {
    parse_profiles(in);
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
    CHECK(std::string(e.what()).find("earned") != std::string::npos);
  }
}

TEST_CASE("five-row fixture") {
  auto r = parse_profiles_file(SC_FIXTURES "/five_rows.csv");
  REQUIRE(r.profiles.size() == 5);
  CHECK(r.rejected.empty());
  // w2 lists "Python|python": one canonical skill
  CHECK(r.profiles[1].skills.size() == 1);
  CHECK(r.profiles[1].skills[0] == "python");
  CHECK(r.profiles[2].skills == std::vector<std::string>{"adobe photoshop", "illustrator"});
  CHECK(r.profiles[3].country == "UNKNOWN");
  CHECK(r.profiles[4].skills == std::vector<std::string>{"c++", "python", "sql"});
  // python, sql, adobe photoshop, illustrator, excel, c++
  CHECK(r.lexicon.size() == 6);
  CHECK(r.lexicon.display("adobe photoshop") == "Adobe Photoshop");
  // "python" appears three times raw, "Python" once
  CHECK(r.lexicon.display("python") == "python");
  CHECK(r.lexicon.display("excel") == "Excel");
}

TEST_CASE("display name is the most frequent raw variant, ties lexicographic") {
  auto r = parse_text(kHeader + "a,US,1,0,SQL\nb,US,1,0,sql\nc,US,1,0,Sql\nd,US,1,0,SQL\n");
  CHECK(r.lexicon.display("sql") == "SQL");
  auto t = parse_text(kHeader + "a,US,1,0,Sql\nb,US,1,0,SQL\n");
  CHECK(t.lexicon.display("sql") == "SQL");
}

TEST_CASE("lexicon size equals distinct canonical keys of accepted rows") {
  auto r = parse_text(kHeader + "a,US,1,0,x|y\nb,US,0,0,z\nc,US,2,0,Y|w\n");
  CHECK(r.lexicon.size() == 3);
  CHECK_FALSE(r.lexicon.contains("z"));
  for (std::uint32_t i = 0; i < r.lexicon.size(); ++i) CHECK(r.lexicon.id_of(r.lexicon.key(i)) == i);
}

TEST_CASE("validate_population") {
  CHECK(format_summary(validate_population({})).rfind("0 workers, 0 skills", 0) == 0);
  std::vector<WorkerProfile> ps = {{"ok", "US", 10, 0, {"a"}}, {"bad", "US", -1, 0, {"a"}}};
  try {
    validate_population(ps);
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolationError& e) {
    CHECK(e.workers() == std::vector<std::string>{"bad"});
  }
  PopulationSummary s;
  s.workers = 14790;
  s.distinct_skills = 3480;
  CHECK(format_summary(s).rfind("14,790 workers, 3,480 skills", 0) == 0);
}

TEST_CASE("parse of serialize is identity") {
  Rng rng(5);
  const std::vector<std::string> pool = {"python", "sql", "c++", "adobe photoshop", "data, entry", "r \"lang\""};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WorkerProfile> ps;
    const auto n = rng.between(1, 20);
    for (int i = 0; i < n; ++i) {
      WorkerProfile p;
      p.worker_id = "w" + std::to_string(i);
      p.country = rng.bernoulli(0.5) ? "US" : "DE";
      p.wage = 0.5 + rng.uniform() * 100.0;
      p.earned = rng.bernoulli(0.2) ? 0.0 : std::exp(rng.normal() * 3.0);
      std::set<std::string> s;
      const auto k = rng.between(1, 4);
      while (static_cast<std::int64_t>(s.size()) < k) s.insert(pool[rng.below(pool.size())]);
      p.skills.assign(s.begin(), s.end());
      ps.push_back(p);
    }
    const auto text = serialize_profiles(ps);
    auto back = parse_text(text);
    REQUIRE(back.rejected.empty());
    CHECK(back.profiles == ps);
    CHECK(serialize_profiles(back.profiles) == text);
  }
}

TEST_CASE("custom schema") {
  ProfileSchema s;
  s.worker_id = "id";
  s.delimiter = ';';
  s.skill_separator = '/';
  auto r = parse_text("id;country;wage;earned;skills\nx;FR;9;1;a/b/A\n", s);
  REQUIRE(r.profiles.size() == 1);
  CHECK(r.profiles[0].skills == std::vector<std::string>{"a", "b"});
}

TEST_CASE("format helpers") {
  CHECK(group_thousands(0) == "0");
  CHECK(group_thousands(999) == "999");
  CHECK(group_thousands(1000) == "1,000");
  CHECK(group_thousands(13304) == "13,304");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  auto f = split_delimited("a,\"b,c\",\"d\"\"e\"", ',');
  REQUIRE(f);
  CHECK(*f == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK_FALSE(split_delimited("\"open", ','));
}
