#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "scenario.hpp"

#include "skillcompass/artifact.hpp"

using namespace skillcompass;

namespace {

const ModelArtifact& model() {
  static const ModelArtifact m = scenario::run(generate_population(scenario::small_config(21)),
                                               scenario::pipeline_config());
  return m;
}

}  // namespace

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("non-finite numbers survive JSON") {
  CHECK(json_number(1.5) == nlohmann::json(1.5));
  CHECK(json_number(std::nan("")).is_null());
  CHECK(json_number(INFINITY) == "inf");
  CHECK(json_number(-INFINITY) == "-inf");
  CHECK(std::isnan(number_from_json(nullptr)));
  CHECK(number_from_json("inf") == INFINITY);
  CHECK(number_from_json("-inf") == -INFINITY);
  CHECK(number_from_json(2.25) == 2.25);
}

TEST_CASE("artifact round trip is byte-identical") {
  const auto text = dump_artifact(model());
  const auto back = parse_artifact(text);
  CHECK(dump_artifact(back) == text);
  CHECK(back.grid == model().grid);
  CHECK(back.partition.assignment == model().partition.assignment);
  CHECK(back.partition.modularity_score == model().partition.modularity_score);
  CHECK(back.fit.residuals.size() == 0);

  const auto path = std::filesystem::temp_directory_path() / "sc_artifact_roundtrip.json";
  save_artifact(model(), path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == text);
  CHECK(dump_artifact(load_artifact(path.string())) == text);
  std::filesystem::remove(path);
}

TEST_CASE("tampered artifacts are rejected") {
  const auto text = dump_artifact(model());
  auto j = nlohmann::json::parse(text);
  j["fit"]["r2"] = 0.99;
  try {
    parse_artifact(j.dump());
    FAIL("expected InvalidArtifact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArtifact);
    CHECK(std::string(e.what()).find("checksum") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_artifact("{not json"), Error);
  CHECK_THROWS_AS(parse_artifact(text.substr(0, text.size() / 2)), Error);
  CHECK_THROWS_AS(load_artifact("/nonexistent/model.json"), Error);

  // a valid checksum over an inconsistent payload still fails the checks
  auto bad = nlohmann::json::parse(text);
  bad.erase("checksum");
  for (auto& cell : bad["grid"]["cells"]) {
    if (cell["domain"] == "ALL") cell["beta"] = 123.0;
  }
  bad["checksum"] = sha256_hex(bad.dump());
  CHECK_THROWS_AS(parse_artifact(bad.dump()), Error);
}

TEST_CASE("pipeline output is deterministic") {
  const auto pop = generate_population(scenario::small_config(21));
  const auto a = dump_artifact(scenario::run(pop, scenario::pipeline_config()));
  const auto b = dump_artifact(scenario::run(pop, scenario::pipeline_config()));
  CHECK(a == b);
  CHECK(a == dump_artifact(model()));
}

TEST_CASE("timestamp comes only from SOURCE_DATE_EPOCH") {
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK_FALSE(model().provenance.created);
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  const auto m = scenario::run(generate_population(scenario::small_config(21)), scenario::pipeline_config());
  ::unsetenv("SOURCE_DATE_EPOCH");
  REQUIRE(m.provenance.created);
  CHECK(m.provenance.created->rfind("1970-01-01", 0) == 0);
}

TEST_CASE("pipeline stages annotate their errors") {
  ParseResult empty;
  try {
    run_pipeline(empty, PipelineConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPopulation);
    CHECK(std::string(e.what()).rfind("ingest: ", 0) == 0);
  }
  auto pop = generate_population(scenario::small_config(21));
  auto config = scenario::pipeline_config();
  config.spec.country_baseline = "ZZ";
  try {
    scenario::run(pop, config);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BaselineNotFound);
    CHECK(std::string(e.what()).rfind("fit: ", 0) == 0);
  }
}

TEST_CASE("pipeline from the fixture file") {
  PipelineConfig c;
  c.min_subset_size = 5;
  c.spec.target_skills = {"python", "sql"};
  c.targets_explicit = true;
  const auto m = run_pipeline_file(SC_FIXTURES "/twenty_workers.csv", c);
  CHECK(m.provenance.input_rows == 20);
  CHECK(m.provenance.input_sha256.size() == 64);
  CHECK(m.fit.n == 20);
  CHECK_NOTHROW(check_consistency(m));
  PipelineConfig strict;
  strict.strict = true;
  CHECK_THROWS_AS(run_pipeline_file(SC_FIXTURES "/five_rows.csv", strict), Error);
}
