#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool with_stderr = true) {
  Run r;
  const std::string cmd = std::string(SC_CLI) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "sc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// A simulated population and its artifact, built once.
fs::path artifact() {
  static const fs::path path = [] {
    const auto dir = workdir();
    auto sim = run("simulate --out-dir " + dir.string() + " --seed 4 --workers 3000");
    REQUIRE(sim.code == 0);
    auto pipe = run("pipeline --profiles " + (dir / "profiles.csv").string() + " --out " +
                    (dir / "model.json").string() + " --reports " + (dir / "reports").string());
    INFO(pipe.out);
    REQUIRE(pipe.code == 0);
    return dir / "model.json";
  }();
  return path;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("nosuchcommand").code == 2);
  CHECK(run("whatif --artifact x.json").code == 2);
  CHECK(run("cluster --profiles " SC_FIXTURES "/twenty_workers.csv --resolution -1").code == 2);
}

TEST_CASE("ingest") {
  auto ok = run("ingest --profiles " SC_FIXTURES "/five_rows.csv --json", false);
  CHECK(ok.code == 0);
  auto summary = nlohmann::json::parse(ok.out);
  CHECK(summary["rejected"].get<std::size_t>() + summary["workers"].get<std::size_t>() == 5);

  CHECK(run("ingest --strict --profiles " SC_FIXTURES "/five_rows.csv").code == 0);
  auto lenient = run("ingest --profiles " SC_FIXTURES "/bad_rows.csv");
  CHECK(lenient.code == 0);
  CHECK(lenient.out.find("row 2: NonPositiveWage") != std::string::npos);
  CHECK(lenient.out.find("row 3: MalformedNumber") != std::string::npos);
  CHECK(run("ingest --strict --profiles " SC_FIXTURES "/bad_rows.csv").code == 2);

  auto bad = run("ingest --profiles " SC_FIXTURES "/malformed.csv");
  CHECK(bad.code == 2);

  CHECK(run("ingest --profiles /nonexistent.csv").code == 2);
}

TEST_CASE("pipeline on malformed input exits 2 with the stage named") {
  auto r = run("pipeline --profiles " SC_FIXTURES "/malformed.csv --out " + (workdir() / "x.json").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("ingest:") != std::string::npos);
  CHECK_FALSE(fs::exists(workdir() / "x.json"));
}

TEST_CASE("graph, cluster and fit on the fixture") {
  const std::string in = "--profiles " SC_FIXTURES "/twenty_workers.csv";
  auto g = run("graph " + in);
  CHECK(g.code == 0);
  CHECK(g.out.find("python\tsql\t") != std::string::npos);
  CHECK(run("cluster " + in).code == 0);
  auto fit = run("fit " + in + " --targets 'python|sql' --json", false);
  CHECK(fit.code == 0);
  CHECK(nlohmann::json::parse(fit.out)["n"] == 20);
  auto collinear = run("fit " + in + " --targets 'python|sql' --country-baseline FR");
  CHECK(collinear.code == 2);
  CHECK(collinear.out.find("FR") != std::string::npos);
}

TEST_CASE("pipeline writes the artifact and reports") {
  const auto path = artifact();
  CHECK(fs::exists(path));
  for (const char* name : {"centrality.txt", "regression.txt", "vif.txt", "grid.txt", "grid.tsv",
                           "quartiles.txt", "diversity.txt"}) {
    CHECK(fs::exists(workdir() / "reports" / name));
  }
  auto report = run("report --artifact " + path.string() + " --section regression", false);
  CHECK(report.code == 0);
  CHECK(report.out.find("Observations") != std::string::npos);
  CHECK(report.out == slurp(workdir() / "reports" / "regression.txt"));
}

TEST_CASE("pipeline is byte-reproducible") {
  const auto dir = workdir();
  const auto again = dir / "model2.json";
  auto r = run("pipeline --profiles " + (dir / "profiles.csv").string() + " --out " + again.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(again) == slurp(artifact()));
}

TEST_CASE("whatif and recommend") {
  const auto path = artifact().string();
  auto model = nlohmann::json::parse(slurp(artifact()));
  const auto first = model["lexicon"][0][0].get<std::string>();
  auto w = run("whatif --artifact " + path + " --bundle '" + first + "' --candidate Java --json", false);
  INFO(w.out);
  REQUIRE(w.code == 0);
  auto j = nlohmann::json::parse(w.out);
  CHECK(j["candidate"] == "java");
  CHECK(j.contains("caveat"));

  auto text = run("whatif --artifact " + path + " --bundle '" + first + "' --candidate Java");
  CHECK(text.code == 0);
  CHECK(text.out.find("not causal") != std::string::npos);

  auto held = run("whatif --artifact " + path + " --bundle 'Java|" + first + "' --candidate java");
  CHECK(held.code == 2);
  auto unknown = run("whatif --artifact " + path + " --bundle 'zzzz' --candidate java");
  CHECK(unknown.code == 2);

  auto rec = run("recommend --artifact " + path + " --bundle '" + first + "' --alpha 1 --json", false);
  CHECK(rec.code == 0);
  CHECK(nlohmann::json::parse(rec.out)["recommendations"].size() > 0);
}

TEST_CASE("tampered artifact is refused") {
  auto text = slurp(artifact());
  const auto pos = text.find("\"r2\":");
  REQUIRE(pos != std::string::npos);
  text.insert(pos + 5, "1");
  const auto bad = workdir() / "tampered.json";
  std::ofstream(bad) << text;
  auto r = run("report --artifact " + bad.string());
  CHECK(r.code == 3);
  CHECK(r.out.find("checksum") != std::string::npos);
}
