#include "skillcompass/artifact.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace skillcompass {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const RankDeficientError& e) {
    throw RankDeficientError(e.aliased(), fmt::format("{}: {}", name, e.what()));
  } catch (const InvariantViolationError& e) {
    throw InvariantViolationError(e.workers(), fmt::format("{}: {}", name, e.what()));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", name, e.what()));
  }
}

std::optional<std::string> build_timestamp() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (!epoch || !*epoch) return std::nullopt;
  char* end = nullptr;
  const long long secs = std::strtoll(epoch, &end, 10);
  if (*end != '\0') return std::nullopt;
  std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

ColumnKind column_kind_from(std::string_view s) {
  for (auto k : {ColumnKind::Intercept, ColumnKind::Country, ColumnKind::LogEarnings,
                 ColumnKind::Diversity, ColumnKind::Domain, ColumnKind::Skill}) {
    if (to_string(k) == s) return k;
  }
  return ColumnKind::Other;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArtifact, "invalid artifact: " + what);
}

json cell_to_json(const GridCell& c) {
  return {{"beta", json_number(c.beta)},
          {"se", json_number(c.se)},
          {"p", json_number(c.p)},
          {"stars", c.stars},
          {"n", c.n},
          {"percent_of_median", json_number(c.percent_of_median)},
          {"excluded_reason", c.excluded_reason}};
}

GridCell cell_from_json(const json& j) {
  GridCell c;
  c.beta = number_from_json(j.at("beta"));
  c.se = number_from_json(j.at("se"));
  c.p = number_from_json(j.at("p"));
  c.stars = j.at("stars").get<std::string>();
  c.n = j.at("n").get<std::size_t>();
  c.percent_of_median = number_from_json(j.at("percent_of_median"));
  c.excluded_reason = j.at("excluded_reason").get<std::string>();
  return c;
}

json group_to_json(const WageGroup& g) {
  json j = {{"domain", g.domain}, {"min", g.min},     {"q1", g.q1}, {"median", g.median},
            {"q3", g.q3},         {"max", g.max},     {"n", g.n},   {"low_n", g.low_n}};
  j["diversity_level"] = g.diversity_level ? json(*g.diversity_level) : json(nullptr);
  return j;
}

WageGroup group_from_json(const json& j) {
  WageGroup g;
  g.domain = j.at("domain").get<DomainId>();
  if (!j.at("diversity_level").is_null()) g.diversity_level = j.at("diversity_level").get<int>();
  g.min = j.at("min").get<double>();
  g.q1 = j.at("q1").get<double>();
  g.median = j.at("median").get<double>();
  g.q3 = j.at("q3").get<double>();
  g.max = j.at("max").get<double>();
  g.n = j.at("n").get<std::size_t>();
  g.low_n = j.at("low_n").get<bool>();
  return g;
}

}  // namespace

json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    invalid("non-numeric value '" + s + "'");
  }
  return j.get<double>();
}

ModelArtifact run_pipeline(const ParseResult& input, const PipelineConfig& config,
                           std::string input_sha256) {
  ModelArtifact a;
  a.provenance.input_sha256 = std::move(input_sha256);
  a.provenance.input_rows = input.profiles.size() + input.rejected.size();
  a.provenance.rejected_rows = input.rejected.size();
  a.provenance.seed = config.seed;
  a.provenance.resolution = config.resolution;
  a.provenance.created = build_timestamp();

  const auto& profiles = input.profiles;
  stage("ingest", [&] {
    if (config.strict && !input.rejected.empty()) {
      const auto& r = input.rejected.front();
      throw Error(r.reason, fmt::format("{} rejected rows; first: {}", input.rejected.size(), r.message));
    }
    validate_population(profiles);
    if (profiles.empty()) throw Error(ErrorCode::EmptyPopulation, "no valid worker rows");
  });
  a.lexicon = input.lexicon;
  a.graph = stage("graph", [&] { return build_skill_graph(profiles, a.lexicon); });
  a.partition = stage("cluster", [&] {
    LouvainOptions opts;
    opts.resolution = config.resolution;
    opts.seed = config.seed;
    auto part = louvain(a.graph, opts);
    label_domains(part, a.graph, a.lexicon, config.top_k, config.label_overrides);
    return part;
  });

  stage("fit", [&] {
    FeatureSpec spec = config.spec;
    if (!config.targets_explicit) {
      std::vector<std::string> present;
      for (const auto& s : spec.target_skills) {
        if (a.lexicon.contains(normalize_skill(s))) present.push_back(normalize_skill(s));
      }
      spec.target_skills = std::move(present);
    } else {
      for (auto& s : spec.target_skills) s = normalize_skill(s);
    }
    const auto design = build_design_matrix(profiles, a.partition, a.graph, spec);
    spec.country_baseline = design.country_baseline;
    spec.diversity_baseline = design.diversity_baseline;
    spec.domain_baseline = design.domain_baseline;
    a.spec = spec;
    a.collinearity = detect_collinearity(design, config.vif_threshold);
    a.fit = fit_ols(design);
  });
  a.grid = stage("grid", [&] {
    return build_grid(profiles, a.partition, a.graph, a.spec, a.fit, config.min_subset_size);
  });
  stage("describe", [&] {
    a.quartiles = wage_quartiles(profiles, a.partition, a.graph, WageGrouping::Domain,
                                 config.min_group_size, a.spec.diversity_cap);
    a.diversity_quartiles = wage_quartiles(profiles, a.partition, a.graph, WageGrouping::DomainDiversity,
                                           config.min_group_size, a.spec.diversity_cap);
  });
  a.fit.residuals.resize(0);
  check_consistency(a);
  return a;
}

ModelArtifact run_pipeline_file(const std::string& profiles_path, const PipelineConfig& config) {
  std::ifstream in(profiles_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("ingest: cannot open '{}'", profiles_path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  std::istringstream stream(bytes);
  auto parsed = stage("ingest", [&] { return parse_profiles(stream, config.schema); });
  return run_pipeline(parsed, config, sha256_hex(bytes));
}

json fit_to_json(const FitResult& fit) {
  json coefs = json::array();
  for (const auto& c : fit.coefficients) {
    coefs.push_back({{"name", c.name},
                     {"kind", to_string(c.kind)},
                     {"level", c.level},
                     {"beta", json_number(c.beta)},
                     {"se", json_number(c.se)},
                     {"t", json_number(c.t)},
                     {"p", json_number(c.p)},
                     {"stars", c.stars}});
  }
  return {{"coefficients", coefs},
          {"n", fit.n},
          {"r2", json_number(fit.r2)},
          {"adj_r2", json_number(fit.adj_r2)},
          {"sigma", json_number(fit.sigma)},
          {"rss", json_number(fit.rss)},
          {"tss", json_number(fit.tss)},
          {"f_stat", json_number(fit.f_stat)},
          {"f_p", json_number(fit.f_p)},
          {"df1", fit.df1},
          {"df2", fit.df2}};
}

namespace {

FitResult fit_from_json(const json& j) {
  FitResult fit;
  for (const auto& c : j.at("coefficients")) {
    fit.coefficients.push_back({c.at("name").get<std::string>(),
                                column_kind_from(c.at("kind").get<std::string>()),
                                c.at("level").get<std::string>(), number_from_json(c.at("beta")),
                                number_from_json(c.at("se")), number_from_json(c.at("t")),
                                number_from_json(c.at("p")), c.at("stars").get<std::string>()});
  }
  fit.n = j.at("n").get<std::size_t>();
  fit.r2 = number_from_json(j.at("r2"));
  fit.adj_r2 = number_from_json(j.at("adj_r2"));
  fit.sigma = number_from_json(j.at("sigma"));
  fit.rss = number_from_json(j.at("rss"));
  fit.tss = number_from_json(j.at("tss"));
  fit.f_stat = number_from_json(j.at("f_stat"));
  fit.f_p = number_from_json(j.at("f_p"));
  fit.df1 = j.at("df1").get<std::size_t>();
  fit.df2 = j.at("df2").get<std::size_t>();
  return fit;
}

}  // namespace

json grid_to_json(const ComplementarityGrid& grid, const SkillLexicon& lexicon) {
  json skills = json::array();
  for (const auto& k : grid.skills) {
    skills.push_back({{"key", k}, {"display", lexicon.contains(k) ? lexicon.display(k) : k}});
  }
  json domains = json::array();
  for (const auto& d : grid.domains) {
    domains.push_back({{"id", d.id},
                       {"label", d.label},
                       {"n", d.n},
                       {"median_wage", json_number(d.median_wage)},
                       {"excluded_reason", d.excluded_reason}});
  }
  json cells = json::array();
  for (std::size_t s = 0; s < grid.skills.size(); ++s) {
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      auto c = cell_to_json(grid.cells[d][s]);
      c["skill"] = grid.skills[s];
      c["domain"] = std::to_string(grid.domains[d].id);
      cells.push_back(std::move(c));
    }
    auto c = cell_to_json(grid.all[s]);
    c["skill"] = grid.skills[s];
    c["domain"] = "ALL";
    cells.push_back(std::move(c));
  }
  return {{"skills", skills},
          {"domains", domains},
          {"cells", cells},
          {"min_subset_size", grid.min_subset_size},
          {"full_median_wage", json_number(grid.full_median_wage)},
          {"caveat", kCausalCaveat}};
}

namespace {

ComplementarityGrid grid_from_json(const json& j) {
  ComplementarityGrid g;
  for (const auto& s : j.at("skills")) g.skills.push_back(s.at("key").get<std::string>());
  for (const auto& d : j.at("domains")) {
    g.domains.push_back({d.at("id").get<DomainId>(), d.at("label").get<std::string>(),
                         d.at("n").get<std::size_t>(), number_from_json(d.at("median_wage")),
                         d.at("excluded_reason").get<std::string>()});
  }
  g.min_subset_size = j.at("min_subset_size").get<std::size_t>();
  g.full_median_wage = number_from_json(j.at("full_median_wage"));
  g.cells.assign(g.domains.size(), std::vector<GridCell>(g.skills.size()));
  g.all.assign(g.skills.size(), GridCell{});
  std::vector<std::vector<bool>> seen(g.domains.size() + 1, std::vector<bool>(g.skills.size(), false));
  for (const auto& c : j.at("cells")) {
    const auto skill = g.skill_index(c.at("skill").get<std::string>());
    if (!skill) invalid("grid cell references an unknown skill");
    const auto dom = c.at("domain").get<std::string>();
    std::size_t slot = g.domains.size();
    if (dom != "ALL") {
      auto d = g.domain_index(static_cast<DomainId>(std::stoul(dom)));
      if (!d) invalid("grid cell references an unknown domain");
      slot = *d;
      g.cells[slot][*skill] = cell_from_json(c);
    } else {
      g.all[*skill] = cell_from_json(c);
    }
    seen[slot][*skill] = true;
  }
  for (const auto& row : seen) {
    for (bool b : row) {
      if (!b) invalid("grid is missing cells");
    }
  }
  return g;
}

}  // namespace

json to_json(const ModelArtifact& a) {
  json j;
  j["format_version"] = kArtifactFormatVersion;

  json lex = json::array();
  for (std::uint32_t i = 0; i < a.lexicon.size(); ++i) {
    lex.push_back({a.lexicon.key(i), a.lexicon.display(i)});
  }
  j["lexicon"] = lex;

  json edges = json::array();
  for (std::uint32_t u = 0; u < a.graph.node_count(); ++u) {
    for (const auto& nb : a.graph.neighbors(u)) {
      if (nb.node > u) edges.push_back({u, nb.node, nb.weight});
    }
  }
  j["edges"] = edges;

  json top = json::array();
  for (const auto& list : a.partition.top_skills) {
    json t = json::array();
    for (const auto& r : list) t.push_back({r.key, r.degree});
    top.push_back(t);
  }
  j["partition"] = {{"assignment", a.partition.assignment},
                    {"labels", a.partition.labels},
                    {"top_skills", top},
                    {"modularity", a.partition.modularity_score},
                    {"resolution", a.partition.resolution},
                    {"seed", a.partition.seed},
                    {"pass_objective", a.partition.pass_objective}};

  const auto& s = a.spec;
  j["feature_spec"] = {
      {"target_skills", s.target_skills},
      {"country_baseline", s.country_baseline ? json(*s.country_baseline) : json(nullptr)},
      {"diversity_baseline", s.diversity_baseline ? json(*s.diversity_baseline) : json(nullptr)},
      {"domain_baseline", s.domain_baseline ? json(*s.domain_baseline) : json(nullptr)},
      {"log_offset", s.log_offset},
      {"diversity_cap", s.diversity_cap},
      {"log_wage", s.log_wage}};

  j["fit"] = fit_to_json(a.fit);

  json vif = json::array();
  for (const auto& v : a.collinearity.vif) {
    vif.push_back({{"column", v.column}, {"vif", json_number(v.vif)}, {"flagged", v.flagged}});
  }
  json aliased = json::array();
  for (const auto& al : a.collinearity.aliased) {
    aliased.push_back({{"column", al.column}, {"depends_on", al.depends_on}});
  }
  j["collinearity"] = {{"vif", vif},
                       {"aliased", aliased},
                       {"rank", a.collinearity.rank},
                       {"threshold", a.collinearity.threshold}};

  j["grid"] = grid_to_json(a.grid, a.lexicon);

  json q = json::array(), dq = json::array();
  for (const auto& g : a.quartiles) q.push_back(group_to_json(g));
  for (const auto& g : a.diversity_quartiles) dq.push_back(group_to_json(g));
  j["quartiles"] = q;
  j["diversity_quartiles"] = dq;

  const auto& p = a.provenance;
  j["provenance"] = {{"input_sha256", p.input_sha256},
                     {"input_rows", p.input_rows},
                     {"rejected_rows", p.rejected_rows},
                     {"seed", p.seed},
                     {"resolution", p.resolution},
                     {"created", p.created ? json(*p.created) : json(nullptr)},
                     {"tool_version", p.tool_version}};
  return j;
}

ModelArtifact artifact_from_json(const json& j) {
  ModelArtifact a;
  try {
    if (j.at("format_version").get<int>() != kArtifactFormatVersion) {
      invalid(fmt::format("unsupported format_version {}", j.at("format_version").dump()));
    }
    std::map<std::string, std::string> entries;
    std::vector<std::string> keys;
    for (const auto& e : j.at("lexicon")) {
      keys.push_back(e.at(0).get<std::string>());
      entries[keys.back()] = e.at(1).get<std::string>();
    }
    if (entries.size() != keys.size()) invalid("duplicate lexicon keys");
    a.lexicon = SkillLexicon::from_entries(std::move(entries));
    if (a.lexicon.keys() != keys) invalid("lexicon keys are not sorted");

    std::vector<std::vector<Neighbor>> adjacency(keys.size());
    for (const auto& e : j.at("edges")) {
      const auto u = e.at(0).get<std::uint32_t>(), v = e.at(1).get<std::uint32_t>();
      const auto w = e.at(2).get<std::uint64_t>();
      if (u >= v || v >= keys.size()) invalid("edge out of range or unordered");
      adjacency[u].push_back({v, w});
      adjacency[v].push_back({u, w});
    }
    a.graph = SkillGraph(keys, std::move(adjacency));

    const auto& jp = j.at("partition");
    a.partition.keys = keys;
    a.partition.assignment = jp.at("assignment").get<std::vector<DomainId>>();
    a.partition.labels = jp.at("labels").get<std::vector<std::string>>();
    for (const auto& list : jp.at("top_skills")) {
      std::vector<RankedSkill> t;
      for (const auto& r : list) t.push_back({r.at(0).get<std::string>(), r.at(1).get<std::size_t>()});
      a.partition.top_skills.push_back(std::move(t));
    }
    a.partition.modularity_score = jp.at("modularity").get<double>();
    a.partition.resolution = jp.at("resolution").get<double>();
    a.partition.seed = jp.at("seed").get<std::uint64_t>();
    a.partition.pass_objective = jp.at("pass_objective").get<std::vector<double>>();

    const auto& js = j.at("feature_spec");
    a.spec.target_skills = js.at("target_skills").get<std::vector<std::string>>();
    if (!js.at("country_baseline").is_null()) a.spec.country_baseline = js.at("country_baseline").get<std::string>();
    if (!js.at("diversity_baseline").is_null()) a.spec.diversity_baseline = js.at("diversity_baseline").get<int>();
    if (!js.at("domain_baseline").is_null()) a.spec.domain_baseline = js.at("domain_baseline").get<DomainId>();
    a.spec.log_offset = js.at("log_offset").get<double>();
    a.spec.diversity_cap = js.at("diversity_cap").get<int>();
    a.spec.log_wage = js.at("log_wage").get<bool>();

    a.fit = fit_from_json(j.at("fit"));

    const auto& jc = j.at("collinearity");
    for (const auto& v : jc.at("vif")) {
      a.collinearity.vif.push_back({v.at("column").get<std::string>(), number_from_json(v.at("vif")),
                                    v.at("flagged").get<bool>()});
    }
    for (const auto& al : jc.at("aliased")) {
      a.collinearity.aliased.push_back({al.at("column").get<std::string>(),
                                        al.at("depends_on").get<std::vector<std::string>>()});
    }
    a.collinearity.rank = jc.at("rank").get<Eigen::Index>();
    a.collinearity.threshold = jc.at("threshold").get<double>();

    a.grid = grid_from_json(j.at("grid"));
    for (const auto& g : j.at("quartiles")) a.quartiles.push_back(group_from_json(g));
    for (const auto& g : j.at("diversity_quartiles")) a.diversity_quartiles.push_back(group_from_json(g));

    const auto& jv = j.at("provenance");
    a.provenance.input_sha256 = jv.at("input_sha256").get<std::string>();
    a.provenance.input_rows = jv.at("input_rows").get<std::size_t>();
    a.provenance.rejected_rows = jv.at("rejected_rows").get<std::size_t>();
    a.provenance.seed = jv.at("seed").get<std::uint64_t>();
    a.provenance.resolution = jv.at("resolution").get<double>();
    if (!jv.at("created").is_null()) a.provenance.created = jv.at("created").get<std::string>();
    a.provenance.tool_version = jv.at("tool_version").get<std::string>();
  } catch (const json::exception& e) {
    invalid(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArtifact) throw;
    invalid(e.what());
  } catch (const std::logic_error& e) {
    invalid(e.what());
  }
  check_consistency(a);
  return a;
}

void check_consistency(const ModelArtifact& a) {
  const auto n = a.lexicon.size();
  if (a.graph.node_count() != n || a.graph.keys() != a.lexicon.keys()) invalid("graph does not match lexicon");
  const auto& part = a.partition;
  if (part.keys != a.lexicon.keys() || part.assignment.size() != n) {
    invalid("partition does not cover the lexicon");
  }
  std::vector<bool> used(part.labels.size(), false);
  for (auto d : part.assignment) {
    if (d >= part.labels.size()) invalid("partition references an unlabelled domain");
    used[d] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) invalid("partition has empty domains");
  if (part.top_skills.size() != part.labels.size()) invalid("top-skill lists do not match domains");
  if (a.graph.total_edge_weight() > 0) {
    const double q = modularity(a.graph, part.assignment, 1.0);
    if (std::abs(q - part.modularity_score) > 1e-9) {
      invalid(fmt::format("stored modularity {} differs from recomputed {}", part.modularity_score, q));
    }
  }
  if (a.grid.skills != a.spec.target_skills) invalid("grid skills differ from the feature spec");
  if (a.grid.all.size() != a.grid.skills.size() || a.grid.cells.size() != a.grid.domains.size()) {
    invalid("grid shape is inconsistent");
  }
  for (std::size_t s = 0; s < a.grid.skills.size(); ++s) {
    const auto* c = a.fit.find_skill(a.grid.skills[s]);
    const auto& cell = a.grid.all[s];
    if (!c || cell.beta != c->beta || cell.se != c->se || cell.p != c->p || cell.stars != c->stars ||
        cell.n != a.fit.n) {
      invalid(fmt::format("ALL column for '{}' does not match the full-sample fit", a.grid.skills[s]));
    }
  }
  for (const auto& d : a.grid.domains) {
    if (d.id >= part.labels.size()) invalid("grid references an unknown domain");
  }
}

std::string dump_artifact(const ModelArtifact& artifact) {
  json payload = to_json(artifact);
  const std::string body = payload.dump();
  payload["checksum"] = sha256_hex(body);
  return payload.dump() + "\n";
}

void save_artifact(const ModelArtifact& artifact, const std::string& path) {
  const auto text = dump_artifact(artifact);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw Error(ErrorCode::Io, fmt::format("failed writing '{}'", path));
}

ModelArtifact parse_artifact(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  if (!j.is_object() || !j.contains("checksum") || !j["checksum"].is_string()) invalid("missing checksum");
  const auto checksum = j["checksum"].get<std::string>();
  j.erase("checksum");
  if (sha256_hex(j.dump()) != checksum) invalid("checksum mismatch (file was modified)");
  return artifact_from_json(j);
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open artifact '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_artifact(buffer.str());
}

}  // namespace skillcompass
