#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "skillcompass/artifact.hpp"
#include "skillcompass/report.hpp"
#include "skillcompass/service.hpp"
#include "skillcompass/synth.hpp"

namespace fs = std::filesystem;
using namespace skillcompass;

namespace {

struct ModelFlags {
  std::string profiles;
  double resolution = 1.0;
  std::uint64_t seed = 42;
  std::string labels;
  std::size_t top_k = 5;
  std::vector<std::string> targets;
  std::string country_baseline;
  int diversity_baseline = 0;
  int domain_baseline = -1;
  bool log_wage = false;
  std::size_t min_subset = 100;
  std::size_t min_group = 30;
  double vif_threshold = 10.0;
  bool strict = false;
  std::string delimiter = ",";
  std::string skill_separator = "|";
};

void add_input_flags(CLI::App* cmd, ModelFlags& f, bool required = true) {
  auto* opt = cmd->add_option("--profiles", f.profiles, "Worker profile CSV");
  if (required) opt->required();
  cmd->add_option("--delimiter", f.delimiter, "Column delimiter")->capture_default_str();
  cmd->add_option("--skill-separator", f.skill_separator, "Separator inside the skills cell")->capture_default_str();
  cmd->add_flag("--strict", f.strict, "Fail when any input row is rejected");
}

void add_cluster_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--resolution", f.resolution, "Louvain resolution")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Louvain visit-order seed")->capture_default_str();
  cmd->add_option("--labels", f.labels, "Domain label overrides (id<TAB>label)");
  cmd->add_option("--top-k", f.top_k, "Top skills kept per domain")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_fit_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--targets", f.targets, "Target skills (default: programming languages present)")->delimiter('|');
  cmd->add_option("--country-baseline", f.country_baseline, "Reference country");
  cmd->add_option("--diversity-baseline", f.diversity_baseline, "Reference diversity level");
  cmd->add_option("--domain-baseline", f.domain_baseline, "Reference domain id");
  cmd->add_flag("--log-wage", f.log_wage, "Regress log(wage)");
  cmd->add_option("--min-subset", f.min_subset, "Minimum workers per domain subset")->capture_default_str();
  cmd->add_option("--min-group", f.min_group, "Quartile groups below this size are flagged")->capture_default_str();
  cmd->add_option("--vif-threshold", f.vif_threshold, "VIF flag threshold")->capture_default_str();
}

ProfileSchema schema_of(const ModelFlags& f) {
  if (f.delimiter.size() != 1 || f.skill_separator.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "delimiters must be single characters");
  }
  ProfileSchema s;
  s.delimiter = f.delimiter[0];
  s.skill_separator = f.skill_separator[0];
  return s;
}

PipelineConfig config_of(const ModelFlags& f) {
  PipelineConfig c;
  c.schema = schema_of(f);
  c.resolution = f.resolution;
  c.seed = f.seed;
  c.top_k = f.top_k;
  if (!f.labels.empty()) c.label_overrides = read_label_overrides_file(f.labels);
  if (!f.targets.empty()) {
    c.spec.target_skills = f.targets;
    c.targets_explicit = true;
  }
  if (!f.country_baseline.empty()) c.spec.country_baseline = f.country_baseline;
  if (f.diversity_baseline > 0) c.spec.diversity_baseline = f.diversity_baseline;
  if (f.domain_baseline >= 0) c.spec.domain_baseline = static_cast<DomainId>(f.domain_baseline);
  c.spec.log_wage = f.log_wage;
  c.min_subset_size = f.min_subset;
  c.min_group_size = f.min_group;
  c.vif_threshold = f.vif_threshold;
  c.strict = f.strict;
  return c;
}

std::shared_ptr<const ModelArtifact> model_from(const std::string& artifact, const ModelFlags& f) {
  if (!artifact.empty()) return std::make_shared<ModelArtifact>(load_artifact(artifact));
  if (f.profiles.empty()) throw Error(ErrorCode::InvalidConfig, "either --artifact or --profiles is required");
  return std::make_shared<ModelArtifact>(run_pipeline_file(f.profiles, config_of(f)));
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
}

std::string to_text(void (*writer)(std::ostream&, const ComplementarityGrid&), const ComplementarityGrid& g) {
  std::ostringstream s;
  writer(s, g);
  return s.str();
}

void print_rejections(const ParseResult& parsed) {
  for (const auto& r : parsed.rejected) {
    std::cerr << fmt::format("row {}: {} [{}] {}\n", r.row, to_string(r.reason), r.field, r.message);
  }
}

std::string report_section(const ModelArtifact& a, const std::string& section, bool full) {
  RegressionTableOptions opts;
  opts.full = full;
  if (a.spec.log_wage) opts.dependent = "log asking wage";
  if (section == "centrality") return render_centrality_table(a.partition, a.lexicon);
  if (section == "regression") return render_regression_table(a.fit, a.spec, a.partition, a.lexicon, opts);
  if (section == "vif") return render_collinearity(a.collinearity);
  if (section == "grid") return render_grid(a.grid, a.lexicon);
  if (section == "quartiles") return render_quartiles(a.quartiles, a.partition, a.spec.diversity_cap);
  if (section == "diversity") return render_quartiles(a.diversity_quartiles, a.partition, a.spec.diversity_cap);
  throw Error(ErrorCode::InvalidConfig, "unknown report section '" + section + "'");
}

const std::vector<std::string> kSections = {"centrality", "regression", "vif", "grid", "quartiles", "diversity"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill co-occurrence domains and wage complementarity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ModelFlags f;
  std::string artifact_path, out_path, bundle, candidate;
  bool as_json = false, full = false;

  auto* ingest = app.add_subcommand("ingest", "Parse and validate profiles");
  add_input_flags(ingest, f);
  ingest->add_option("--out", out_path, "Write the accepted rows as canonical CSV");
  ingest->add_flag("--json", as_json, "Summary as JSON");

  std::size_t top = 0;
  auto* graph = app.add_subcommand("graph", "Build the skill co-occurrence graph");
  add_input_flags(graph, f);
  graph->add_option("--out", out_path, "Edge list path (default stdout)");
  graph->add_option("--top", top, "Print the N highest-degree skills instead of edges");

  auto* cluster = app.add_subcommand("cluster", "Partition skills into domains");
  add_input_flags(cluster, f);
  add_cluster_flags(cluster, f);
  cluster->add_option("--out", out_path, "Write the partition (key<TAB>id<TAB>label)");

  bool tsv = false, vif = false;
  auto* fit = app.add_subcommand("fit", "Full-sample wage regression");
  add_input_flags(fit, f, false);
  add_cluster_flags(fit, f);
  add_fit_flags(fit, f);
  fit->add_option("--artifact", artifact_path, "Read a saved model instead of profiles");
  fit->add_flag("--full", full, "Show country dummies");
  fit->add_flag("--json", as_json, "Machine-readable output");
  fit->add_flag("--tsv", tsv, "Coefficient table as TSV");
  fit->add_flag("--vif", vif, "Append collinearity diagnostics");

  auto* grid = app.add_subcommand("grid", "Skill x domain complementarity grid");
  add_input_flags(grid, f, false);
  add_cluster_flags(grid, f);
  add_fit_flags(grid, f);
  grid->add_option("--artifact", artifact_path, "Read a saved model instead of profiles");
  grid->add_option("--tsv", out_path, "Write the grid export table");
  grid->add_flag("--json", as_json, "Grid as JSON");

  auto* whatif = app.add_subcommand("whatif", "Value of adding one skill to a bundle");
  whatif->add_option("--artifact", artifact_path, "Model artifact")->required();
  whatif->add_option("--bundle", bundle, "Held skills separated by '|'")->required();
  whatif->add_option("--candidate", candidate, "Skill to add")->required();
  whatif->add_flag("--json", as_json, "JSON output (same as the service)");

  std::size_t top_n = 10;
  double alpha = 0.05;
  auto* rec = app.add_subcommand("recommend", "Rank candidate skills for a bundle");
  rec->add_option("--artifact", artifact_path, "Model artifact")->required();
  rec->add_option("--bundle", bundle, "Held skills separated by '|'")->required();
  rec->add_option("--top-n", top_n, "Maximum recommendations")->capture_default_str();
  rec->add_option("--alpha", alpha, "Significance filter")->capture_default_str();
  rec->add_flag("--json", as_json, "JSON output (same as the service)");

  std::string out_dir = ".", config_path;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::size_t> sim_workers;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic population with planted truth");
  simulate->add_option("--out-dir", out_dir, "Directory for profiles.csv and truth.json")->capture_default_str();
  simulate->add_option("--config", config_path, "Generator config (JSON)");
  simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--workers", sim_workers, "Override the worker count");

  std::string reports_dir;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write the model artifact");
  add_input_flags(pipeline, f);
  add_cluster_flags(pipeline, f);
  add_fit_flags(pipeline, f);
  pipeline->add_option("--out", out_path, "Artifact path")->required();
  pipeline->add_option("--reports", reports_dir, "Directory for the text reports");
  pipeline->add_flag("--full", full, "Show country dummies in the regression report");

  std::string bind;
  auto* serve = app.add_subcommand("serve", "Serve read-only queries over a model artifact");
  serve->add_option("--artifact", artifact_path, "Model artifact")->required();
  serve->add_option("--bind", bind, fmt::format("host:port (default ${} or {})", kBindEnv, kDefaultBind));

  std::string section = "all";
  auto* report = app.add_subcommand("report", "Render reports from a model artifact");
  report->add_option("--artifact", artifact_path, "Model artifact")->required();
  report->add_option("--section", section, "all, centrality, regression, vif, grid, quartiles, diversity")
      ->capture_default_str();
  report->add_flag("--full", full, "Show country dummies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ingest->parsed()) {
      auto parsed = parse_profiles_file(f.profiles, schema_of(f));
      const auto summary = validate_population(parsed.profiles);
      print_rejections(parsed);
      if (!out_path.empty()) write_file(out_path, serialize_profiles(parsed.profiles));
      if (as_json) {
        nlohmann::json j = {{"workers", summary.workers},   {"skills", summary.distinct_skills},
                            {"wage_min", summary.wage_min}, {"wage_max", summary.wage_max},
                            {"earned_min", summary.earned_min}, {"earned_max", summary.earned_max},
                            {"rejected", parsed.rejected.size()}};
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << format_summary(summary) << "\n";
        if (!parsed.rejected.empty()) std::cout << parsed.rejected.size() << " rows rejected\n";
      }
      return f.strict && !parsed.rejected.empty() ? 2 : 0;
    }

    if (graph->parsed() || cluster->parsed()) {
      auto parsed = parse_profiles_file(f.profiles, schema_of(f));
      print_rejections(parsed);
      if (f.strict && !parsed.rejected.empty()) return 2;
      validate_population(parsed.profiles);
      const auto g = build_skill_graph(parsed.profiles, parsed.lexicon);
      if (graph->parsed()) {
        std::ostringstream text;
        if (top > 0) {
          for (const auto& r : top_k_by_degree(g, g.keys(), top)) {
            text << parsed.lexicon.display(r.key) << '\t' << r.degree << '\n';
          }
        } else {
          write_edge_list(text, g);
        }
        if (out_path.empty()) {
          std::cout << text.str();
        } else {
          write_file(out_path, text.str());
          std::cerr << fmt::format("{} nodes, {} edges, total weight {}\n", g.node_count(), g.edge_count(),
                                   g.total_edge_weight());
        }
        return 0;
      }
      LouvainOptions opts;
      opts.resolution = f.resolution;
      opts.seed = f.seed;
      auto part = louvain(g, opts);
      label_domains(part, g, parsed.lexicon, f.top_k,
                    f.labels.empty() ? std::map<DomainId, std::string>{} : read_label_overrides_file(f.labels));
      if (!out_path.empty()) {
        std::ostringstream s;
        write_partition(s, part);
        write_file(out_path, s.str());
      }
      std::cout << render_centrality_table(part, parsed.lexicon);
      return 0;
    }

    if (fit->parsed()) {
      const auto a = model_from(artifact_path, f);
      if (as_json) {
        auto j = fit_to_json(a->fit);
        if (vif) {
          j["vif"] = nlohmann::json::array();
          for (const auto& v : a->collinearity.vif) {
            j["vif"].push_back({{"column", v.column}, {"vif", json_number(v.vif)}, {"flagged", v.flagged}});
          }
        }
        std::cout << j.dump(2) << "\n";
      } else if (tsv) {
        write_coefficients_tsv(std::cout, a->fit);
      } else {
        std::cout << report_section(*a, "regression", full);
        if (vif) std::cout << "\n" << render_collinearity(a->collinearity);
      }
      return 0;
    }

    if (grid->parsed()) {
      const auto a = model_from(artifact_path, f);
      if (!out_path.empty()) write_file(out_path, to_text(write_grid_tsv, a->grid));
      if (as_json) {
        std::cout << grid_to_json(a->grid, a->lexicon).dump(2) << "\n";
      } else {
        std::cout << render_grid(a->grid, a->lexicon);
      }
      return 0;
    }

    if (whatif->parsed() || rec->parsed()) {
      auto a = std::make_shared<const ModelArtifact>(load_artifact(artifact_path));
      QueryService service(a);
      Request r;
      r.path = whatif->parsed() ? "/whatif" : "/recommend";
      r.params["bundle"] = bundle;
      if (whatif->parsed()) {
        r.params["candidate"] = candidate;
      } else {
        r.params["top_n"] = std::to_string(top_n);
        r.params["alpha"] = fmt::format("{}", alpha);
      }
      const auto res = service.handle(r);
      const auto body = nlohmann::json::parse(res.body);
      if (res.status != 200) {
        std::cerr << "error: " << body.value("message", res.body) << "\n";
        return res.status == 400 ? 2 : 3;
      }
      if (as_json) {
        std::cout << body.dump(2) << "\n";
        return 0;
      }
      std::vector<std::string> held;
      std::istringstream parts(bundle);
      for (std::string s; std::getline(parts, s, '|');) held.push_back(s);
      if (whatif->parsed()) {
        std::cout << render_whatif(what_if(held, candidate, a->grid, a->partition, a->graph), a->lexicon);
      } else {
        std::cout << render_recommendations(recommend(held, a->grid, a->partition, a->graph, top_n, alpha),
                                            a->lexicon);
      }
      return 0;
    }

    if (simulate->parsed()) {
      SynthConfig config = SynthConfig::defaults();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", config_path));
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::InvalidConfig, std::string("config is not JSON: ") + e.what());
        }
        config = synth_config_from_json(j);
      }
      if (sim_seed) config.seed = *sim_seed;
      if (sim_workers) config.n_workers = *sim_workers;
      const auto pop = generate_population(config);
      fs::create_directories(out_dir);
      std::vector<WorkerProfile> display = pop.profiles;
      for (auto& w : display) {
        for (auto& s : w.skills) s = pop.lexicon.display(s);
      }
      write_file(fs::path(out_dir) / "profiles.csv", serialize_profiles(display));
      auto truth = to_json(pop.truth);
      truth["config"] = to_json(config);
      write_file(fs::path(out_dir) / "truth.json", truth.dump(2) + "\n");
      std::cout << fmt::format("{} workers, {} skills -> {}\n", group_thousands(pop.profiles.size()),
                               group_thousands(pop.lexicon.size()), out_dir);
      return 0;
    }

    if (pipeline->parsed()) {
      const auto config = config_of(f);
      std::ifstream probe(f.profiles, std::ios::binary);
      if (!probe) throw Error(ErrorCode::Io, fmt::format("ingest: cannot open '{}'", f.profiles));
      std::stringstream buffer;
      buffer << probe.rdbuf();
      std::istringstream stream(buffer.str());
      ParseResult parsed;
      try {
        parsed = parse_profiles(stream, config.schema);
      } catch (const Error& e) {
        throw Error(e.code(), std::string("ingest: ") + e.what());
      }
      print_rejections(parsed);
      const auto a = run_pipeline(parsed, config, sha256_hex(buffer.str()));
      save_artifact(a, out_path);
      if (!reports_dir.empty()) {
        fs::create_directories(reports_dir);
        for (const auto& s : kSections) write_file(fs::path(reports_dir) / (s + ".txt"), report_section(a, s, full));
        write_file(fs::path(reports_dir) / "grid.tsv", to_text(write_grid_tsv, a.grid));
      }
      std::cout << fmt::format("{} workers ({} rejected), {} skills, {} domains (Q = {:.4f}), R2 = {:.3f} -> {}\n",
                               group_thousands(a.fit.n), a.provenance.rejected_rows,
                               group_thousands(a.lexicon.size()), a.partition.domain_count(),
                               a.partition.modularity_score, a.fit.r2, out_path);
      return 0;
    }

    if (serve->parsed()) {
      auto a = std::make_shared<const ModelArtifact>(load_artifact(artifact_path));
      if (bind.empty()) {
        const char* env = std::getenv(std::string(kBindEnv).c_str());
        bind = env && *env ? env : std::string(kDefaultBind);
      }
      const auto [host, port] = parse_bind_address(bind);
      QueryService service(a);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      std::cerr << fmt::format("serving {} on http://{}:{}\n", artifact_path, host, bound);
      server.listen();
      return 0;
    }

    if (report->parsed()) {
      const auto a = load_artifact(artifact_path);
      if (section == "all") {
        for (const auto& s : kSections) std::cout << report_section(a, s, full) << "\n";
      } else {
        std::cout << report_section(a, section, full);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
