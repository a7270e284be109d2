#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skillcompass/artifact.hpp"
#include "skillcompass/report.hpp"
#include "skillcompass/service.hpp"
#include "skillcompass/synth.hpp"

namespace py = pybind11;
using namespace skillcompass;

namespace {

using Edge = std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>;

SkillGraph graph_from_edges(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(fmt::format("n{:08}", i));
  std::vector<std::vector<Neighbor>> adj(n);
  for (auto [a, b, w] : edges) {
    if (a >= n || b >= n) throw Error(ErrorCode::InvalidConfig, "edge endpoint out of range");
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  }
  return SkillGraph(std::move(keys), std::move(adj));
}

std::string rejected_json(const std::vector<RejectedRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"row", r.row}, {"reason", to_string(r.reason)}, {"field", r.field}, {"message", r.message}});
  }
  return j.dump();
}

class Model {
 public:
  explicit Model(ModelArtifact a)
      : artifact_(std::make_shared<const ModelArtifact>(std::move(a))), service_(artifact_) {}

  std::string query(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& params, const std::string& body) const {
    const auto res = service_.handle({method, path, params, body});
    if (res.status != 200) {
      auto j = nlohmann::json::parse(res.body);
      throw py::value_error(j.value("error", "Error") + ": " + j.value("message", ""));
    }
    return res.body;
  }

  std::string artifact_text() const { return dump_artifact(*artifact_); }
  std::string report(const std::string& section, bool full) const {
    const auto& a = *artifact_;
    if (section == "centrality") return render_centrality_table(a.partition, a.lexicon);
    if (section == "regression") {
      RegressionTableOptions o;
      o.full = full;
      return render_regression_table(a.fit, a.spec, a.partition, a.lexicon, o);
    }
    if (section == "grid") return render_grid(a.grid, a.lexicon);
    if (section == "vif") return render_collinearity(a.collinearity);
    throw py::value_error("unknown section " + section);
  }
  std::string fit_json() const { return fit_to_json(artifact_->fit).dump(); }
  double modularity_score() const { return artifact_->partition.modularity_score; }
  std::size_t domain_count() const { return artifact_->partition.domain_count(); }

 private:
  std::shared_ptr<const ModelArtifact> artifact_;
  QueryService service_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Skill domains and wage complementarity (native core)";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "SkillCompassError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("normalize_skill", &normalize_skill, py::arg("raw"));

  m.def(
      "parse_profiles",
      [](const std::string& text) {
        std::istringstream in(text);
        auto parsed = parse_profiles(in);
        py::list profiles;
        for (const auto& p : parsed.profiles) {
          py::dict d;
          d["worker_id"] = p.worker_id;
          d["country"] = p.country;
          d["wage"] = p.wage;
          d["earned"] = p.earned;
          d["skills"] = p.skills;
          profiles.append(d);
        }
        return py::make_tuple(profiles, rejected_json(parsed.rejected));
      },
      py::arg("text"), "Parse profile CSV text; returns (profiles, rejected rows as JSON).");

  m.def(
      "fit_ols",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
        if (names.empty()) {
          for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back(fmt::format("x{}", j));
        }
        if (names.size() != static_cast<std::size_t>(x.cols())) throw py::value_error("one name per column");
        std::vector<DesignColumn> cols;
        for (std::size_t j = 0; j < names.size(); ++j) {
          cols.push_back({names[j], j == 0 ? ColumnKind::Intercept : ColumnKind::Other, names[j]});
        }
        const auto fit = fit_ols(x, y, cols);
        auto j = fit_to_json(fit);
        return py::make_tuple(j.dump(), fit.residuals);
      },
      py::arg("x"), py::arg("y"), py::arg("names") = std::vector<std::string>{},
      "OLS with inference; first column is treated as the intercept.");

  m.def(
      "modularity",
      [](std::size_t n, const std::vector<Edge>& edges, const std::vector<DomainId>& assignment,
         double resolution) { return modularity(graph_from_edges(n, edges), assignment, resolution); },
      py::arg("n"), py::arg("edges"), py::arg("assignment"), py::arg("resolution") = 1.0);

  m.def(
      "louvain",
      [](std::size_t n, const std::vector<Edge>& edges, double resolution, std::uint64_t seed) {
        LouvainOptions o;
        o.resolution = resolution;
        o.seed = seed;
        auto part = louvain(graph_from_edges(n, edges), o);
        return py::make_tuple(part.assignment, part.modularity_score, part.pass_objective);
      },
      py::arg("n"), py::arg("edges"), py::arg("resolution") = 1.0, py::arg("seed") = 42);

  m.def(
      "simulate",
      [](const std::string& config_json) {
        SynthConfig c = config_json.empty() ? SynthConfig::defaults()
                                            : synth_config_from_json(nlohmann::json::parse(config_json));
        const auto pop = generate_population(c);
        std::vector<WorkerProfile> shown = pop.profiles;
        for (auto& w : shown) {
          for (auto& s : w.skills) s = pop.lexicon.display(s);
        }
        return py::make_tuple(serialize_profiles(shown), to_json(pop.truth).dump());
      },
      py::arg("config_json") = "", "Synthetic population; returns (profiles CSV, truth JSON).");

  py::class_<Model>(m, "Model")
      .def_static(
          "from_profiles",
          [](const std::string& path, std::uint64_t seed, double resolution, std::size_t min_subset) {
            PipelineConfig c;
            c.seed = seed;
            c.resolution = resolution;
            c.min_subset_size = min_subset;
            return Model(run_pipeline_file(path, c));
          },
          py::arg("path"), py::arg("seed") = 42, py::arg("resolution") = 1.0, py::arg("min_subset") = 100)
      .def_static("load", [](const std::string& path) { return Model(load_artifact(path)); }, py::arg("path"))
      .def_static("loads", [](const std::string& text) { return Model(parse_artifact(text)); }, py::arg("text"))
      .def("dumps", &Model::artifact_text)
      .def("query", &Model::query, py::arg("method"), py::arg("path"),
           py::arg("params") = std::map<std::string, std::string>{}, py::arg("body") = "")
      .def("report", &Model::report, py::arg("section"), py::arg("full") = false)
      .def("fit_json", &Model::fit_json)
      .def_property_readonly("modularity", &Model::modularity_score)
      .def_property_readonly("domain_count", &Model::domain_count);
}
