#include "skillcompass/service.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "httplib.h"

#include "skillcompass/report.hpp"

namespace skillcompass {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response client_error(int status, std::string_view error, const std::string& message) {
  return json_response(status, {{"error", error}, {"message", message}});
}

std::vector<std::string> split_bundle(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('|', start);
    if (end == std::string_view::npos) end = text.size();
    auto piece = text.substr(start, end - start);
    if (piece.find_first_not_of(" \t") != std::string_view::npos) out.emplace_back(piece);
    start = end + 1;
  }
  return out;
}

struct Query {
  std::vector<std::string> bundle;
  std::string candidate;
  std::size_t top_n = 10;
  double alpha = 0.05;
};

Query read_query(const Request& request) {
  Query q;
  if (request.method == "POST" && !request.body.empty()) {
    json j;
    try {
      j = json::parse(request.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRow, std::string("request body is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::MalformedRow, "request body must be a JSON object");
    try {
      if (j.contains("bundle")) {
        if (j["bundle"].is_string()) {
          q.bundle = split_bundle(j["bundle"].get<std::string>());
        } else {
          q.bundle = j["bundle"].get<std::vector<std::string>>();
        }
      }
      if (j.contains("candidate")) q.candidate = j["candidate"].get<std::string>();
      if (j.contains("top_n")) q.top_n = j["top_n"].get<std::size_t>();
      if (j.contains("alpha")) q.alpha = j["alpha"].get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRow, std::string("bad request field: ") + e.what());
    }
    return q;
  }
  auto param = [&](const char* name) -> const std::string* {
    auto it = request.params.find(name);
    return it == request.params.end() ? nullptr : &it->second;
  };
  if (auto* b = param("bundle")) q.bundle = split_bundle(*b);
  if (auto* c = param("candidate")) q.candidate = *c;
  if (auto* t = param("top_n")) {
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), q.top_n);
    if (ec != std::errc() || ptr != t->data() + t->size()) throw Error(ErrorCode::MalformedNumber, "top_n must be an integer");
  }
  if (auto* a = param("alpha")) {
    auto [ptr, ec] = std::from_chars(a->data(), a->data() + a->size(), q.alpha);
    if (ec != std::errc() || ptr != a->data() + a->size()) throw Error(ErrorCode::MalformedNumber, "alpha must be a number");
  }
  return q;
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const ModelArtifact> artifact) : artifact_(std::move(artifact)) {
  const auto& a = *artifact_;
  std::vector<std::uint32_t> order(a.graph.node_count());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto x, auto y) { return a.graph.degree(x) > a.graph.degree(y); });
  skills_ = json::array();
  for (auto node : order) {
    const auto d = a.partition.assignment[node];
    skills_.push_back({{"key", a.lexicon.key(node)},
                       {"display", a.lexicon.display(node)},
                       {"domain", d},
                       {"domain_label", a.partition.labels[d]},
                       {"degree", a.graph.degree(node)}});
  }

  const auto sizes = a.partition.sizes();
  domains_ = json::array();
  for (DomainId d = 0; d < a.partition.domain_count(); ++d) {
    json top = json::array();
    for (const auto& r : a.partition.top_skills[d]) {
      top.push_back({{"key", r.key}, {"display", a.lexicon.display(r.key)}, {"degree", r.degree}});
    }
    json entry = {{"id", d}, {"label", a.partition.labels[d]}, {"size", sizes[d]}, {"top_skills", top}};
    entry["quartiles"] = nullptr;
    for (const auto& g : a.quartiles) {
      if (g.domain != d) continue;
      entry["quartiles"] = {{"min", g.min}, {"q1", g.q1},   {"median", g.median}, {"q3", g.q3},
                            {"max", g.max}, {"n", g.n},     {"low_n", g.low_n}};
    }
    entry["workers"] = 0;
    entry["excluded_reason"] = "no worker has this dominant domain";
    if (auto gi = a.grid.domain_index(d)) {
      entry["workers"] = a.grid.domains[*gi].n;
      entry["excluded_reason"] = a.grid.domains[*gi].excluded_reason;
    }
    domains_.push_back(std::move(entry));
  }
  grid_ = grid_to_json(a.grid, a.lexicon);
}

json QueryService::skills(std::string_view prefix) const {
  if (prefix.empty()) return skills_;
  const auto needle = normalize_skill(prefix);
  json out = json::array();
  for (const auto& s : skills_) {
    if (s["key"].get_ref<const std::string&>().starts_with(needle)) out.push_back(s);
  }
  return out;
}

Response QueryService::handle(const Request& request) const {
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";
  try {
    if (request.path == "/skills" && get) {
      auto it = request.params.find("prefix");
      return json_response(200, skills(it == request.params.end() ? "" : it->second));
    }
    if (request.path == "/domains" && get) return json_response(200, domains_);
    if (request.path == "/grid" && get) return json_response(200, grid_);
    if (request.path == "/whatif" && (get || post)) return whatif(request);
    if (request.path == "/recommend" && (get || post)) return recommend(request);
    if (request.path == "/skills" || request.path == "/domains" || request.path == "/grid" ||
        request.path == "/whatif" || request.path == "/recommend") {
      return client_error(405, "MethodNotAllowed", request.method + " is not supported on " + request.path);
    }
    return client_error(404, "NotFound", "no endpoint " + request.path);
  } catch (const Error& e) {
    return client_error(exit_code_for(e.code()) == 2 ? 400 : 422, to_string(e.code()), e.what());
  }
}

Response QueryService::whatif(const Request& request) const {
  const auto q = read_query(request);
  if (q.candidate.empty()) return client_error(400, "MissingParameter", "candidate is required");
  if (q.bundle.empty()) return client_error(400, to_string(ErrorCode::EmptySkillList), "bundle is required");
  const auto& a = *artifact_;
  auto w = what_if(q.bundle, q.candidate, a.grid, a.partition, a.graph);
  return json_response(200, whatif_to_json(w, a.lexicon));
}

Response QueryService::recommend(const Request& request) const {
  const auto q = read_query(request);
  if (q.bundle.empty()) return client_error(400, to_string(ErrorCode::EmptySkillList), "bundle is required");
  const auto& a = *artifact_;
  auto list = skillcompass::recommend(q.bundle, a.grid, a.partition, a.graph, q.top_n, q.alpha);
  return json_response(200, recommendations_to_json(list, a.lexicon));
}

std::pair<std::string, int> parse_bind_address(std::string_view text) {
  std::string host = "127.0.0.1";
  std::string_view port_text = text;
  if (auto colon = text.rfind(':'); colon != std::string_view::npos) {
    host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535 || host.empty()) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("bad bind address '{}' (expected host:port)", text));
  }
  return {host, port};
}

struct HttpServer::Impl {
  const QueryService& service;
  httplib::Server server;
  explicit Impl(const QueryService& s) : service(s) {}
};

HttpServer::HttpServer(const QueryService& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.params.emplace(k, v);
    r.body = req.body;
    const auto out = impl_->service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  auto& svr = impl_->server;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  for (const char* path : {"/skills", "/domains", "/grid", "/whatif", "/recommend"}) {
    svr.Get(path, handler);
    svr.Post(path, handler);
    svr.Options(path, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  if (port == 0) {
    const int bound = svr.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, fmt::format("cannot bind {}", host));
    return bound;
  }
  if (!svr.bind_to_port(host, port)) throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}", host, port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace skillcompass
