#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>

#include "json.hpp"

#include "skillcompass/artifact.hpp"

namespace skillcompass {

struct Request {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> params;  // decoded query string
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Read-only query endpoints over a frozen artifact. handle() is a pure
/// function of the artifact and the request, safe to call concurrently.
class QueryService {
 public:
  explicit QueryService(std::shared_ptr<const ModelArtifact> artifact);

  Response handle(const Request& request) const;
  const ModelArtifact& artifact() const { return *artifact_; }

  nlohmann::json skills(std::string_view prefix = {}) const;
  const nlohmann::json& domains() const { return domains_; }
  const nlohmann::json& grid() const { return grid_; }

 private:
  Response whatif(const Request& request) const;
  Response recommend(const Request& request) const;

  std::shared_ptr<const ModelArtifact> artifact_;
  nlohmann::json skills_;  // degree descending, then key
  nlohmann::json domains_;
  nlohmann::json grid_;
};

// "host:port"; a bare port binds 127.0.0.1.
std::pair<std::string, int> parse_bind_address(std::string_view text);
inline constexpr std::string_view kBindEnv = "SKILLCOMPASS_BIND";
inline constexpr std::string_view kDefaultBind = "127.0.0.1:8080";

/// HTTP front end for a QueryService.
class HttpServer {
 public:
  explicit HttpServer(const QueryService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and returns the bound port (port 0 picks a free one).
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace skillcompass
