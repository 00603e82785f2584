#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "bdscreen/service/screening_service.hpp"

namespace httplib {
class Server;
}

namespace bdscreen::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model_path;
  std::string log_path = "assessments.jsonl";
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Starts from `base`, applies the JSON config file (if non-empty), then the
/// BDSCREEN_HOST, BDSCREEN_PORT, BDSCREEN_MODEL and BDSCREEN_LOG variables.
/// Throws ConfigError on unreadable files or bad values.
ServiceConfig load_service_config(const std::string& config_path, ServiceConfig base = {},
                                  const EnvLookup& env = process_env);

/// JSON/HTTP front end for a ScreeningService under /api/v1.
class HttpServer {
 public:
  explicit HttpServer(ScreeningService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  /// Throws std::runtime_error when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  ScreeningService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace bdscreen::service
