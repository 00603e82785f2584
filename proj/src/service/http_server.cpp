#include "bdscreen/service/http_server.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

namespace bdscreen::service {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                json fields = json::array()) {
  send(res, status, {{"error", {{"code", code}, {"message", message}, {"fields", std::move(fields)}}}});
}

json violations_to_json(const std::vector<Violation>& violations) {
  json out = json::array();
  for (const auto& v : violations) out.push_back({{"field", v.feature}, {"value", v.value}, {"message", v.message}});
  return out;
}

int parse_port(const std::string& text) {
  try {
    std::size_t used = 0;
    const int port = std::stoi(text, &used);
    if (used == text.size() && port >= 0 && port <= 65535) return port;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid port '" + text + "'");
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

ServiceConfig load_service_config(const std::string& config_path, ServiceConfig cfg, const EnvLookup& env) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + config_path + "': " + e.what());
    }
    try {
      if (j.contains("host")) cfg.host = j["host"].get<std::string>();
      if (j.contains("port")) cfg.port = j["port"].get<int>();
      if (j.contains("model")) cfg.model_path = j["model"].get<std::string>();
      if (j.contains("log")) cfg.log_path = j["log"].get<std::string>();
    } catch (const json::exception& e) {
      throw ConfigError("config file '" + config_path + "': " + e.what());
    }
  }
  if (auto v = env("BDSCREEN_HOST")) cfg.host = *v;
  if (auto v = env("BDSCREEN_PORT")) cfg.port = parse_port(*v);
  if (auto v = env("BDSCREEN_MODEL")) cfg.model_path = *v;
  if (auto v = env("BDSCREEN_LOG")) cfg.log_path = *v;
  if (cfg.port < 0 || cfg.port > 65535) throw ConfigError("port out of range: " + std::to_string(cfg.port));
  return cfg;
}

HttpServer::HttpServer(ScreeningService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    } catch (...) {
      send_error(res, 500, "internal", "unknown error");
    }
  });

  srv.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    send(res, 200, {{"status", "ok"}, {"model_loaded", service_.model_loaded()},
                    {"assessments", service_.assessments().size()}});
  });

  srv.Get("/api/v1/schema", [this](const httplib::Request&, httplib::Response& res) {
    send(res, 200, schema_to_json(service_.intake_schema()));
  });

  srv.Post("/api/v1/assessments", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      send_error(res, 400, "bad_request", std::string("malformed JSON: ") + e.what());
      return;
    }
    if (!body.is_object()) {
      send_error(res, 400, "bad_request", "request body must be a JSON object");
      return;
    }
    std::optional<std::string> key;
    if (req.has_header("Idempotency-Key")) {
      key = req.get_header_value("Idempotency-Key");
    } else if (body.contains("idempotency_key") && body["idempotency_key"].is_string()) {
      key = body["idempotency_key"].get<std::string>();
    }
    const json answers = body.contains("answers") ? body["answers"] : json();
    try {
      const AssessOutcome out = service_.assess(answers, key);
      json j = to_json(out.result);
      j["replayed"] = out.replayed;
      send(res, 201, j);
    } catch (const ValidationError& e) {
      send_error(res, 422, "validation_failed", "one or more answers are invalid", violations_to_json(e.violations()));
    } catch (const ServiceUnavailable& e) {
      send_error(res, 503, "unavailable", e.what());
    }
  });

  srv.Post("/api/v1/assessments/:id/consent", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      send_error(res, 400, "bad_request", std::string("malformed JSON: ") + e.what());
      return;
    }
    if (!body.is_object() || !body.contains("agreed") || !body["agreed"].is_boolean()) {
      send_error(res, 422, "validation_failed", "body must be {\"agreed\": true|false}",
                 json::array({{{"field", "agreed"}, {"value", body.is_object() && body.contains("agreed") ? body["agreed"].dump() : ""},
                               {"message", "expected a boolean"}}}));
      return;
    }
    try {
      send(res, 200, to_json(service_.record_consent(req.path_params.at("id"), body["agreed"].get<bool>())));
    } catch (const NotFound& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, "conflict", e.what());
    }
  });

  srv.Get("/api/v1/vcbt/:disorder", [](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, to_json(vcbt_content(req.path_params.at("disorder"))));
    } catch (const std::out_of_range& e) {
      send_error(res, 404, "not_found", e.what());
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + " on any port");
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
  service_.flush();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace bdscreen::service
