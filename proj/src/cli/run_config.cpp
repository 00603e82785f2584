#include "bdscreen/cli/run_config.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

namespace bdscreen::cli {
namespace {

using nlohmann::json;

template <typename T>
T parse_env_number(const std::string& name, const std::string& text) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      value = static_cast<T>(std::stod(text, &used));
      if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
  } else {
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && p == text.data() + text.size()) return value;
  }
  throw ConfigError(name + ": not a valid number: '" + text + "'");
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void take(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  try {
    take(j, "data", cfg.data_path);
    take(j, "out", cfg.out_path);
    take(j, "model", cfg.model_path);
    take(j, "log", cfg.log_path);
    take(j, "host", cfg.host);
    take(j, "kind", cfg.kind);
    take(j, "mode", cfg.mode);
    take(j, "seed", cfg.seed);
    take(j, "k", cfg.k);
    take(j, "C", cfg.C);
    take(j, "tol", cfg.tol);
    take(j, "max_epochs", cfg.max_epochs);
    take(j, "folds", cfg.folds);
    take(j, "test_fraction", cfg.test_fraction);
    take(j, "port", cfg.port);
    take(j, "n", cfg.n);
    take(j, "separability", cfg.separability);
    take(j, "stratified", cfg.stratified);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

void apply_flags(RunConfig& cfg, const FlagValues& f) {
  take(f.data_path, cfg.data_path);
  take(f.out_path, cfg.out_path);
  take(f.model_path, cfg.model_path);
  take(f.answers_path, cfg.answers_path);
  take(f.json_path, cfg.json_path);
  take(f.log_path, cfg.log_path);
  take(f.host, cfg.host);
  take(f.kind, cfg.kind);
  take(f.mode, cfg.mode);
  take(f.seed, cfg.seed);
  take(f.k, cfg.k);
  take(f.max_epochs, cfg.max_epochs);
  take(f.folds, cfg.folds);
  take(f.port, cfg.port);
  take(f.C, cfg.C);
  take(f.tol, cfg.tol);
  take(f.test_fraction, cfg.test_fraction);
  take(f.separability, cfg.separability);
  take(f.n, cfg.n);
}

void apply_env(RunConfig& cfg, const service::EnvLookup& env) {
  if (auto v = env("BDSCREEN_SEED")) cfg.seed = parse_env_number<std::uint64_t>("BDSCREEN_SEED", *v);
  if (auto v = env("BDSCREEN_K")) cfg.k = parse_env_number<int>("BDSCREEN_K", *v);
  if (auto v = env("BDSCREEN_C")) cfg.C = parse_env_number<double>("BDSCREEN_C", *v);
  if (auto v = env("BDSCREEN_TOL")) cfg.tol = parse_env_number<double>("BDSCREEN_TOL", *v);
  if (auto v = env("BDSCREEN_FOLDS")) cfg.folds = parse_env_number<int>("BDSCREEN_FOLDS", *v);
  if (auto v = env("BDSCREEN_TEST_FRACTION")) cfg.test_fraction = parse_env_number<double>("BDSCREEN_TEST_FRACTION", *v);
  if (auto v = env("BDSCREEN_PORT")) cfg.port = parse_env_number<int>("BDSCREEN_PORT", *v);
  if (auto v = env("BDSCREEN_HOST")) cfg.host = *v;
  if (auto v = env("BDSCREEN_MODEL")) cfg.model_path = *v;
  if (auto v = env("BDSCREEN_LOG")) cfg.log_path = *v;
}

RunConfig resolve(const std::string& config_path, const FlagValues& flags, const service::EnvLookup& env) {
  RunConfig cfg;
  if (!config_path.empty()) apply_config_file(cfg, config_path);
  apply_flags(cfg, flags);
  apply_env(cfg, env);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.k < 1) throw UsageError("k must be >= 1");
  if (!(cfg.C > 0)) throw UsageError("C must be > 0");
  if (!(cfg.tol > 0)) throw UsageError("tol must be > 0");
  if (cfg.max_epochs < 1) throw UsageError("max-epochs must be >= 1");
  if (cfg.folds < 2) throw UsageError("folds must be >= 2");
  if (!(cfg.test_fraction > 0 && cfg.test_fraction < 1)) throw UsageError("test-fraction must be in (0, 1)");
  if (cfg.port < 0 || cfg.port > 65535) throw UsageError("port must be in [0, 65535]");
  if (cfg.kind != "knn" && cfg.kind != "svm" && cfg.kind != "both") {
    throw UsageError("unknown classifier kind '" + cfg.kind + "' (expected knn, svm or both)");
  }
  if (cfg.mode != "holdout" && cfg.mode != "cv" && cfg.mode != "table" && cfg.mode != "all") {
    throw UsageError("unknown mode '" + cfg.mode + "' (expected holdout, cv, table or all)");
  }
}

}  // namespace bdscreen::cli
