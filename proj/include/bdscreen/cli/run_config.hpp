#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdscreen/service/http_server.hpp"

namespace bdscreen::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string data_path;
  std::string out_path;
  std::string model_path;
  std::string answers_path;
  std::string json_path;
  std::string log_path = "assessments.jsonl";
  std::string host = "127.0.0.1";
  std::string kind = "knn";   // knn | svm | both (evaluate only)
  std::string mode = "all";   // holdout | cv | table | all
  std::uint64_t seed = 42;
  int k = 3;
  double C = 1.0;
  double tol = 1e-3;
  int max_epochs = 10000;
  int folds = 10;
  double test_fraction = 0.2;
  int port = 8080;
  std::size_t n = 1000;
  double separability = 0.5;
  bool separable = false;
  bool stratified = false;
  std::vector<std::string> answers;  // name=value pairs
};

/// Values given on the command line; unset means "not given".
struct FlagValues {
  std::optional<std::string> data_path, out_path, model_path, answers_path, json_path, log_path, host, kind, mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> k, max_epochs, folds, port;
  std::optional<double> C, tol, test_fraction, separability;
  std::optional<std::size_t> n;
};

/// Applies keys of a JSON config object ("seed", "k", "C", "tol", "folds",
/// "test_fraction", "port", "host", "model", "log", "data", "out", "kind",
/// "mode", "n", "separability", "max_epochs"). Throws ConfigError.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_flags(RunConfig& cfg, const FlagValues& flags);
/// BDSCREEN_SEED, BDSCREEN_K, BDSCREEN_C, BDSCREEN_TOL, BDSCREEN_FOLDS,
/// BDSCREEN_TEST_FRACTION, BDSCREEN_PORT, BDSCREEN_HOST, BDSCREEN_MODEL, BDSCREEN_LOG.
void apply_env(RunConfig& cfg, const service::EnvLookup& env = service::process_env);

/// defaults < config file < flags < environment
RunConfig resolve(const std::string& config_path, const FlagValues& flags,
                  const service::EnvLookup& env = service::process_env);

/// Throws UsageError for values outside their domains.
void validate(const RunConfig& cfg);

inline constexpr const char* kPrecedenceHelp =
    "Settings precedence: built-in defaults < --config JSON file < command-line flags < "
    "environment (BDSCREEN_SEED, BDSCREEN_K, BDSCREEN_C, BDSCREEN_TOL, BDSCREEN_FOLDS, "
    "BDSCREEN_TEST_FRACTION, BDSCREEN_PORT, BDSCREEN_HOST, BDSCREEN_MODEL, BDSCREEN_LOG).";

}  // namespace bdscreen::cli
