#pragma once

#include <iosfwd>

#include "bdscreen/cli/run_config.hpp"

namespace bdscreen::cli {

// Each command writes data to `out`, diagnostics to `err`, and returns the
// process exit code.
int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_assess(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_serve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bdscreen::cli
