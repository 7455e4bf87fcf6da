#pragma once

#include <ostream>

#include "sl4/config.hpp"

namespace sl4 {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitInconclusive = 2,
    kExitNumerical = 3,
    kExitInvariant = 4,
};

/// Exit code for an exception escaping a subcommand.
int exit_code_for(const std::exception& e);

/// Each command prints the PROBLEM, CLASSIFICATION, METHOD, RESULTS and
/// DIAGNOSTICS sections to `out`, writes its CSV files under cfg.out_dir and
/// returns an exit code. Exceptions propagate; run_command maps them.
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_interlace(const RunConfig& cfg, std::ostream& out);
int cmd_greens(const RunConfig& cfg, std::ostream& out);
int cmd_spurious(const RunConfig& cfg, std::ostream& out);

/// Dispatches cfg.subcommand; errors go to `err` with their exit code.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sl4
