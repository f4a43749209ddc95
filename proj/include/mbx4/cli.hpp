#pragma once

// Command-line front end: analytic, simulate and validate subcommands.
//
// Exit codes: 0 ok, 1 validation failure (or unexpected runtime error),
// 2 configuration/usage error, 3 parameter-domain error, 4 numerical abort.

#include <ostream>

namespace mbx4 {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitConfig = 2,
  kExitDomain = 3,
  kExitNumerical = 4,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mbx4
