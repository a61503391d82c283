#pragma once

#include <ostream>

#include "adic/error.hpp"

namespace adic {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitValidation = 2,
  kExitSearch = 3,
  kExitVerification = 4,
};

int exit_code_for(ErrorKind kind);

// The whole command line tool; documents go to `out` unless --out is given,
// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adic
