#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vrstab {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitDivergence = 3,
};

/// Entry point behind the `vrstab` binary. `args` excludes the program name.
/// The output manifest goes to `out`; diagnostics and `error_code=` lines to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vrstab
