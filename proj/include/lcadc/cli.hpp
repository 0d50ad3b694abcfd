#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcadc {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitOverload = 3,
    kExitNumericFailure = 4,
};

/// Tool version, git-describe style ("v0.1.0-g1a2b3c4").
const char* version_string() noexcept;

/// Entry point of the `lcadc` tool. `args` excludes the program name.
/// Commands: simulate, sweep <clock|frequency|amplitude>, boundary, table1,
/// montecarlo.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lcadc
