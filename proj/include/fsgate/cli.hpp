#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsgate {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of the command-line driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitStrictFailure = 1,
    kExitInputError = 2,
    kExitNumericalFailure = 3,
};

// Entry point of `fsgate validate|baseline|sweep`; args exclude the program
// name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fsgate
