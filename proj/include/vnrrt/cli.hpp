#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vnrrt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `vnrrt` binary. `args` excludes the program name.
/// Results go to `out`; diagnostics go to `err` prefixed with "error:".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vnrrt
