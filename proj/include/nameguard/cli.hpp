#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nameguard::cli {

// Exit codes besides the verdict codes 0/1/2 of `verify`.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataError = 65;
inline constexpr int kExitIoError = 74;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nameguard::cli
