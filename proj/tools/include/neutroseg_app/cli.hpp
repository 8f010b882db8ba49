#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace neutroseg::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `neutroseg` tool. Subcommands: segment, eval,
/// thickness-map, serve, phantom.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace neutroseg::app
