#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pfraud::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< A run started but an output could not be produced.
inline constexpr int kExitUsage = 2;    ///< Bad flags, bad config, missing paths.

/// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfraud::cli
