#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pyidiom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `pyidiom` executable; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace pyidiom::cli
