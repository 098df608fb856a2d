#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pingpong::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Runs the `pingpong` command line (args excludes the program name).
/// Returns 0 on success, 2 for invalid arguments, 3 for I/O failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a,b,c" or "lo:hi:n" (n evenly spaced points, endpoints included).
std::vector<double> parse_grid(const std::string& text);

}  // namespace pingpong::cli
