#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steklov::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kPrecondition = 1;
inline constexpr int kNumerical = 2;

/// Runs one command; `args` excludes the program name. Results go to `out`
/// (or to files named by flags), diagnostics to `err` as
/// "error: <reason_code>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steklov::cli
