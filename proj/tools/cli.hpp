#pragma once

#include <iosfwd>
#include <stop_token>
#include <string>
#include <vector>

namespace logcrypt::cli {

// Exit codes.
inline constexpr int kFound = 0;
inline constexpr int kExhausted = 1;
inline constexpr int kBudget = 2;
inline constexpr int kUsage = 10;
inline constexpr int kIo = 11;
inline constexpr int kParse = 12;
inline constexpr int kInternal = 13;

/// Runs one command line (without the program name). `stop` cancels long
/// running commands, which then print what they have so far.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err, std::stop_token stop = {});

} // namespace logcrypt::cli
