#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ransomnet::cli {

inline constexpr std::string_view kVersion = "1.0.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInternalError = 2;

// Runs one command line (without the program name). Data goes to `out`
// (or to --out files), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// key=value lines from a config file turned into flags; keys already given
// on the command line are skipped. Exposed for tests.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& config_text);

}  // namespace ransomnet::cli
