#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unra::cli {

// Exit codes of `run`.
inline constexpr int kSuccess = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

// Entry point of the `unra` tool: subcommands train, query, eval and synth.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unra::cli
