#pragma once

#include "beurling/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beurling {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2, kResourceError = 3 };

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
    std::optional<std::string> out_dir;    // overrides output_dir
    std::optional<std::uint64_t> seed;     // overrides seed
    int threads = 1;
};

const std::vector<std::string>& subcommands();

// Runs one subcommand; progress and diagnostics go to log.
int run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace beurling
