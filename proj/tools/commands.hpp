#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace dpw::cli {

/// Outputs and per-stage wall-clock seconds of one run.
struct RunLog {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> outputs;
    std::vector<std::pair<std::string, double>> stages;

    /// Opens out_dir / name for writing and records it.
    std::filesystem::path add_output(const std::string& name);
};

inline const std::vector<std::string> kCommands{"eig1d", "eig2d", "capacity", "converge", "bands"};

/// Runs `command` on a validated config. Library errors propagate.
void run_command(const std::string& command, const Config& cfg, int threads, RunLog& log);

}  // namespace dpw::cli
