#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dimc/config.hpp"

namespace dimc {

struct ExperimentResult
{
    std::vector<std::filesystem::path> outputs;
    std::string summary;  //!< one line: key metric and output path
    bool warning{false};  //!< vacuous bounds, partial codebooks, boundary loss
};

/// Dispatches on `cfg.kind` and writes the CSV artifacts into
/// `cfg.out_dir`. Throws ConfigError for an invalid or incomplete config.
ExperimentResult run_experiment(ExperimentConfig const& cfg);

}  // namespace dimc
