#pragma once

#include <string>

#include "persuasion/receiver.hpp"

namespace persuasion {

enum class OutputFormat { Csv, Json };

/// Runtime knobs shared by the CLI subcommands. Loaded from a flat
/// `key = value` config file; command-line flags override file values.
struct RunConfig {
    int grid_points = 2001;          // odd, >= 3, so mu can land on-grid
    double deviation_step = 0.005;   // binary deviation support grid
    double profit_threshold = 1e-4;  // deviation-gain significance cutoff
    TieRule tie_rule = TieRule::FirstVisited;
    OutputFormat output_format = OutputFormat::Json;
    bool parallel = false;
    long seed = 12345;  // randomized property sweeps

    void validate() const;  // throws with the violated invariant named
};

/// Parses a config file of `key = value` lines ('#' comments and blank
/// lines allowed). Unknown keys and malformed or invariant-violating values
/// are rejected with the offending key named.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace persuasion
