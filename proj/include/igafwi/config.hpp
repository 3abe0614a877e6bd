//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

#include "igafwi/fwi.hpp"

namespace igafwi {

/// Configuration file error (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration: one experiment plus study and output options.
/// Units are carried in the key names (mm, us, MHz); the solver works in
/// the mm/us system throughout.
struct RunConfig {
    ExperimentConfig experiment;

    // convergence-study family
    std::vector<int> study_degrees{2, 3};
    std::vector<std::string> study_masses{"consistent", "lumped"};
    std::vector<double> study_span_sizes{0.5, 0.25, 0.125, 0.0625};
    double study_ref_span_size = 0.03125;
    int study_ref_degree = 4;
    Box eval_window{7.0, 0.0, 10.0, 5.0};
    int eval_nx = 301;
    int eval_ny = 501;

    // output
    std::string output_dir = "out";
    std::string reference_dir; // default: <output_dir>/reference
    std::string grid_file;     // default: <output_dir>/gamma.grid
    int threads = 1;
    int verbosity = 1;

    std::string resolved_reference_dir() const {
        return reference_dir.empty() ? output_dir + "/reference" : reference_dir;
    }
    std::string resolved_grid_file() const {
        return grid_file.empty() ? output_dir + "/gamma.grid" : grid_file;
    }

    StudyConfig study() const;
};

/// Parses the flat-section key = value format. Unknown sections or keys
/// are fatal (ConfigError).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Applies "section.key=value" overrides on top of a parsed config.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Serializes to the same format parse_config_text reads; the round trip
/// is the identity on all fields.
std::string serialize_config(const RunConfig& cfg);

} // namespace igafwi
