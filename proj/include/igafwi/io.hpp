//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>

#include "igafwi/config.hpp"
#include "igafwi/fwi.hpp"
#include "igafwi/material.hpp"

namespace igafwi {

/// Rasterizes gamma on the finest active resolution as a binary 8-bit PGM
/// (P5): gamma = gamma_max maps to white, gamma = gamma_min to black. The
/// raster always uses the sub-voxel resolution so refined and unrefined
/// cells share one image grid. Throws NumericalError on write failure.
void write_gamma_pgm(const MaterialGrid& grid, const std::string& path, double gamma_min,
                     double gamma_max = 1.0);

void write_gamma_grid_file(const MaterialGrid& grid, const std::string& path);
MaterialGrid read_gamma_grid_file(const std::string& path);
void write_gamma_csv(const MaterialGrid& grid, const std::string& path);

void write_indicator_csv(const MaterialGrid& grid, const IndicatorField& ind,
                         const std::string& path);

void write_journal_csv(const StageReport& stage, const std::string& path);

void write_study_csv(const StudyResult& result, const std::string& path);
void write_study_slopes_csv(const StudyResult& result, const std::string& path);

/// Resolved configuration plus provenance comments (version and the
/// numerical convention flags) written next to every run's outputs.
void write_manifest(const RunConfig& cfg, const std::string& path);

inline constexpr const char* kVersion = "igafwi 0.1.0";

} // namespace igafwi
