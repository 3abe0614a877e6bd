//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "igafwi/errors.hpp"

namespace igafwi {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw NumericalError("cannot open output file '" + path + "'");
    return os;
}

} // namespace

void write_gamma_pgm(const MaterialGrid& grid, const std::string& path, double gamma_min,
                     double gamma_max) {
    const int nvs = grid.n_sub();
    const int w = grid.nx0() * nvs;
    const int h = grid.ny0() * nvs;
    std::ofstream os = open_out(path);
    os << "P5\n" << w << " " << h << "\n255\n";
    const double px = grid.domain_x() / w;
    const double py = grid.domain_y() / h;
    std::string row(static_cast<size_t>(w), '\0');
    for (int j = h - 1; j >= 0; --j) { // top image row = largest y
        for (int i = 0; i < w; ++i) {
            const double g = grid.gamma_at((i + 0.5) * px, (j + 0.5) * py);
            const double t = std::clamp((g - gamma_min) / (gamma_max - gamma_min), 0.0, 1.0);
            row[static_cast<size_t>(i)] = static_cast<char>(std::lround(255.0 * t));
        }
        os.write(row.data(), w);
    }
    if (!os) throw NumericalError("write failed for '" + path + "'");
}

void write_gamma_grid_file(const MaterialGrid& grid, const std::string& path) {
    std::ofstream os = open_out(path);
    grid.write_grid_file(os);
    if (!os) throw NumericalError("write failed for '" + path + "'");
}

MaterialGrid read_gamma_grid_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open grid file '" + path + "'");
    return MaterialGrid::read_grid_file(is);
}

void write_gamma_csv(const MaterialGrid& grid, const std::string& path) {
    std::ofstream os = open_out(path);
    grid.write_midpoint_csv(os);
}

void write_indicator_csv(const MaterialGrid& grid, const IndicatorField& ind,
                         const std::string& path) {
    std::ofstream os = open_out(path);
    os.precision(17);
    os << "x_mid,y_mid,eta\n";
    for (int j = 0; j < ind.ny; ++j)
        for (int i = 0; i < ind.nx; ++i)
            os << (i + 0.5) * grid.hx() << "," << (j + 0.5) * grid.hy() << "," << ind.at(i, j)
               << "\n";
}

void write_journal_csv(const StageReport& stage, const std::string& path) {
    std::ofstream os = open_out(path);
    os.precision(17);
    os << "iter,chi,proj_grad_norm,step_len,n_evals\n";
    for (const IterationRow& r : stage.rows)
        os << r.iter << "," << r.chi << "," << r.projected_gradient_norm << ","
           << r.step_length << "," << r.n_evals << "\n";
}

void write_study_csv(const StudyResult& result, const std::string& path) {
    std::ofstream os = open_out(path);
    os.precision(17);
    os << "p,mass,h,eps,n_steps,wall_s\n";
    for (const StudyRow& r : result.rows)
        os << r.degree << "," << (r.mass == MassMode::consistent ? "consistent" : "lumped")
           << "," << r.h << "," << r.error << "," << r.n_steps << "," << r.wall_seconds
           << "\n";
}

void write_study_slopes_csv(const StudyResult& result, const std::string& path) {
    std::ofstream os = open_out(path);
    os.precision(17);
    os << "p,mass,slope\n";
    for (const StudySlope& s : result.slopes)
        os << s.degree << "," << (s.mass == MassMode::consistent ? "consistent" : "lumped")
           << "," << s.slope << "\n";
}

void write_manifest(const RunConfig& cfg, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "# " << kVersion << "\n";
    os << "# resolved run configuration\n";
    os << "# conventions: burst envelope sin^e with e = " << cfg.experiment.envelope_exponent
       << "; kernel weighting = "
       << (cfg.experiment.kernel_area_weighting ? "midpoint-times-voxel-area" : "midpoint-value")
       << "; kernel sampling = "
       << (cfg.experiment.kernel_sampling == KernelSampling::midpoint ? "midpoint"
                                                                      : "quadrature")
       << "; refinement dilation = 8-neighborhood\n";
    os << serialize_config(cfg);
}

} // namespace igafwi
