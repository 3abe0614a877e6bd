//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "igafwi/assembly.hpp"

namespace igafwi {

struct TimeGrid {
    double t_max = 1.0;
    int n_steps = 1;

    double dt() const { return t_max / n_steps; }
    double time(int i) const { return t_max * i / n_steps; }
};

/// Stored coefficient snapshots of one wave solve. With stride s, snapshot
/// j holds the coefficients at step j*s; the stride must divide n_steps so
/// that the final step is stored.
struct WaveHistory {
    int n_steps = 0;
    int stride = 1;
    double dt = 0.0;
    std::vector<Eigen::VectorXd> snaps;

    int num_snaps() const { return static_cast<int>(snaps.size()); }
    const Eigen::VectorXd& final_coeffs() const { return snaps.back(); }
};

/// Receiver traces of all sources on a common time grid; per-source
/// matrices are n_receivers x (n_steps + 1).
struct TraceSet {
    std::vector<Point> receivers;
    double dt = 0.0;
    std::vector<Eigen::MatrixXd> per_source;

    int n_receivers() const { return static_cast<int>(receivers.size()); }
    int n_sources() const { return static_cast<int>(per_source.size()); }
};

/// Critical time step 2/sqrt(lambda_max(K, M)) with lambda_max estimated by
/// power iteration on M^-1 K (relative tolerance 1e-6, at most 10000
/// iterations). Throws EstimationError carrying the last iterate when the
/// iteration does not converge.
double critical_dt(const WaveSystem& system, MassMode mode);

/// Explicit central-difference run from rest. Traces are recorded at every
/// step by dotting the coefficients with cached receiver footprints; the
/// history is stored at the given stride. Throws InstabilityError with the
/// step index if any coefficient stops being finite.
std::pair<WaveHistory, Eigen::MatrixXd>
cdm_run(const WaveSystem& system, MassMode mode, const TimeGrid& grid,
        const std::function<double(double)>& signal,
        const std::vector<Footprint>& receiver_footprints, int history_stride = 1,
        bool store_history = true);

/// Adjoint solve: the same operator run on the time-reversed per-receiver
/// source series (n_receivers x (n_steps + 1)); the returned history is
/// index-reversed so snapshot i aligns with physical time t_i.
WaveHistory adjoint_run(const WaveSystem& system, MassMode mode, const TimeGrid& grid,
                        const std::vector<Footprint>& receiver_footprints,
                        const Eigen::MatrixXd& source_series, int history_stride = 1);

/// Writes traces as CSV: header "t,r0,r1,...", one row per step.
void write_traces_csv(std::ostream& os, const Eigen::MatrixXd& traces, double dt);
Eigen::MatrixXd read_traces_csv(std::istream& is, double& dt_out);

} // namespace igafwi
