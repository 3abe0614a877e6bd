//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/dynamics.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "igafwi/errors.hpp"

namespace igafwi {

double critical_dt(const WaveSystem& system, MassMode mode) {
    const int n = system.num_dofs();
    // Deterministic non-degenerate start vector.
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = std::sin(0.7 * i + 0.3) + 1e-3;
    v.normalize();

    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = system.mass_solve(system.K * v, mode);
        const double norm = w.norm();
        if (!(norm > 0.0))
            throw EstimationError("critical_dt: power iteration collapsed", lambda);
        w /= norm;
        const double kv = w.dot(system.K * w);
        const double mv = mode == MassMode::lumped
                              ? w.dot((system.M_lumped.array() * w.array()).matrix())
                              : w.dot(system.M * w);
        const double next = kv / mv;
        if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
            return 2.0 / std::sqrt(next);
        }
        lambda = next;
        v = std::move(w);
    }
    throw EstimationError("critical_dt: power iteration did not converge", lambda);
}

namespace {

double trace_value(const Footprint& fp, const Eigen::VectorXd& u) {
    double s = 0.0;
    for (int a = 0; a < fp.count; ++a) s += fp.values[a] * u[fp.dofs[a]];
    return s;
}

void check_finite(const Eigen::VectorXd& u, int step) {
    if (!u.allFinite())
        throw InstabilityError("time stepping produced non-finite coefficients at step " +
                                   std::to_string(step),
                               step);
}

} // namespace

std::pair<WaveHistory, Eigen::MatrixXd>
cdm_run(const WaveSystem& system, MassMode mode, const TimeGrid& grid,
        const std::function<double(double)>& signal,
        const std::vector<Footprint>& receiver_footprints, int history_stride,
        bool store_history) {
    const int n = system.num_dofs();
    const int nt = grid.n_steps;
    const double dt = grid.dt();
    if (history_stride < 1 || nt % history_stride != 0)
        throw std::invalid_argument("cdm_run: history stride must divide the step count");

    WaveHistory hist;
    hist.n_steps = nt;
    hist.stride = history_stride;
    hist.dt = dt;
    if (store_history) hist.snaps.reserve(nt / history_stride + 1);

    Eigen::MatrixXd traces(receiver_footprints.size(), nt + 1);

    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);

    auto record = [&](int step, const Eigen::VectorXd& coeffs) {
        for (size_t r = 0; r < receiver_footprints.size(); ++r)
            traces(static_cast<Eigen::Index>(r), step) = trace_value(receiver_footprints[r], coeffs);
        if (store_history && step % history_stride == 0)
            hist.snaps.push_back(coeffs);
    };

    record(0, u);
    const double dt2 = dt * dt;
    for (int i = 0; i < nt; ++i) {
        Eigen::VectorXd rhs = signal(grid.time(i)) * system.F_spatial - system.K * u;
        Eigen::VectorXd u_next = 2.0 * u - u_prev + dt2 * system.mass_solve(rhs, mode);
        check_finite(u_next, i + 1);
        u_prev = std::move(u);
        u = std::move(u_next);
        record(i + 1, u);
    }
    return {std::move(hist), std::move(traces)};
}

WaveHistory adjoint_run(const WaveSystem& system, MassMode mode, const TimeGrid& grid,
                        const std::vector<Footprint>& receiver_footprints,
                        const Eigen::MatrixXd& source_series, int history_stride) {
    const int n = system.num_dofs();
    const int nt = grid.n_steps;
    const double dt = grid.dt();
    if (source_series.rows() != static_cast<Eigen::Index>(receiver_footprints.size()) ||
        source_series.cols() != nt + 1)
        throw std::invalid_argument("adjoint_run: source series shape mismatch");
    if (history_stride < 1 || nt % history_stride != 0)
        throw std::invalid_argument("adjoint_run: history stride must divide the step count");

    // Reversed-time forward solve of the discrete adjoint: v_m solves the
    // same recursion with the time-reversed load, and the multiplier of
    // the step-j state equation is lambda_j = v_{n+1-j}. One extra step is
    // taken so that every physical index 0..n is covered; snapshot entry i
    // then aligns with physical time t_i.
    Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::VectorXd> snaps;
    snaps.reserve(nt / history_stride + 1);

    Eigen::VectorXd load(n);
    const double dt2 = dt * dt;
    for (int i = 0; i <= nt; ++i) {
        load.setZero();
        for (size_t r = 0; r < receiver_footprints.size(); ++r) {
            const double s = source_series(static_cast<Eigen::Index>(r), nt - i);
            if (s == 0.0) continue;
            const Footprint& fp = receiver_footprints[r];
            for (int a = 0; a < fp.count; ++a) load[fp.dofs[a]] += s * fp.values[a];
        }
        Eigen::VectorXd rhs = load - system.K * v;
        Eigen::VectorXd v_next = 2.0 * v - v_prev + dt2 * system.mass_solve(rhs, mode);
        check_finite(v_next, i + 1);
        v_prev = std::move(v);
        v = std::move(v_next);
        // v_{i+1} covers physical step nt - i; keep the strided set.
        if (i % history_stride == 0) snaps.push_back(v);
    }

    WaveHistory hist;
    hist.n_steps = nt;
    hist.stride = history_stride;
    hist.dt = dt;
    hist.snaps.assign(snaps.rbegin(), snaps.rend());
    return hist;
}

void write_traces_csv(std::ostream& os, const Eigen::MatrixXd& traces, double dt) {
    os.precision(17);
    os << "t";
    for (Eigen::Index r = 0; r < traces.rows(); ++r) os << ",r" << r;
    os << "\n";
    for (Eigen::Index i = 0; i < traces.cols(); ++i) {
        os << i * dt;
        for (Eigen::Index r = 0; r < traces.rows(); ++r) os << "," << traces(r, i);
        os << "\n";
    }
}

Eigen::MatrixXd read_traces_csv(std::istream& is, double& dt_out) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("traces csv: empty file");
    int n_rec = 0;
    for (char c : line)
        if (c == ',') ++n_rec;

    std::vector<std::vector<double>> rows;
    std::vector<double> times;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (static_cast<int>(row.size()) != n_rec + 1)
            throw std::runtime_error("traces csv: ragged row");
        times.push_back(row[0]);
        row.erase(row.begin());
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::runtime_error("traces csv: too few rows");
    dt_out = times[1] - times[0];

    Eigen::MatrixXd traces(n_rec, static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (int r = 0; r < n_rec; ++r) traces(r, static_cast<Eigen::Index>(i)) = rows[i][r];
    return traces;
}

} // namespace igafwi
