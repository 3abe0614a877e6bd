//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/adjoint.hpp"

#include <cmath>
#include <stdexcept>

namespace igafwi {

namespace {

// Linear interpolation of reference traces onto the simulation time grid.
Eigen::MatrixXd resample(const Eigen::MatrixXd& ref, double ref_dt, double sim_dt,
                         int sim_cols) {
    if (std::abs(ref_dt - sim_dt) < 1e-14 * sim_dt && ref.cols() == sim_cols)
        return ref;
    Eigen::MatrixXd out(ref.rows(), sim_cols);
    const int last = static_cast<int>(ref.cols()) - 1;
    for (int i = 0; i < sim_cols; ++i) {
        const double t = i * sim_dt;
        double pos = t / ref_dt;
        int k = static_cast<int>(std::floor(pos));
        if (k >= last) {
            k = last;
            pos = last;
        }
        if (k < 0) {
            k = 0;
            pos = 0;
        }
        const double w = pos - k;
        const int k1 = std::min(k + 1, last);
        out.col(i) = (1.0 - w) * ref.col(k) + w * ref.col(k1);
    }
    return out;
}

} // namespace

Misfit misfit(const TraceSet& sim, const TraceSet& reference) {
    if (sim.n_sources() != reference.n_sources())
        throw std::invalid_argument("misfit: source count mismatch");
    Misfit out;
    out.residuals.reserve(sim.per_source.size());
    const double dt = sim.dt;
    for (int s = 0; s < sim.n_sources(); ++s) {
        const Eigen::MatrixXd& u = sim.per_source[s];
        Eigen::MatrixXd r =
            resample(reference.per_source[s], reference.dt, dt, static_cast<int>(u.cols()));
        if (r.rows() != u.rows())
            throw std::invalid_argument("misfit: receiver count mismatch after resampling");
        Eigen::MatrixXd res = u - r;
        const Eigen::Index nc = res.cols();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nc; ++i) {
            const double w = (i == 0 || i == nc - 1) ? 0.5 : 1.0;
            acc += w * res.col(i).squaredNorm();
        }
        out.chi += 0.5 * acc * dt;
        out.residuals.push_back(std::move(res));
    }
    return out;
}

namespace {

Eigen::MatrixXd coefficients(const WaveHistory& h) {
    const int m = h.num_snaps();
    const int n = static_cast<int>(h.snaps.front().size());
    Eigen::MatrixXd c(m, n);
    for (int j = 0; j < m; ++j) c.row(j) = h.snaps[j].transpose();
    return c;
}

// Second time differences of the stored snapshots; the field starts from
// rest, so the virtual snapshot before t = 0 is zero.
Eigen::MatrixXd accelerations(const WaveHistory& h) {
    const int m = h.num_snaps();
    const int n = static_cast<int>(h.snaps.front().size());
    const double step = h.stride * h.dt;
    Eigen::MatrixXd a(m, n);
    if (m == 1) {
        a.setZero();
        return a;
    }
    a.row(0) = (h.snaps[1] - 2.0 * h.snaps[0]).transpose() / (step * step);
    for (int j = 1; j < m - 1; ++j)
        a.row(j) =
            (h.snaps[j + 1] - 2.0 * h.snaps[j] + h.snaps[j - 1]).transpose() / (step * step);
    a.row(m - 1).setZero(); // never used: the correlation stops one short
    return a;
}

} // namespace

namespace {

struct SamplePoint {
    double w = 0.0;
    Footprint fp;
};

} // namespace

VoxelGradient gradient(const std::vector<WaveHistory>& forward,
                       const std::vector<WaveHistory>& adjoint,
                       const TensorBasis& basis, const std::vector<VoxelMid>& midpoints,
                       const AlphaField& alpha, const KernelConfig& cfg,
                       const SpanQuadrature* quad) {
    if (forward.size() != adjoint.size())
        throw std::invalid_argument("gradient: history count mismatch");
    if (cfg.sampling == KernelSampling::quadrature && quad == nullptr)
        throw std::invalid_argument("gradient: quadrature sampling needs the composed rule");

    VoxelGradient out;
    out.values.assign(midpoints.size(), 0.0);

    // Spatial samples per voxel, cached once. Midpoints in the fictitious
    // domain are excluded from the kernel either way.
    std::vector<std::vector<SamplePoint>> samples(midpoints.size());
    std::vector<bool> active(midpoints.size(), false);
    for (size_t v = 0; v < midpoints.size(); ++v) {
        if (alpha.alpha(midpoints[v].x, midpoints[v].y) != 1.0) {
            out.skipped.push_back(static_cast<int>(v));
            continue;
        }
        active[v] = true;
        if (cfg.sampling == KernelSampling::midpoint)
            samples[v].push_back({cfg.area_weighting ? midpoints[v].area : 1.0,
                                  tensor_footprint(basis, midpoints[v].x, midpoints[v].y)});
    }
    if (cfg.sampling == KernelSampling::quadrature) {
        // The voxel's own composed-rule points reproduce the assembled
        // matrices' exact dependence on the voxel coefficient.
        for (int ey = 0; ey < quad->spans_y(); ++ey)
            for (int ex = 0; ex < quad->spans_x(); ++ex)
                for (const QuadPoint& pt : quad->cell(ex, ey).points) {
                    if (pt.voxel < 0 || pt.voxel >= static_cast<int>(samples.size()) ||
                        !active[pt.voxel])
                        continue;
                    samples[pt.voxel].push_back(
                        {pt.w * pt.alpha, tensor_footprint(basis, pt.x, pt.y)});
                }
    }

    // Discrete pairing of the wave correlation: the multiplier of the
    // step-i state equation is the adjoint snapshot at i+1, so the mass
    // term correlates u_adj(t_{i+1}) with the second difference of u at
    // t_i and the stiffness term with u(t_i) itself. This is the
    // summed-by-parts form of the sensitivity kernel
    //   int_T [ -rho0 du_adj/dt du/dt + rho0 c0^2 grad u_adj . grad u ] dt
    // and keeps finite-difference agreement at second order in dt.
    for (size_t s = 0; s < forward.size(); ++s) {
        const WaveHistory& hf = forward[s];
        const WaveHistory& ha = adjoint[s];
        if (hf.num_snaps() != ha.num_snaps() || hf.stride != ha.stride ||
            std::abs(hf.dt - ha.dt) > 1e-14 * hf.dt)
            throw std::invalid_argument("gradient: forward/adjoint grids differ");

        const Eigen::MatrixXd uf = coefficients(hf);
        const Eigen::MatrixXd ua = coefficients(ha);
        const Eigen::MatrixXd af = accelerations(hf);
        const int m = hf.num_snaps();
        const double wstep = hf.stride * hf.dt;

        for (size_t v = 0; v < midpoints.size(); ++v) {
            if (!active[v]) continue;
            double acc_v = 0.0;
            for (const SamplePoint& sp : samples[v]) {
                const Footprint& fp = sp.fp;
                double acc = 0.0;
                for (int j = 0; j + 1 < m; ++j) {
                    double uacc_f = 0.0, u_adj = 0.0;
                    double gxf = 0.0, gyf = 0.0, gxa = 0.0, gya = 0.0;
                    for (int a = 0; a < fp.count; ++a) {
                        const int d = fp.dofs[a];
                        uacc_f += fp.values[a] * af(j, d);
                        u_adj += fp.values[a] * ua(j + 1, d);
                        gxf += fp.grad_x[a] * uf(j, d);
                        gyf += fp.grad_y[a] * uf(j, d);
                        gxa += fp.grad_x[a] * ua(j + 1, d);
                        gya += fp.grad_y[a] * ua(j + 1, d);
                    }
                    acc += cfg.rho0 * u_adj * uacc_f +
                           cfg.rho0 * cfg.c0 * cfg.c0 * (gxa * gxf + gya * gyf);
                }
                acc_v += sp.w * acc;
            }
            out.values[v] += acc_v * wstep;
        }
    }
    return out;
}

} // namespace igafwi
