//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/assembly.hpp"

#include <cmath>

#include "igafwi/errors.hpp"

namespace igafwi {

double burst(double t, double f, double envelope_exponent) {
    if (t < 0.0 || t > 2.0 / f) return 0.0;
    const double env = std::sin(M_PI * f * t / 2.0);
    return std::sin(2.0 * M_PI * f * t) * std::pow(env, envelope_exponent);
}

Box span_box(const TensorBasis& basis, int ex, int ey) {
    const int px = basis.kx.degree, py = basis.ky.degree;
    return {basis.kx.knots[px + ex], basis.ky.knots[py + ey],
            basis.kx.knots[px + ex + 1], basis.ky.knots[py + ey + 1]};
}

SpanQuadrature::SpanQuadrature(const TensorBasis& basis, const AlphaField& alpha,
                               const MaterialGrid& grid, const IntegrationConfig& cfg)
    : sx_(basis.kx.num_spans()), sy_(basis.ky.num_spans()),
      order_(cfg.gauss_order > 0 ? cfg.gauss_order : basis.degree() + 1) {
    cells_.resize(static_cast<size_t>(sx_) * sy_);
    for (int ey = 0; ey < sy_; ++ey) {
        for (int ex = 0; ex < sx_; ++ex) {
            const Box span = span_box(basis, ex, ey);
            const auto voxels = grid.voxels_in_span(span);
            cells_[ex + sx_ * ey] =
                composed_rule(span, alpha, voxels, cfg.quadtree_depth, order_);
        }
    }
}

WaveSystem assemble(const TensorBasis& basis, const AlphaField& alpha,
                    const MaterialGrid& grid, double rho0, double c0,
                    const SpanQuadrature& quad, MassMode mode) {
    (void)alpha; // geometry is baked into the cached quadrature points
    const int n = basis.num_dofs();
    const int p1x = basis.kx.degree + 1, p1y = basis.ky.degree + 1;
    const int nloc = p1x * p1y;

    const std::vector<double> gamma = grid.values();

    std::vector<Eigen::Triplet<double>> trip_m, trip_k;
    trip_m.reserve(static_cast<size_t>(quad.spans_x()) * quad.spans_y() * nloc * nloc);
    trip_k.reserve(trip_m.capacity());

    std::vector<double> mloc(static_cast<size_t>(nloc) * nloc);
    std::vector<double> kloc(static_cast<size_t>(nloc) * nloc);
    std::vector<double> vals(nloc), gx(nloc), gy(nloc);
    std::vector<int> dofs(nloc);

    for (int ey = 0; ey < quad.spans_y(); ++ey) {
        for (int ex = 0; ex < quad.spans_x(); ++ex) {
            const QuadratureCell& cell = quad.cell(ex, ey);
            std::fill(mloc.begin(), mloc.end(), 0.0);
            std::fill(kloc.begin(), kloc.end(), 0.0);

            bool dofs_set = false;
            for (const QuadPoint& pt : cell.points) {
                const SpanEvaluation sx = eval_span(basis.kx, pt.x);
                const SpanEvaluation sy = eval_span(basis.ky, pt.y);
                int a = 0;
                for (int jb = 0; jb < p1y; ++jb)
                    for (int ia = 0; ia < p1x; ++ia, ++a) {
                        vals[a] = sx.values[ia] * sy.values[jb];
                        gx[a] = sx.derivs[ia] * sy.values[jb];
                        gy[a] = sx.values[ia] * sy.derivs[jb];
                    }
                if (!dofs_set) {
                    int b = 0;
                    for (int jb = 0; jb < p1y; ++jb)
                        for (int ia = 0; ia < p1x; ++ia, ++b)
                            dofs[b] = basis.global_index(sx.first_basis() + ia,
                                                         sy.first_basis() + jb);
                    dofs_set = true;
                }
                const double g = pt.voxel >= 0 ? gamma[pt.voxel] : 1.0;
                const double wm = pt.w * pt.alpha * g * rho0;
                const double wk = wm * c0 * c0;
                for (int i = 0; i < nloc; ++i) {
                    const double wmi = wm * vals[i];
                    const double wkx = wk * gx[i];
                    const double wky = wk * gy[i];
                    double* mrow = &mloc[static_cast<size_t>(i) * nloc];
                    double* krow = &kloc[static_cast<size_t>(i) * nloc];
                    for (int j = 0; j < nloc; ++j) {
                        mrow[j] += wmi * vals[j];
                        krow[j] += wkx * gx[j] + wky * gy[j];
                    }
                }
            }
            if (!dofs_set) continue;
            for (int i = 0; i < nloc; ++i)
                for (int j = 0; j < nloc; ++j) {
                    trip_m.emplace_back(dofs[i], dofs[j], mloc[i * nloc + j]);
                    trip_k.emplace_back(dofs[i], dofs[j], kloc[i * nloc + j]);
                }
        }
    }

    WaveSystem sys;
    sys.basis = basis;
    sys.rho0 = rho0;
    sys.c0 = c0;
    sys.M.resize(n, n);
    sys.K.resize(n, n);
    sys.M.setFromTriplets(trip_m.begin(), trip_m.end());
    sys.K.setFromTriplets(trip_k.begin(), trip_k.end());
    sys.M.makeCompressed();
    sys.K.makeCompressed();
    sys.F_spatial = Eigen::VectorXd::Zero(n);

    if (mode == MassMode::consistent) {
        sys.M_factor = std::make_shared<Cholesky>();
        sys.M_factor->compute(sys.M);
        if (sys.M_factor->info() != Eigen::Success)
            throw AssemblyError("assemble: Cholesky factorization of M failed "
                                "(mass matrix not positive definite)");
    } else {
        sys.M_lumped = row_sum_lump(sys.M);
    }
    return sys;
}

Eigen::VectorXd row_sum_lump(const SparseMat& M) {
    Eigen::VectorXd diag = M * Eigen::VectorXd::Ones(M.cols());
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] > 0.0))
            throw LumpingError("row_sum_lump: non-positive diagonal entry at row " +
                               std::to_string(i));
    return diag;
}

Eigen::VectorXd spatial_source(const TensorBasis& basis, const SourceSpec& spec,
                               const SpanQuadrature& quad) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(basis.num_dofs());
    const double two_sx2 = 2.0 * spec.sigma_x * spec.sigma_x;
    const double two_sy2 = 2.0 * spec.sigma_y * spec.sigma_y;
    for (int ey = 0; ey < quad.spans_y(); ++ey)
        for (int ex = 0; ex < quad.spans_x(); ++ex)
            for (const QuadPoint& pt : quad.cell(ex, ey).points) {
                const double dx = pt.x - spec.center.x;
                const double dy = pt.y - spec.center.y;
                const double f = std::exp(-(dx * dx / two_sx2 + dy * dy / two_sy2));
                if (f < 1e-300) continue;
                const Footprint fp = tensor_footprint(basis, pt.x, pt.y);
                for (int a = 0; a < fp.count; ++a)
                    F[fp.dofs[a]] += pt.w * f * fp.values[a];
            }
    return F;
}

Eigen::VectorXd WaveSystem::mass_solve(const Eigen::VectorXd& rhs, MassMode mode) const {
    if (mode == MassMode::lumped) {
        return rhs.array() / M_lumped.array();
    }
    return M_factor->solve(rhs);
}

} // namespace igafwi
