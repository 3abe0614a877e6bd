//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "igafwi/geometry.hpp"
#include "igafwi/material.hpp"
#include "igafwi/splines.hpp"

namespace igafwi {

using SparseMat = Eigen::SparseMatrix<double>;
using Cholesky = Eigen::SimplicialLLT<SparseMat, Eigen::Lower>;

enum class MassMode { consistent, lumped };

struct IntegrationConfig {
    int quadtree_depth = 4;
    int gauss_order = 0; // 0: use degree + 1
};

/// Gaussian source footprint and burst parameters.
struct SourceSpec {
    Point center;
    double sigma_x = 0.25;
    double sigma_y = 0.25;
    double frequency = 0.5;
    double envelope_exponent = 2.0;
};

/// Windowed sine burst g(t) = sin(2 pi f t) sin^e(pi f t / 2) for t <= 2/f,
/// zero afterwards.
double burst(double t, double f, double envelope_exponent = 2.0);

/// Composed quadrature rules cached per knot span. The rules depend on the
/// geometry and the voxel layout but not on the gamma values, so one cache
/// serves every reassembly within a refinement stage.
class SpanQuadrature {
public:
    SpanQuadrature(const TensorBasis& basis, const AlphaField& alpha,
                   const MaterialGrid& grid, const IntegrationConfig& cfg);

    int spans_x() const { return sx_; }
    int spans_y() const { return sy_; }
    const QuadratureCell& cell(int ex, int ey) const { return cells_[ex + sx_ * ey]; }
    int gauss_order() const { return order_; }

private:
    int sx_, sy_, order_;
    std::vector<QuadratureCell> cells_;
};

/// Assembled system for the density-scaled scalar wave equation:
///   M u'' + K u = f(t),
/// M_ij = int alpha gamma rho0 N_i N_j, K_ij = int alpha gamma rho0 c0^2
/// grad N_i . grad N_j over the extended domain.
struct WaveSystem {
    SparseMat M;
    SparseMat K;
    Eigen::VectorXd M_lumped; // row sums; filled when lumped mode requested
    Eigen::VectorXd F_spatial;
    TensorBasis basis;
    double rho0 = 1.0;
    double c0 = 1.0;
    std::shared_ptr<Cholesky> M_factor; // set for consistent mode

    int num_dofs() const { return static_cast<int>(K.rows()); }
    /// Solves M a = rhs with the mode the system was assembled for.
    Eigen::VectorXd mass_solve(const Eigen::VectorXd& rhs, MassMode mode) const;
};

/// Assembles M and K over the cached quadrature. For consistent mode the
/// Cholesky factorization of M is computed eagerly (AssemblyError if it
/// fails); for lumped mode the row-sum diagonal is prepared (LumpingError
/// on a non-positive entry).
WaveSystem assemble(const TensorBasis& basis, const AlphaField& alpha,
                    const MaterialGrid& grid, double rho0, double c0,
                    const SpanQuadrature& quad, MassMode mode);

/// Row-sum mass lumping; throws LumpingError if any diagonal entry is not
/// strictly positive.
Eigen::VectorXd row_sum_lump(const SparseMat& M);

/// Projects the spatial Gaussian onto the basis: F_i = int N_i f(x, y) by
/// the same composed quadrature (no alpha or gamma scaling).
Eigen::VectorXd spatial_source(const TensorBasis& basis, const SourceSpec& spec,
                               const SpanQuadrature& quad);

/// Physical box of knot span (ex, ey).
Box span_box(const TensorBasis& basis, int ex, int ey);

} // namespace igafwi
