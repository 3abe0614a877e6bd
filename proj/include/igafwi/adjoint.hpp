//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "igafwi/dynamics.hpp"
#include "igafwi/material.hpp"

namespace igafwi {

/// Misfit value and the per-source residual matrices (simulated minus
/// reference, n_receivers x (n_steps + 1)).
struct Misfit {
    double chi = 0.0;
    std::vector<Eigen::MatrixXd> residuals;
};

/// chi = 1/2 sum_s sum_r sum_i w_i dt (u - u0)^2 with trapezoid end
/// weights 1/2. Reference traces on a different time grid are resampled
/// onto the simulation grid by linear interpolation. Throws
/// std::invalid_argument on receiver-count mismatch.
Misfit misfit(const TraceSet& sim, const TraceSet& reference);

/// How the per-voxel sensitivity is sampled in space. `midpoint` evaluates
/// the kernel at the voxel mid position; `quadrature` integrates it with
/// the voxel's own composed-rule points, which reproduces the assembled
/// system's exact dependence on the voxel coefficient.
enum class KernelSampling { midpoint, quadrature };

struct KernelConfig {
    double rho0 = 1.0;
    double c0 = 1.0;
    /// Multiply the midpoint kernel value by the voxel area. This makes
    /// the result the actual derivative of chi with respect to the voxel
    /// coefficient; recorded in the run manifest. Quadrature sampling
    /// always carries the area measure in its weights.
    bool area_weighting = true;
    KernelSampling sampling = KernelSampling::midpoint;
};

/// Gradient of chi with respect to the voxel coefficients, one entry per
/// requested midpoint. Midpoints where alpha != 1 are excluded (entry 0)
/// and reported in `skipped`.
struct VoxelGradient {
    std::vector<double> values;
    std::vector<int> skipped; // indices into the midpoint list
};

/// Evaluates the sensitivity kernel
///   sum_s int_T [ -rho0 du_adj/dt du/dt + rho0 c0^2 grad u_adj . grad u ] dt
/// per voxel from the stored coefficient histories. Forward and adjoint
/// histories must share the time grid and stride. For quadrature sampling
/// the composed rule that assembled the system must be supplied.
VoxelGradient gradient(const std::vector<WaveHistory>& forward,
                       const std::vector<WaveHistory>& adjoint,
                       const TensorBasis& basis, const std::vector<VoxelMid>& midpoints,
                       const AlphaField& alpha, const KernelConfig& cfg,
                       const SpanQuadrature* quad = nullptr);

} // namespace igafwi
