//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <vector>

namespace igafwi {

/// Maximum supported polynomial degree of the wave-field basis.
inline constexpr int kMaxDegree = 8;

/// Open knot vector with uniform interior knots on [0, length].
///
/// End knots are repeated degree+1 times, interior knots have multiplicity
/// one, so the basis is C^{p-1} across span boundaries. The parametric
/// coordinate coincides with the physical coordinate (uniform spans).
struct KnotVector {
    int degree = 1;
    std::vector<double> knots;

    int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }
    int num_spans() const { return num_basis() - degree; }
    double length() const { return knots.back(); }
    double span_size() const { return length() / num_spans(); }
};

/// Values and first derivatives of the degree+1 basis functions that are
/// non-zero on one knot span. Basis function `first_basis + a` has value
/// `values[a]`.
struct SpanEvaluation {
    int span = 0;
    int count = 0;
    std::array<double, kMaxDegree + 1> values{};
    std::array<double, kMaxDegree + 1> derivs{};

    int first_basis() const { return span; }
};

/// Builds an open knot vector with `num_spans` uniform spans of total
/// physical extent `length`. Throws std::invalid_argument on non-positive
/// span count, degree, or length.
KnotVector open_knot_vector(int num_spans, int degree, double length);

/// Evaluates the non-vanishing basis functions and their first derivatives
/// at physical coordinate x (Cox-de Boor recursion). At interior knots the
/// right-limit span is used; at the final knot the left limit. Throws
/// std::out_of_range if x lies outside [0, length].
SpanEvaluation eval_span(const KnotVector& kv, double x);

/// Tensor-product B-spline basis over a rectangular extended domain.
/// Global numbering is row-major with x fastest:
///   global = ix + num_basis_x * iy.
struct TensorBasis {
    KnotVector kx;
    KnotVector ky;

    int degree() const { return kx.degree; }
    int num_dofs() const { return kx.num_basis() * ky.num_basis(); }
    int local_size() const { return (kx.degree + 1) * (ky.degree + 1); }
    int global_index(int ix, int iy) const { return ix + kx.num_basis() * iy; }
};

/// The (p+1)^2 basis values and physical gradients supported at one point.
struct Footprint {
    int count = 0;
    std::vector<int> dofs;
    std::vector<double> values;
    std::vector<double> grad_x;
    std::vector<double> grad_y;
};

/// Evaluates the local basis footprint at (x, y): values N_{ix}N_{iy} and
/// gradient rows [N'_{ix}N_{iy}, N_{ix}N'_{iy}]. Throws std::out_of_range
/// for points outside the extended domain.
Footprint tensor_footprint(const TensorBasis& basis, double x, double y);

} // namespace igafwi
