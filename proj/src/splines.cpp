//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/splines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace igafwi {

KnotVector open_knot_vector(int num_spans, int degree, double length) {
    if (num_spans < 1)
        throw std::invalid_argument("open_knot_vector: num_spans must be >= 1");
    if (degree < 1 || degree > kMaxDegree)
        throw std::invalid_argument("open_knot_vector: degree out of supported range");
    if (!(length > 0.0))
        throw std::invalid_argument("open_knot_vector: length must be positive");

    KnotVector kv;
    kv.degree = degree;
    kv.knots.reserve(num_spans + 2 * degree + 1);
    for (int i = 0; i <= degree; ++i)
        kv.knots.push_back(0.0);
    for (int i = 1; i < num_spans; ++i)
        kv.knots.push_back(length * i / num_spans);
    for (int i = 0; i <= degree; ++i)
        kv.knots.push_back(length);
    return kv;
}

namespace {

// Containing span by direct index arithmetic; spans are uniform by
// construction. Right-limit at interior knots, left-limit at the end.
int locate_span(const KnotVector& kv, double x) {
    const double len = kv.length();
    const int nspans = kv.num_spans();
    const double tol = 1e-12 * len;
    if (x < -tol || x > len + tol)
        throw std::out_of_range("eval_span: coordinate " + std::to_string(x) +
                                " outside [0, " + std::to_string(len) + "]");
    int span = static_cast<int>(std::floor(x * nspans / len));
    if (span < 0) span = 0;
    if (span >= nspans) span = nspans - 1;
    return span;
}

} // namespace

SpanEvaluation eval_span(const KnotVector& kv, double x) {
    const int p = kv.degree;
    const int span = locate_span(kv, x);
    // Knot index k such that the span is [knots[k], knots[k+1]).
    const int k = span + p;
    const auto& t = kv.knots;

    SpanEvaluation ev;
    ev.span = span;
    ev.count = p + 1;

    // Triangular Cox-de Boor table; `nd` holds the degree p-1 row needed
    // for the derivative formula.
    std::array<double, kMaxDegree + 1> left{}, right{}, nd{};
    ev.values[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[k + 1 - j];
        right[j] = t[k + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = ev.values[r] / (right[r + 1] + left[j - r]);
            ev.values[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ev.values[j] = saved;
        if (j == p - 1)
            nd = ev.values;
    }

    if (p == 1) {
        nd[0] = 1.0; // the single degree-0 function on the span
    }
    // N'_{i,p} = p/(t_{i+p}-t_i) N_{i,p-1} - p/(t_{i+p+1}-t_{i+1}) N_{i+1,p-1},
    // where N_{i,p-1} on this span covers local indices 1..p of `nd` shifted:
    // the degree p-1 functions non-zero here are (span+1)..(span+p) in the
    // p-1 numbering, matching nd[0..p-1].
    for (int a = 0; a <= p; ++a) {
        const int i = span + a;
        double d = 0.0;
        if (a > 0) {
            const double den = t[i + p] - t[i];
            if (den > 0.0) d += p * nd[a - 1] / den;
        }
        if (a < p) {
            const double den = t[i + p + 1] - t[i + 1];
            if (den > 0.0) d -= p * nd[a] / den;
        }
        ev.derivs[a] = d;
    }
    return ev;
}

Footprint tensor_footprint(const TensorBasis& basis, double x, double y) {
    const SpanEvaluation ex = eval_span(basis.kx, x);
    const SpanEvaluation ey = eval_span(basis.ky, y);
    const int px1 = ex.count;
    const int py1 = ey.count;

    Footprint fp;
    fp.count = px1 * py1;
    fp.dofs.resize(fp.count);
    fp.values.resize(fp.count);
    fp.grad_x.resize(fp.count);
    fp.grad_y.resize(fp.count);

    int n = 0;
    for (int b = 0; b < py1; ++b) {
        const int iy = ey.first_basis() + b;
        for (int a = 0; a < px1; ++a, ++n) {
            const int ix = ex.first_basis() + a;
            fp.dofs[n] = basis.global_index(ix, iy);
            fp.values[n] = ex.values[a] * ey.values[b];
            fp.grad_x[n] = ex.derivs[a] * ey.values[b];
            fp.grad_y[n] = ex.values[a] * ey.derivs[b];
        }
    }
    return fp;
}

} // namespace igafwi
