//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "igafwi/geometry.hpp"

using namespace igafwi;

TEST_CASE("quadtree: uncut boxes are returned unchanged") {
    const ShapePtr circle = make_circle({0.5, 0.5}, 0.45);
    // Fully inside the circle.
    auto leaves = quadtree_partition({0.4, 0.4, 0.6, 0.6}, *circle, 3);
    CHECK(leaves.size() == 1);
    // Fully outside.
    leaves = quadtree_partition({2.0, 2.0, 3.0, 3.0}, *circle, 3);
    CHECK(leaves.size() == 1);
    CHECK_THROWS_AS(quadtree_partition({0, 0, 1, 1}, *circle, 13), std::invalid_argument);
}

TEST_CASE("quadtree: box cut by a vertical line splits once per level") {
    // The box shape [0, 0.5] x [-1, 2] cuts the unit box along x = 0.5.
    const ShapePtr half = make_box_shape({0.0, -1.0}, {0.5, 2.0});
    const auto leaves = quadtree_partition({0, 0, 1, 1}, *half, 1);
    CHECK(leaves.size() == 4);

    double area = 0.0;
    for (const Box& b : leaves) area += b.area();
    CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quadtree tiling: leaves are disjoint and cover the box") {
    const ShapePtr circle = make_circle({6.0, 2.85}, 0.5);
    const Box cell{5.5, 2.5, 6.5, 3.5};
    const auto leaves = quadtree_partition(cell, *circle, 6);
    double area = 0.0;
    for (const Box& b : leaves) area += b.area();
    CHECK(area == doctest::Approx(cell.area()).epsilon(1e-12));
    // Disjointness: pairwise overlap area is zero (boxes share at most edges).
    for (size_t i = 0; i < leaves.size(); ++i)
        for (size_t j = i + 1; j < leaves.size(); ++j) {
            const double ox = std::min(leaves[i].x1, leaves[j].x1) -
                              std::max(leaves[i].x0, leaves[j].x0);
            const double oy = std::min(leaves[i].y1, leaves[j].y1) -
                              std::max(leaves[i].y0, leaves[j].y0);
            CHECK(!(ox > 0 && oy > 0));
        }
}

TEST_CASE("gauss points: midpoint, weights, and polynomial exactness") {
    const Box unit{0, 0, 1, 1};
    const QuadratureCell one = gauss_points(unit, 1);
    CHECK(one.points.size() == 1);
    CHECK(one.points[0].x == doctest::Approx(0.5));
    CHECK(one.points[0].y == doctest::Approx(0.5));
    CHECK(one.points[0].w == doctest::Approx(1.0));

    const QuadratureCell four = gauss_points(unit, 2);
    CHECK(four.points.size() == 4);
    for (const QuadPoint& p : four.points) CHECK(p.w == doctest::Approx(0.25));

    double integral = 0.0;
    for (const QuadPoint& p : four.points) integral += p.w * p.x * p.x;
    CHECK(integral == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(gauss_points(unit, 0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_points(unit, 11), std::invalid_argument);

    // Higher orders: integrate x^(2q-1) exactly on [0,1].
    for (int q = 3; q <= 10; ++q) {
        const QuadratureCell cell = gauss_points(unit, q);
        double acc = 0.0;
        for (const QuadPoint& p : cell.points) acc += p.w * std::pow(p.x, 2 * q - 1);
        CHECK(acc == doctest::Approx(1.0 / (2 * q)).epsilon(1e-13));
    }
}

TEST_CASE("composed rule: counts, alpha tagging, weight partition") {
    const AlphaField alpha_all{make_everything(), 1e-8};
    const Box span{0, 0, 1, 1};
    const std::vector<VoxelRef> voxels{{0, {0.0, 0.0, 0.5, 0.5}},
                                       {1, {0.5, 0.0, 1.0, 0.5}},
                                       {2, {0.0, 0.5, 0.5, 1.0}},
                                       {3, {0.5, 0.5, 1.0, 1.0}}};
    const QuadratureCell uncut = composed_rule(span, alpha_all, voxels, 3, 2);
    CHECK(uncut.points.size() == 16);
    for (const QuadPoint& p : uncut.points) {
        CHECK(p.alpha == 1.0);
        CHECK(p.voxel >= 0);
    }

    // Fully fictitious span.
    const AlphaField alpha_none{make_circle({100, 100}, 0.1), 1e-6};
    const QuadratureCell fict = composed_rule(span, alpha_none, voxels, 3, 2);
    for (const QuadPoint& p : fict.points) CHECK(p.alpha == 1e-6);

    // Cut by a circle: weights still tile the span.
    const AlphaField alpha_cut{make_circle({0.5, 0.5}, 0.4), 1e-8};
    const QuadratureCell cut = composed_rule(span, alpha_cut, voxels, 2, 2);
    double wsum = 0.0;
    for (const QuadPoint& p : cut.points) wsum += p.w;
    CHECK(wsum == doctest::Approx(span.area()).epsilon(1e-12));
}

TEST_CASE("circular-segment area converges with quadtree depth") {
    // 1x1 cell whose bottom edge y = 3 cuts a cap off the r = 0.5 circle;
    // the physical overlap is the analytic circular segment.
    const Point c{6.0, 2.85};
    const double r = 0.5;
    const ShapePtr circle = make_circle(c, r);
    const AlphaField alpha{circle, 1e-8};
    const Box cell{5.5, 3.0, 6.5, 4.0};
    const double d = 3.0 - c.y;
    const double exact = r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d);

    std::vector<double> errors;
    for (int depth = 2; depth <= 8; ++depth) {
        const std::vector<VoxelRef> voxels{{0, cell}};
        const QuadratureCell rule = composed_rule(cell, alpha, voxels, depth, 2);
        double inside = 0.0;
        for (const QuadPoint& p : rule.points)
            if (p.alpha == 1.0) inside += p.w;
        errors.push_back(std::abs(inside - exact));
    }
    // Fitted decay factor of the error per depth increment; the envelope
    // must shrink at least 4x per level.
    const int n = static_cast<int>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double X = i, Y = std::log(errors[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    const double rate = std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
    MESSAGE("circular-segment error decay factor per depth: ", rate);
    CHECK(rate <= 0.25);
    CHECK(errors.back() <= errors.front() * std::pow(0.25, n - 1));
}

TEST_CASE("rotated ellipse membership matches Monte-Carlo area") {
    const double a = 0.6, b = 0.15, angle = 67.5 * M_PI / 180.0;
    const ShapePtr ell = make_ellipse({0.0, 0.0}, a, b, angle);
    const double exact = M_PI * a * b;

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const double x = u(rng);
        const double y = u(rng);
        if (ell->inside(x, y)) ++hits;
    }
    const double box_area = 4.0;
    const double est = box_area * hits / n;
    const double p = exact / box_area;
    const double sigma = box_area * std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(est - exact) < 3.0 * sigma);
}

TEST_CASE("natural cubic spline interpolates and is linear for two points") {
    const std::vector<Point> pts{{0, 10}, {10, 1}, {25, 7.5}, {35, 2},  {50, 15},
                                 {60, 3}, {75, 12}, {90, 1},  {100, 10}};
    const CubicSpline s(pts);
    for (const Point& p : pts) CHECK(s(p.x) == doctest::Approx(p.y).epsilon(1e-12));

    const CubicSpline line({{0, 0}, {2, 4}});
    CHECK(line(1.0) == doctest::Approx(2.0));
    CHECK(line(1.5) == doctest::Approx(3.0));

    // below_spline membership
    const ShapePtr below = make_below_spline(pts);
    CHECK(below->inside(0.0, 9.9));
    CHECK(!below->inside(0.0, 10.1));
    CHECK(below->inside(50.0, 14.9));
    CHECK(!below->inside(50.0, 15.1));
}

TEST_CASE("shape combinators") {
    const ShapePtr c1 = make_circle({0, 0}, 1.0);
    const ShapePtr c2 = make_circle({1.5, 0}, 1.0);
    const ShapePtr u = shape_union(c1, c2);
    CHECK(u->inside(0, 0));
    CHECK(u->inside(1.5, 0));
    CHECK(!u->inside(4, 0));
    const ShapePtr i = shape_intersection(c1, c2);
    CHECK(i->inside(0.75, 0));
    CHECK(!i->inside(-0.5, 0));
    const ShapePtr comp = shape_complement(c1);
    CHECK(!comp->inside(0, 0));
    CHECK(comp->inside(4, 0));
}
