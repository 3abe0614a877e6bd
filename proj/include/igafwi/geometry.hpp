//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <span>
#include <vector>

namespace igafwi {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Box {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

/// Implicit shape with a total, deterministic membership test.
class Shape {
public:
    virtual ~Shape() = default;
    virtual bool inside(double x, double y) const = 0;
};

using ShapePtr = std::shared_ptr<const Shape>;

ShapePtr make_circle(Point center, double radius);
ShapePtr make_ellipse(Point center, double semi_a, double semi_b, double angle_rad);
ShapePtr make_box_shape(Point lo, Point hi);
/// Half space below the natural cubic spline interpolating the given points
/// (ordered by x). inside(x, y) is true when y lies below the curve.
ShapePtr make_below_spline(std::vector<Point> pts);

ShapePtr shape_union(ShapePtr a, ShapePtr b);
ShapePtr shape_intersection(ShapePtr a, ShapePtr b);
ShapePtr shape_complement(ShapePtr a);

/// Shape that contains every point (the whole embedding box is physical).
ShapePtr make_everything();

/// A priori geometry scaling: alpha = 1 inside the physical shape,
/// eps_fict in the fictitious remainder of the embedding box.
struct AlphaField {
    ShapePtr physical;
    double eps_fict = 1e-8;

    bool is_physical(double x, double y) const { return physical->inside(x, y); }
    double alpha(double x, double y) const { return is_physical(x, y) ? 1.0 : eps_fict; }
};

/// One quadrature point of a composed rule. `alpha` is the indicator value
/// at the point; `voxel` identifies the material voxel containing it (-1
/// when the rule was built without a material grid).
struct QuadPoint {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double alpha = 1.0;
    int voxel = -1;
};

struct QuadratureCell {
    Box bounds;
    std::vector<QuadPoint> points;
};

/// Recursively subdivides `bounds` wherever the shape boundary cuts a box
/// (detected by a 5x5 sample stencil disagreeing), up to `depth` levels.
/// Leaves tile the input box exactly. depth must be <= 12.
std::vector<Box> quadtree_partition(const Box& bounds, const Shape& shape, int depth);

/// Tensor Gauss-Legendre points of order q per direction mapped onto the
/// box; weights sum to the box area. 1 <= q <= 10.
QuadratureCell gauss_points(const Box& box, int q);

/// Reference to one material voxel overlapping a knot span.
struct VoxelRef {
    int id = -1;
    Box box;
};

/// Composed rule for one knot span: per overlapping voxel, quadtree against
/// the alpha geometry, then Gauss points per leaf. Each point carries its
/// alpha value and voxel identity.
QuadratureCell composed_rule(const Box& span, const AlphaField& alpha,
                             std::span<const VoxelRef> voxels, int depth, int q);

/// Natural cubic spline through points ordered by x; evaluates y(x) with
/// linear extension outside the data range.
class CubicSpline {
public:
    explicit CubicSpline(std::vector<Point> pts);
    double operator()(double x) const;

private:
    std::vector<double> xs_, ys_, m_; // m_ = second derivatives
};

} // namespace igafwi
