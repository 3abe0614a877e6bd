//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace igafwi {

namespace {

class Circle final : public Shape {
public:
    Circle(Point c, double r) : c_(c), r2_(r * r) {
        if (!(r > 0.0)) throw std::invalid_argument("circle: radius must be positive");
    }
    bool inside(double x, double y) const override {
        const double dx = x - c_.x, dy = y - c_.y;
        return dx * dx + dy * dy <= r2_;
    }

private:
    Point c_;
    double r2_;
};

class RotatedEllipse final : public Shape {
public:
    RotatedEllipse(Point c, double a, double b, double angle)
        : c_(c), a_(a), b_(b), cos_(std::cos(angle)), sin_(std::sin(angle)) {
        if (!(a > 0.0) || !(b > 0.0))
            throw std::invalid_argument("ellipse: semi-axes must be positive");
    }
    bool inside(double x, double y) const override {
        const double dx = x - c_.x, dy = y - c_.y;
        const double u = cos_ * dx + sin_ * dy;
        const double v = -sin_ * dx + cos_ * dy;
        return (u / a_) * (u / a_) + (v / b_) * (v / b_) <= 1.0;
    }

private:
    Point c_;
    double a_, b_, cos_, sin_;
};

class BoxShape final : public Shape {
public:
    BoxShape(Point lo, Point hi) : lo_(lo), hi_(hi) {}
    bool inside(double x, double y) const override {
        return x >= lo_.x && x <= hi_.x && y >= lo_.y && y <= hi_.y;
    }

private:
    Point lo_, hi_;
};

class BelowSpline final : public Shape {
public:
    explicit BelowSpline(std::vector<Point> pts) : spline_(std::move(pts)) {}
    bool inside(double x, double y) const override { return y <= spline_(x); }

private:
    CubicSpline spline_;
};

class Union final : public Shape {
public:
    Union(ShapePtr a, ShapePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    bool inside(double x, double y) const override {
        return a_->inside(x, y) || b_->inside(x, y);
    }

private:
    ShapePtr a_, b_;
};

class Intersection final : public Shape {
public:
    Intersection(ShapePtr a, ShapePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    bool inside(double x, double y) const override {
        return a_->inside(x, y) && b_->inside(x, y);
    }

private:
    ShapePtr a_, b_;
};

class Complement final : public Shape {
public:
    explicit Complement(ShapePtr a) : a_(std::move(a)) {}
    bool inside(double x, double y) const override { return !a_->inside(x, y); }

private:
    ShapePtr a_;
};

class Everything final : public Shape {
public:
    bool inside(double, double) const override { return true; }
};

} // namespace

ShapePtr make_circle(Point center, double radius) {
    return std::make_shared<Circle>(center, radius);
}
ShapePtr make_ellipse(Point center, double a, double b, double angle_rad) {
    return std::make_shared<RotatedEllipse>(center, a, b, angle_rad);
}
ShapePtr make_box_shape(Point lo, Point hi) {
    return std::make_shared<BoxShape>(lo, hi);
}
ShapePtr make_below_spline(std::vector<Point> pts) {
    return std::make_shared<BelowSpline>(std::move(pts));
}
ShapePtr shape_union(ShapePtr a, ShapePtr b) {
    return std::make_shared<Union>(std::move(a), std::move(b));
}
ShapePtr shape_intersection(ShapePtr a, ShapePtr b) {
    return std::make_shared<Intersection>(std::move(a), std::move(b));
}
ShapePtr shape_complement(ShapePtr a) {
    return std::make_shared<Complement>(std::move(a));
}
ShapePtr make_everything() {
    return std::make_shared<Everything>();
}

// ---------------------------------------------------------------------------
// Quadtree partitioning
// ---------------------------------------------------------------------------

namespace {

// A box counts as cut when the 5x5 stencil of membership samples disagrees.
bool is_cut(const Box& b, const Shape& shape) {
    bool first = shape.inside(b.x0, b.y0);
    for (int j = 0; j < 5; ++j) {
        const double y = b.y0 + b.height() * j / 4.0;
        for (int i = 0; i < 5; ++i) {
            const double x = b.x0 + b.width() * i / 4.0;
            if (shape.inside(x, y) != first) return true;
        }
    }
    return false;
}

void partition_rec(const Box& b, const Shape& shape, int level, int depth,
                   std::vector<Box>& out) {
    if (level >= depth || !is_cut(b, shape)) {
        out.push_back(b);
        return;
    }
    const double xm = 0.5 * (b.x0 + b.x1);
    const double ym = 0.5 * (b.y0 + b.y1);
    partition_rec({b.x0, b.y0, xm, ym}, shape, level + 1, depth, out);
    partition_rec({xm, b.y0, b.x1, ym}, shape, level + 1, depth, out);
    partition_rec({b.x0, ym, xm, b.y1}, shape, level + 1, depth, out);
    partition_rec({xm, ym, b.x1, b.y1}, shape, level + 1, depth, out);
}

} // namespace

std::vector<Box> quadtree_partition(const Box& bounds, const Shape& shape, int depth) {
    if (depth < 0 || depth > 12)
        throw std::invalid_argument("quadtree_partition: depth must be in [0, 12]");
    std::vector<Box> out;
    partition_rec(bounds, shape, 0, depth, out);
    return out;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

namespace {

struct Rule1D {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights; // sum to 2
};

// Nodes by Newton iteration on Legendre polynomials; computed once per order.
Rule1D compute_rule(int q) {
    Rule1D r;
    r.nodes.resize(q);
    r.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= q; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = q * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule1D& rule_1d(int q) {
    static std::array<Rule1D, 11> cache;
    static std::array<std::once_flag, 11> flags;
    std::call_once(flags[q], [q] { cache[q] = compute_rule(q); });
    return cache[q];
}

} // namespace

QuadratureCell gauss_points(const Box& box, int q) {
    if (q < 1 || q > 10)
        throw std::invalid_argument("gauss_points: order must be in [1, 10]");
    const Rule1D& r = rule_1d(q);
    QuadratureCell cell;
    cell.bounds = box;
    cell.points.reserve(q * q);
    const double jac = box.area() / 4.0;
    for (int j = 0; j < q; ++j) {
        const double y = box.y0 + 0.5 * (r.nodes[j] + 1.0) * box.height();
        for (int i = 0; i < q; ++i) {
            const double x = box.x0 + 0.5 * (r.nodes[i] + 1.0) * box.width();
            cell.points.push_back({x, y, r.weights[i] * r.weights[j] * jac, 1.0, -1});
        }
    }
    return cell;
}

QuadratureCell composed_rule(const Box& span, const AlphaField& alpha,
                             std::span<const VoxelRef> voxels, int depth, int q) {
    QuadratureCell cell;
    cell.bounds = span;
    for (const VoxelRef& v : voxels) {
        const std::vector<Box> leaves = quadtree_partition(v.box, *alpha.physical, depth);
        for (const Box& leaf : leaves) {
            QuadratureCell g = gauss_points(leaf, q);
            for (QuadPoint& pt : g.points) {
                pt.alpha = alpha.alpha(pt.x, pt.y);
                pt.voxel = v.id;
                cell.points.push_back(pt);
            }
        }
    }
    return cell;
}

// ---------------------------------------------------------------------------
// Natural cubic spline
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<Point> pts) {
    if (pts.size() < 2)
        throw std::invalid_argument("CubicSpline: need at least two points");
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    const int n = static_cast<int>(pts.size());
    xs_.resize(n);
    ys_.resize(n);
    for (int i = 0; i < n; ++i) {
        xs_[i] = pts[i].x;
        ys_[i] = pts[i].y;
        if (i > 0 && !(xs_[i] > xs_[i - 1]))
            throw std::invalid_argument("CubicSpline: x values must be distinct");
    }

    // Tridiagonal system for natural end conditions (m_0 = m_{n-1} = 0).
    m_.assign(n, 0.0);
    if (n > 2) {
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        for (int i = 1; i < n - 1; ++i) {
            const double h0 = xs_[i] - xs_[i - 1];
            const double h1 = xs_[i + 1] - xs_[i];
            a[i] = h0;
            b[i] = 2.0 * (h0 + h1);
            c[i] = h1;
            d[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
        }
        for (int i = 2; i < n - 1; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            d[i] -= f * d[i - 1];
        }
        for (int i = n - 2; i >= 1; --i)
            m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    }
}

double CubicSpline::operator()(double x) const {
    const int n = static_cast<int>(xs_.size());
    if (x <= xs_.front()) {
        const double h = xs_[1] - xs_[0];
        const double slope = (ys_[1] - ys_[0]) / h - h * m_[1] / 6.0;
        return ys_.front() + slope * (x - xs_.front());
    }
    if (x >= xs_.back()) {
        const double h = xs_[n - 1] - xs_[n - 2];
        const double slope = (ys_[n - 1] - ys_[n - 2]) / h + h * m_[n - 2] / 6.0;
        return ys_.back() + slope * (x - xs_.back());
    }
    const int i = static_cast<int>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin()) - 1;
    const double h = xs_[i + 1] - xs_[i];
    const double t0 = xs_[i + 1] - x;
    const double t1 = x - xs_[i];
    return (m_[i] * t0 * t0 * t0 + m_[i + 1] * t1 * t1 * t1) / (6.0 * h) +
           (ys_[i] / h - m_[i] * h / 6.0) * t0 + (ys_[i + 1] / h - m_[i + 1] * h / 6.0) * t1;
}

} // namespace igafwi
