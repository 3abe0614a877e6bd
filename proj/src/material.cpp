//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/material.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace igafwi {

double IndicatorField::max_eta() const {
    double m = 0.0;
    for (double v : eta) m = std::max(m, v);
    return m;
}

MaterialGrid::MaterialGrid(int nx, int ny, double hx, double hy, int n_sub)
    : nx_(nx), ny_(ny), hx_(hx), hy_(hy), n_sub_(n_sub) {
    if (nx < 1 || ny < 1 || !(hx > 0.0) || !(hy > 0.0) || n_sub < 2)
        throw std::invalid_argument("MaterialGrid: invalid dimensions");
    cells_.resize(static_cast<size_t>(nx) * ny);
    mask_.assign(cells_.size(), false);
    rebuild_offsets();
}

void MaterialGrid::rebuild_offsets() {
    id_offset_.resize(cells_.size());
    int id = 0;
    const int per_refined = n_sub_ * n_sub_;
    for (size_t k = 0; k < cells_.size(); ++k) {
        id_offset_[k] = id;
        id += cells_[k].refined ? per_refined : 1;
    }
}

int MaterialGrid::num_voxels() const {
    const int per_refined = n_sub_ * n_sub_;
    return nx_ * ny_ + n_refined_ * (per_refined - 1);
}

int MaterialGrid::cell_index(double xf, int n) const {
    // floor puts a face coordinate into the +side voxel; the top boundary
    // belongs to the last voxel.
    int i = static_cast<int>(std::floor(xf));
    if (i >= n) i = n - 1;
    if (i < 0) i = 0;
    return i;
}

double MaterialGrid::gamma_at(double x, double y) const {
    const double tolx = 1e-12 * domain_x(), toly = 1e-12 * domain_y();
    if (x < -tolx || x > domain_x() + tolx || y < -toly || y > domain_y() + toly)
        throw std::out_of_range("gamma_at: point outside the extended domain");
    const int i = cell_index(x / hx_, nx_);
    const int j = cell_index(y / hy_, ny_);
    const Cell& c = cells_[i + nx_ * j];
    if (!c.refined) return c.gamma;
    const double sx = (x - i * hx_) / (hx_ / n_sub_);
    const double sy = (y - j * hy_) / (hy_ / n_sub_);
    const int si = cell_index(sx, n_sub_);
    const int sj = cell_index(sy, n_sub_);
    return c.sub[si + n_sub_ * sj];
}

double MaterialGrid::level0_value(int i, int j) const {
    const Cell& c = cells_[i + nx_ * j];
    if (c.refined) throw std::logic_error("level0_value: cell is refined");
    return c.gamma;
}

void MaterialGrid::set_all(double gamma) {
    for (Cell& c : cells_) {
        c.gamma = gamma;
        std::fill(c.sub.begin(), c.sub.end(), gamma);
    }
}

void MaterialGrid::set_values(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != num_voxels())
        throw std::invalid_argument("set_values: size mismatch");
    size_t k = 0;
    for (Cell& c : cells_) {
        if (c.refined)
            for (double& g : c.sub) g = values[k++];
        else
            c.gamma = values[k++];
    }
}

std::vector<double> MaterialGrid::values() const {
    std::vector<double> out;
    out.reserve(num_voxels());
    for (const Cell& c : cells_) {
        if (c.refined)
            out.insert(out.end(), c.sub.begin(), c.sub.end());
        else
            out.push_back(c.gamma);
    }
    return out;
}

std::vector<VoxelMid> MaterialGrid::voxel_midpoints() const {
    std::vector<VoxelMid> out;
    out.reserve(num_voxels());
    int id = 0;
    const double shx = hx_ / n_sub_, shy = hy_ / n_sub_;
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const Cell& c = cells_[i + nx_ * j];
            if (!c.refined) {
                out.push_back({id++, 0, (i + 0.5) * hx_, (j + 0.5) * hy_, hx_ * hy_});
            } else {
                for (int sj = 0; sj < n_sub_; ++sj)
                    for (int si = 0; si < n_sub_; ++si)
                        out.push_back({id++, 1, i * hx_ + (si + 0.5) * shx,
                                       j * hy_ + (sj + 0.5) * shy, shx * shy});
            }
        }
    }
    return out;
}

std::vector<VoxelRef> MaterialGrid::voxels_in_span(const Box& span) const {
    // Span boundaries align with level-0 voxel boundaries by construction.
    std::vector<VoxelRef> out;
    const int i0 = std::clamp(static_cast<int>(std::lround(span.x0 / hx_)), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::lround(span.y0 / hy_)), 0, ny_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::lround(span.x1 / hx_)) - 1, 0, nx_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::lround(span.y1 / hy_)) - 1, 0, ny_ - 1);

    const double shx = hx_ / n_sub_, shy = hy_ / n_sub_;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const int lin = i + nx_ * j;
            const int id = id_offset_[lin];
            const Cell& c = cells_[lin];
            if (!c.refined) {
                out.push_back({id, {i * hx_, j * hy_, (i + 1) * hx_, (j + 1) * hy_}});
            } else {
                for (int sj = 0; sj < n_sub_; ++sj)
                    for (int si = 0; si < n_sub_; ++si)
                        out.push_back({id + si + n_sub_ * sj,
                                       {i * hx_ + si * shx, j * hy_ + sj * shy,
                                        i * hx_ + (si + 1) * shx, j * hy_ + (sj + 1) * shy}});
            }
        }
    }
    return out;
}

IndicatorField MaterialGrid::compute_indicator() const {
    if (has_refinement())
        throw std::logic_error("compute_indicator: grid is already refined");
    IndicatorField ind;
    ind.nx = nx_;
    ind.ny = ny_;
    ind.eta.assign(cells_.size(), 0.0);
    auto value = [&](int i, int j) { return cells_[i + nx_ * j].gamma; };
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const double g = value(i, j);
            // Missing neighbors at the domain boundary contribute jump 0.
            const double jr = (i + 1 < nx_) ? std::abs(value(i + 1, j) - g) : 0.0;
            const double jl = (i - 1 >= 0) ? std::abs(g - value(i - 1, j)) : 0.0;
            const double jo = (j + 1 < ny_) ? std::abs(value(i, j + 1) - g) : 0.0;
            const double ju = (j - 1 >= 0) ? std::abs(g - value(i, j - 1)) : 0.0;
            const double gx = (jr + jl) / (2.0 * hx_);
            const double gy = (jo + ju) / (2.0 * hy_);
            ind.eta[i + nx_ * j] = std::hypot(gx, gy);
        }
    }
    return ind;
}

bool MaterialGrid::select_and_refine(const IndicatorField& ind, double tau_fraction,
                                     int n_layers, RefineStrategy strategy) {
    if (ind.nx != nx_ || ind.ny != ny_)
        throw std::invalid_argument("select_and_refine: indicator shape mismatch");
    const double max_eta = ind.max_eta();
    mask_.assign(cells_.size(), false);
    if (max_eta <= 0.0)
        return false; // nothing to refine

    const double tau = tau_fraction * max_eta;
    for (size_t k = 0; k < cells_.size(); ++k)
        mask_[k] = ind.eta[k] >= tau;

    // Dilate by n_layers of the 8-neighborhood.
    for (int layer = 0; layer < n_layers; ++layer) {
        std::vector<bool> grown = mask_;
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                if (mask_[i + nx_ * j]) continue;
                bool near = false;
                for (int dj = -1; dj <= 1 && !near; ++dj)
                    for (int di = -1; di <= 1 && !near; ++di) {
                        const int ii = i + di, jj = j + dj;
                        if (ii >= 0 && ii < nx_ && jj >= 0 && jj < ny_ && mask_[ii + nx_ * jj])
                            near = true;
                    }
                grown[i + nx_ * j] = near;
            }
        mask_ = grown;
    }

    for (size_t k = 0; k < cells_.size(); ++k) {
        if (!mask_[k]) continue;
        Cell& c = cells_[k];
        c.refined = true;
        c.sub.assign(static_cast<size_t>(n_sub_) * n_sub_, c.gamma);
        ++n_refined_;
    }
    rebuild_offsets();
    if (strategy == RefineStrategy::restart)
        set_all(1.0);
    return true;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void MaterialGrid::write_grid_file(std::ostream& os) const {
    os.precision(17);
    os << "level0 " << nx_ << " " << ny_ << " " << hx_ << " " << hy_ << "\n";
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const Cell& c = cells_[i + nx_ * j];
            os << (c.refined ? 1.0 : c.gamma) << (i + 1 < nx_ ? ' ' : '\n');
        }
    }
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            const Cell& c = cells_[i + nx_ * j];
            if (!c.refined) continue;
            os << "sub " << i << " " << j << " " << n_sub_ << "\n";
            for (int sj = 0; sj < n_sub_; ++sj)
                for (int si = 0; si < n_sub_; ++si)
                    os << c.sub[si + n_sub_ * sj] << (si + 1 < n_sub_ ? ' ' : '\n');
        }
}

MaterialGrid MaterialGrid::read_grid_file(std::istream& is) {
    std::string tag;
    int nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;
    if (!(is >> tag >> nx >> ny >> hx >> hy) || tag != "level0")
        throw std::runtime_error("grid file: bad header");
    std::vector<double> level0(static_cast<size_t>(nx) * ny);
    for (double& v : level0)
        if (!(is >> v)) throw std::runtime_error("grid file: truncated level-0 block");

    struct SubBlock {
        int i, j;
        std::vector<double> vals;
    };
    std::vector<SubBlock> subs;
    int n_sub = 4;
    while (is >> tag) {
        if (tag != "sub") throw std::runtime_error("grid file: unexpected token " + tag);
        SubBlock b;
        int ns = 0;
        if (!(is >> b.i >> b.j >> ns)) throw std::runtime_error("grid file: bad sub header");
        n_sub = ns;
        b.vals.resize(static_cast<size_t>(ns) * ns);
        for (double& v : b.vals)
            if (!(is >> v)) throw std::runtime_error("grid file: truncated sub block");
        subs.push_back(std::move(b));
    }

    MaterialGrid g(nx, ny, hx, hy, n_sub);
    for (size_t k = 0; k < level0.size(); ++k) g.cells_[k].gamma = level0[k];
    for (const SubBlock& b : subs) {
        Cell& c = g.cells_[b.i + nx * b.j];
        c.refined = true;
        c.sub = b.vals;
        ++g.n_refined_;
    }
    g.rebuild_offsets();
    return g;
}

void MaterialGrid::write_midpoint_csv(std::ostream& os) const {
    os.precision(17);
    os << "x_mid,y_mid,gamma\n";
    const auto mids = voxel_midpoints();
    const auto vals = values();
    for (size_t k = 0; k < mids.size(); ++k)
        os << mids[k].x << "," << mids[k].y << "," << vals[k] << "\n";
}

} // namespace igafwi
