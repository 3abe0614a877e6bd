//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "igafwi/geometry.hpp"

namespace igafwi {

/// Midpoint and extent of one active voxel, in canonical enumeration order.
struct VoxelMid {
    int id = 0;
    int level = 0;
    double x = 0.0;
    double y = 0.0;
    double area = 0.0;
};

/// Per level-0 voxel sharpness indicator (units 1/length).
struct IndicatorField {
    int nx = 0;
    int ny = 0;
    std::vector<double> eta; // row-major, x fastest

    double max_eta() const;
    double at(int i, int j) const { return eta[i + nx * j]; }
};

enum class RefineStrategy { warm_start, restart };

/// Voxelized material field gamma on the extended domain. Level-0 voxels
/// tile the domain; a level-0 cell may be replaced by n_sub^2 level-1
/// sub-voxels (single refinement event, two levels total).
///
/// Canonical voxel enumeration: level-0 cells row-major (x fastest); a
/// refined cell contributes its sub-voxels row-major in place of itself.
/// The enumeration defines voxel ids used by midpoints and gradients.
class MaterialGrid {
public:
    /// Uniform level-0 grid of nx x ny voxels of size (hx, hy), gamma = 1.
    MaterialGrid(int nx, int ny, double hx, double hy, int n_sub);

    int nx0() const { return nx_; }
    int ny0() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    int n_sub() const { return n_sub_; }
    double domain_x() const { return nx_ * hx_; }
    double domain_y() const { return ny_ * hy_; }
    bool has_refinement() const { return n_refined_ > 0; }
    int num_voxels() const;

    bool is_refined(int i, int j) const { return cells_[i + nx_ * j].refined; }

    /// gamma of the unique active voxel containing the point; ties at voxel
    /// faces resolve to the +x/+y side. Throws std::out_of_range outside
    /// the domain.
    double gamma_at(double x, double y) const;

    /// Value of level-0 cell (i, j); invalid on refined cells.
    double level0_value(int i, int j) const;

    void set_all(double gamma);
    /// Writes gamma values in canonical order; bounds are not enforced here.
    void set_values(const std::vector<double>& values);
    std::vector<double> values() const;

    /// One geometric midpoint per active voxel, canonical order.
    std::vector<VoxelMid> voxel_midpoints() const;

    /// Active voxels overlapping knot span cell [x0,x1]x[y0,y1]; the span
    /// boundaries must align with level-0 voxel boundaries.
    std::vector<VoxelRef> voxels_in_span(const Box& span) const;

    /// Jump-based sharpness indicator on the level-0 grid. Throws
    /// std::logic_error if the grid is already refined.
    IndicatorField compute_indicator() const;

    /// Marks voxels with eta >= tau_fraction * max(eta), dilates the mark
    /// by n_layers of 8-neighborhood, and refines marked cells into
    /// n_sub^2 sub-voxels. Returns false (grid unchanged) when max(eta)
    /// is zero. warm_start inherits parent values; restart resets the
    /// whole field to 1.
    bool select_and_refine(const IndicatorField& ind, double tau_fraction, int n_layers,
                           RefineStrategy strategy);

    /// Level-0 cells marked by the last select_and_refine call.
    const std::vector<bool>& refinement_mask() const { return mask_; }

    void write_grid_file(std::ostream& os) const;
    static MaterialGrid read_grid_file(std::istream& is);
    void write_midpoint_csv(std::ostream& os) const;

private:
    struct Cell {
        bool refined = false;
        double gamma = 1.0;
        std::vector<double> sub; // n_sub^2 values, row-major, when refined
    };

    int cell_index(double xf, int n) const;
    void rebuild_offsets();

    int nx_, ny_;
    double hx_, hy_;
    int n_sub_;
    int n_refined_ = 0;
    std::vector<Cell> cells_;
    std::vector<int> id_offset_; // first voxel id per level-0 cell
    std::vector<bool> mask_;
};

} // namespace igafwi
