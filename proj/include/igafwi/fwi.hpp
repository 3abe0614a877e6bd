//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igafwi/adjoint.hpp"
#include "igafwi/assembly.hpp"
#include "igafwi/dynamics.hpp"
#include "igafwi/material.hpp"
#include "igafwi/optimize.hpp"

namespace igafwi {

/// Primitive geometry record as declared in run configurations.
struct ShapeRecord {
    enum class Kind { circle, ellipse, box, below_spline };
    enum class Role { physical, fictitious, true_defect };

    Kind kind = Kind::circle;
    Role role = Role::fictitious;
    Point center;
    double radius = 0.0;
    double semi_a = 0.0;
    double semi_b = 0.0;
    double angle_deg = 0.0;
    Point lo, hi;               // box
    std::vector<Point> points;  // below_spline interpolation points
};

ShapePtr build_shape(const ShapeRecord& rec);

/// Physical-domain indicator from the shape list: the intersection of the
/// "physical" records (the whole box when none are given) minus the union
/// of the "fictitious" records; true defects are subtracted only when
/// `include_defects` is set (reference-data synthesis).
AlphaField build_alpha(const std::vector<ShapeRecord>& shapes, double eps_fict,
                       bool include_defects);

struct ExperimentConfig {
    // domain
    double length_x = 10.0;
    double length_y = 5.0;
    std::vector<ShapeRecord> shapes;
    double rho0 = 1.0;
    double c0 = 1.0;
    double eps_fict = 1e-8;

    // sources and receivers
    std::vector<Point> sources;
    std::vector<Point> receivers;
    double sigma_x = 0.25;
    double sigma_y = 0.25;
    double frequency = 0.5;
    double envelope_exponent = 2.0;

    // wave-field discretization
    int degree = 2;
    int spans_x = 20;
    int spans_y = 10;
    MassMode mass = MassMode::consistent;
    int quadtree_depth = 4;
    int gauss_order = 0;

    // material grid
    int n_voxels_per_span = 1; // n^v
    int n_sub_voxels = 4;      // n^{v,s}
    int n_refine_layers = 1;   // n^l
    double tau_fraction = 0.5;

    // time integration
    double t_max = 10.0;
    int n_steps = 1000;
    bool auto_dt = true;
    double dt_safety = 0.8;
    int history_stride = 1;

    // inversion
    double gamma_min = 1e-5;
    double gamma_max = 1.0;
    int iters_stage1 = 3;
    int iters_stage2 = 10;
    bool enable_refinement = true;
    RefineStrategy strategy = RefineStrategy::restart;
    std::optional<Box> search_window;
    bool kernel_area_weighting = true;
    KernelSampling kernel_sampling = KernelSampling::midpoint;
    int lbfgs_memory = 10;
    double tol_projected_gradient = 0.0;
    double tol_chi_relative = 0.0;

    // reference-data synthesis
    int synth_oversampling = 2;
    int synth_degree_increment = 1;

    unsigned seed = 1234;
};

TensorBasis make_basis(const ExperimentConfig& cfg);
TensorBasis make_basis(const ExperimentConfig& cfg, int spans_x, int spans_y, int degree);

/// Resolves the run time grid: the requested step count, raised when
/// auto_dt is on and the requested dt exceeds dt_safety * critical dt.
TimeGrid resolve_time_grid(const ExperimentConfig& cfg, const WaveSystem& system,
                           MassMode mode);

struct PhaseTimings {
    double assembly = 0.0;
    double forward = 0.0;
    double adjoint = 0.0;
    double gradient = 0.0;
    double optimizer = 0.0;
    double total = 0.0;
};

struct IterationRow {
    int iter = 0;
    double chi = 0.0;
    double projected_gradient_norm = 0.0;
    double step_length = 0.0;
    int n_evals = 0;
};

struct StageReport {
    std::vector<IterationRow> rows;
    std::string stop_reason;
};

struct InversionReport {
    MaterialGrid final_gamma;
    std::vector<StageReport> stages;
    std::vector<bool> refinement_mask;
    bool refined = false;
    bool nothing_to_refine = false;
    PhaseTimings timings;
    TimeGrid time_grid;
    double final_chi = 0.0;
    int n_gradient_evals = 0;
};

/// Forward runs on the (optionally oversampled) synthesis mesh with the
/// true defects baked into alpha; one trace file per source is written to
/// `outdir` (skipped when empty).
TraceSet synthesize_reference(const ExperimentConfig& cfg, const std::string& outdir);

/// Two-stage multi-resolution inversion: stage-1 optimization on the
/// coarse grid, indicator-driven refinement, stage-2 with warm-start or
/// restart values. Assembly is re-executed for every misfit/gradient
/// evaluation.
InversionReport invert(const ExperimentConfig& cfg, const TraceSet& reference);

/// One misfit and gradient evaluation of the inversion objective at the
/// given material state (level-0 grid, values indexed by voxel id).
/// Gradient entries of frozen voxels are zero.
struct ObjectiveEval {
    double chi = 0.0;
    std::vector<double> gradient;
    std::vector<int> active_ids;
};
ObjectiveEval evaluate_objective(const ExperimentConfig& cfg, const TraceSet& reference,
                                 const std::vector<double>& gamma_values);

// ---------------------------------------------------------------------------
// Forward convergence study
// ---------------------------------------------------------------------------

struct StudyConfig {
    ExperimentConfig base;
    std::vector<int> degrees{2, 3};
    std::vector<MassMode> masses{MassMode::consistent, MassMode::lumped};
    std::vector<double> span_sizes{0.5, 0.25, 0.125, 0.0625};
    double ref_span_size = 0.03125;
    int ref_degree = 4;
    Box eval_window{7.0, 0.0, 10.0, 5.0};
    int eval_nx = 301;
    int eval_ny = 501;
};

struct StudyRow {
    int degree = 0;
    MassMode mass = MassMode::consistent;
    double h = 0.0;
    double error = 0.0;
    int n_steps = 0;
    double wall_seconds = 0.0;
};

struct StudySlope {
    int degree = 0;
    MassMode mass = MassMode::consistent;
    double slope = 0.0; // log-log fit over the finest meshes
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::vector<StudySlope> slopes;
};

/// Runs the mesh family against an overkill reference produced by this
/// same solver on a finer discretization; reports the normalized field
/// error at T_max over the evaluation window and fitted log-log slopes
/// over the three finest meshes.
StudyResult convergence_study(const StudyConfig& cfg);

/// Final-time wave field of a single forward run sampled on the study's
/// evaluation grid.
Eigen::VectorXd forward_field_at_tmax(const ExperimentConfig& cfg, int spans_x, int spans_y,
                                      int degree, MassMode mode, const Box& window,
                                      int eval_nx, int eval_ny, int* n_steps_used = nullptr,
                                      double* wall_seconds = nullptr);

} // namespace igafwi
