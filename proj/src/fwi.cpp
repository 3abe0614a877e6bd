//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/fwi.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "igafwi/errors.hpp"

namespace igafwi {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace

ShapePtr build_shape(const ShapeRecord& rec) {
    switch (rec.kind) {
    case ShapeRecord::Kind::circle:
        return make_circle(rec.center, rec.radius);
    case ShapeRecord::Kind::ellipse:
        return make_ellipse(rec.center, rec.semi_a, rec.semi_b,
                            rec.angle_deg * M_PI / 180.0);
    case ShapeRecord::Kind::box:
        return make_box_shape(rec.lo, rec.hi);
    case ShapeRecord::Kind::below_spline:
        return make_below_spline(rec.points);
    }
    throw std::logic_error("build_shape: unknown kind");
}

AlphaField build_alpha(const std::vector<ShapeRecord>& shapes, double eps_fict,
                       bool include_defects) {
    ShapePtr physical;
    ShapePtr removed;
    for (const ShapeRecord& rec : shapes) {
        if (rec.role == ShapeRecord::Role::physical) {
            ShapePtr s = build_shape(rec);
            physical = physical ? shape_intersection(physical, s) : s;
        } else if (rec.role == ShapeRecord::Role::fictitious ||
                   (include_defects && rec.role == ShapeRecord::Role::true_defect)) {
            ShapePtr s = build_shape(rec);
            removed = removed ? shape_union(removed, s) : s;
        }
    }
    if (!physical) physical = make_everything();
    if (removed) physical = shape_intersection(physical, shape_complement(removed));
    return {physical, eps_fict};
}

TensorBasis make_basis(const ExperimentConfig& cfg) {
    return make_basis(cfg, cfg.spans_x, cfg.spans_y, cfg.degree);
}

TensorBasis make_basis(const ExperimentConfig& cfg, int spans_x, int spans_y, int degree) {
    return {open_knot_vector(spans_x, degree, cfg.length_x),
            open_knot_vector(spans_y, degree, cfg.length_y)};
}

TimeGrid resolve_time_grid(const ExperimentConfig& cfg, const WaveSystem& system,
                           MassMode mode) {
    TimeGrid grid{cfg.t_max, cfg.n_steps};
    if (!cfg.auto_dt) return grid;
    const double dtc = critical_dt(system, mode);
    const double dt_stable = cfg.dt_safety * dtc;
    if (grid.dt() > dt_stable)
        grid.n_steps = static_cast<int>(std::ceil(cfg.t_max / dt_stable));
    return grid;
}

namespace {

std::vector<Footprint> receiver_footprints(const TensorBasis& basis,
                                           const std::vector<Point>& receivers) {
    std::vector<Footprint> fps;
    fps.reserve(receivers.size());
    for (const Point& r : receivers) fps.push_back(tensor_footprint(basis, r.x, r.y));
    return fps;
}

} // namespace

// ---------------------------------------------------------------------------
// Reference-data synthesis
// ---------------------------------------------------------------------------

TraceSet synthesize_reference(const ExperimentConfig& cfg, const std::string& outdir) {
    const int f = std::max(1, cfg.synth_oversampling);
    const int degree = cfg.degree + std::max(0, cfg.synth_degree_increment);
    const TensorBasis basis = make_basis(cfg, cfg.spans_x * f, cfg.spans_y * f, degree);
    const AlphaField alpha = build_alpha(cfg.shapes, cfg.eps_fict, /*include_defects=*/true);
    MaterialGrid grid(basis.kx.num_spans(), basis.ky.num_spans(),
                      basis.kx.span_size(), basis.ky.span_size(), cfg.n_sub_voxels);

    const IntegrationConfig integ{cfg.quadtree_depth, cfg.gauss_order};
    const SpanQuadrature quad(basis, alpha, grid, integ);
    WaveSystem sys = assemble(basis, alpha, grid, cfg.rho0, cfg.c0, quad,
                              MassMode::consistent);
    ExperimentConfig scaled = cfg;
    scaled.n_steps = cfg.n_steps * f;
    const TimeGrid tg = resolve_time_grid(scaled, sys, MassMode::consistent);

    const auto rec_fps = receiver_footprints(basis, cfg.receivers);
    auto signal = [&](double t) { return burst(t, cfg.frequency, cfg.envelope_exponent); };

    TraceSet traces;
    traces.receivers = cfg.receivers;
    traces.dt = tg.dt();
    for (size_t s = 0; s < cfg.sources.size(); ++s) {
        sys.F_spatial = spatial_source(
            basis, {cfg.sources[s], cfg.sigma_x, cfg.sigma_y, cfg.frequency,
                    cfg.envelope_exponent},
            quad);
        auto [hist, tr] = cdm_run(sys, MassMode::consistent, tg, signal, rec_fps,
                                  /*stride=*/tg.n_steps, /*store_history=*/false);
        traces.per_source.push_back(std::move(tr));
    }

    if (!outdir.empty()) {
        std::filesystem::create_directories(outdir);
        for (int s = 0; s < traces.n_sources(); ++s) {
            std::ofstream os(outdir + "/traces_s" + std::to_string(s) + ".csv");
            write_traces_csv(os, traces.per_source[s], traces.dt);
        }
    }
    return traces;
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

namespace {

// Everything that stays fixed during one refinement stage.
struct StageContext {
    const ExperimentConfig* cfg = nullptr;
    const TensorBasis* basis = nullptr;
    const AlphaField* alpha = nullptr;
    MaterialGrid* grid = nullptr;
    const TraceSet* reference = nullptr;
    std::unique_ptr<SpanQuadrature> quad;
    std::vector<Eigen::VectorXd> source_vectors;
    std::vector<Footprint> rec_fps;
    std::vector<VoxelMid> mids;
    std::vector<int> active; // optimizable voxel ids
    TimeGrid tg;
    PhaseTimings* timings = nullptr;
    int* gradient_evals = nullptr;
};

StageContext make_stage(const ExperimentConfig& cfg, const TensorBasis& basis,
                        const AlphaField& alpha, MaterialGrid& grid,
                        const TraceSet& reference, PhaseTimings& timings,
                        int& gradient_evals) {
    StageContext ctx;
    ctx.cfg = &cfg;
    ctx.basis = &basis;
    ctx.alpha = &alpha;
    ctx.grid = &grid;
    ctx.reference = &reference;
    ctx.timings = &timings;
    ctx.gradient_evals = &gradient_evals;

    Stopwatch sw;
    const IntegrationConfig integ{cfg.quadtree_depth, cfg.gauss_order};
    ctx.quad = std::make_unique<SpanQuadrature>(basis, alpha, grid, integ);
    timings.assembly += sw.seconds();

    ctx.rec_fps = receiver_footprints(basis, cfg.receivers);
    for (const Point& s : cfg.sources)
        ctx.source_vectors.push_back(spatial_source(
            basis, {s, cfg.sigma_x, cfg.sigma_y, cfg.frequency, cfg.envelope_exponent},
            *ctx.quad));

    ctx.mids = grid.voxel_midpoints();
    for (const VoxelMid& m : ctx.mids) {
        if (alpha.alpha(m.x, m.y) != 1.0) continue;
        if (cfg.search_window) {
            const Box& w = *cfg.search_window;
            if (m.x < w.x0 || m.x > w.x1 || m.y < w.y0 || m.y > w.y1) continue;
        }
        ctx.active.push_back(m.id);
    }

    // Time grid is frozen per stage at the stage's starting material.
    WaveSystem sys0 = assemble(basis, alpha, grid, cfg.rho0, cfg.c0, *ctx.quad, cfg.mass);
    ctx.tg = resolve_time_grid(cfg, sys0, cfg.mass);
    return ctx;
}

struct Evaluation {
    double chi = 0.0;
    Eigen::VectorXd grad;
};

Evaluation evaluate(StageContext& ctx, const Eigen::VectorXd& x) {
    const ExperimentConfig& cfg = *ctx.cfg;

    // Scatter the optimization vector into the material grid (frozen
    // voxels stay at their current values, i.e. 1).
    std::vector<double> vals = ctx.grid->values();
    for (size_t i = 0; i < ctx.active.size(); ++i)
        vals[ctx.active[i]] = x[static_cast<Eigen::Index>(i)];
    ctx.grid->set_values(vals);

    Stopwatch sw_a;
    WaveSystem sys = assemble(*ctx.basis, *ctx.alpha, *ctx.grid, cfg.rho0, cfg.c0,
                              *ctx.quad, cfg.mass);
    ctx.timings->assembly += sw_a.seconds();

    auto signal = [&](double t) { return burst(t, cfg.frequency, cfg.envelope_exponent); };

    Stopwatch sw_f;
    std::vector<WaveHistory> fwd;
    TraceSet sim;
    sim.receivers = cfg.receivers;
    sim.dt = ctx.tg.dt();
    for (size_t s = 0; s < cfg.sources.size(); ++s) {
        sys.F_spatial = ctx.source_vectors[s];
        auto [hist, tr] =
            cdm_run(sys, cfg.mass, ctx.tg, signal, ctx.rec_fps, cfg.history_stride, true);
        fwd.push_back(std::move(hist));
        sim.per_source.push_back(std::move(tr));
    }
    ctx.timings->forward += sw_f.seconds();

    Misfit mf = misfit(sim, *ctx.reference);

    // The kernel equals dchi/dgamma when the adjoint load is the negated
    // residual carrying the misfit's trapezoid end weights.
    Stopwatch sw_b;
    std::vector<WaveHistory> adj;
    for (size_t s = 0; s < cfg.sources.size(); ++s) {
        Eigen::MatrixXd load = -mf.residuals[s];
        load.col(0) *= 0.5;
        load.col(load.cols() - 1) *= 0.5;
        adj.push_back(adjoint_run(sys, cfg.mass, ctx.tg, ctx.rec_fps, load,
                                  cfg.history_stride));
    }
    ctx.timings->adjoint += sw_b.seconds();

    Stopwatch sw_g;
    const KernelConfig kcfg{cfg.rho0, cfg.c0, cfg.kernel_area_weighting,
                            cfg.kernel_sampling};
    VoxelGradient vg = gradient(fwd, adj, *ctx.basis, ctx.mids, *ctx.alpha, kcfg,
                                ctx.quad.get());
    Evaluation ev;
    ev.chi = mf.chi;
    ev.grad.resize(static_cast<Eigen::Index>(ctx.active.size()));
    for (size_t i = 0; i < ctx.active.size(); ++i)
        ev.grad[static_cast<Eigen::Index>(i)] = vg.values[ctx.active[i]];
    ctx.timings->gradient += sw_g.seconds();
    ++(*ctx.gradient_evals);
    return ev;
}

StageReport run_stage(StageContext& ctx, int max_iters) {
    const ExperimentConfig& cfg = *ctx.cfg;
    StageReport report;

    LbfgsOptions opts;
    opts.memory = cfg.lbfgs_memory;
    opts.lower = cfg.gamma_min;
    opts.upper = cfg.gamma_max;
    opts.max_iterations = max_iters;
    opts.tol_projected_gradient = cfg.tol_projected_gradient;
    opts.tol_chi_relative = cfg.tol_chi_relative;
    BoxLbfgs opt(opts);

    BoxLbfgs::Evaluator evaluator = [&](const Eigen::VectorXd& x) {
        Evaluation ev = evaluate(ctx, x);
        return std::make_pair(ev.chi, ev.grad);
    };

    Eigen::VectorXd x(static_cast<Eigen::Index>(ctx.active.size()));
    {
        const std::vector<double> vals = ctx.grid->values();
        for (size_t i = 0; i < ctx.active.size(); ++i)
            x[static_cast<Eigen::Index>(i)] = vals[ctx.active[i]];
    }

    Evaluation ev = evaluate(ctx, x);
    int total_evals = 1;
    while (true) {
        const double pg = opt.projected_gradient_norm(x, ev.grad);
        report.rows.push_back({opt.iteration(), ev.chi, pg, 0.0, total_evals});
        const Converged c = opt.converged(pg);
        if (c.done) {
            report.stop_reason = c.reason;
            break;
        }
        Stopwatch sw_o;
        BoxLbfgs::StepResult res = opt.step(x, ev.chi, ev.grad, evaluator);
        ctx.timings->optimizer += sw_o.seconds();
        total_evals = res.n_evals;
        report.rows.back().step_length = res.step_length;
        if (res.status == StepStatus::no_progress) {
            report.stop_reason = "no-progress";
            break;
        }
        x = res.x;
        ev.chi = res.chi;
        ev.grad = res.grad;
    }

    // Leave the grid holding the final iterate.
    std::vector<double> vals = ctx.grid->values();
    for (size_t i = 0; i < ctx.active.size(); ++i)
        vals[ctx.active[i]] = x[static_cast<Eigen::Index>(i)];
    ctx.grid->set_values(vals);
    return report;
}

} // namespace

InversionReport invert(const ExperimentConfig& cfg, const TraceSet& reference) {
    Stopwatch total;
    const TensorBasis basis = make_basis(cfg);
    const AlphaField alpha = build_alpha(cfg.shapes, cfg.eps_fict, /*include_defects=*/false);

    const int nv = cfg.n_voxels_per_span;
    MaterialGrid grid(cfg.spans_x * nv, cfg.spans_y * nv,
                      basis.kx.span_size() / nv, basis.ky.span_size() / nv,
                      cfg.n_sub_voxels);

    PhaseTimings timings;
    int gradient_evals = 0;

    StageContext ctx1 =
        make_stage(cfg, basis, alpha, grid, reference, timings, gradient_evals);
    StageReport stage1 = run_stage(ctx1, cfg.iters_stage1);
    TimeGrid used_tg = ctx1.tg;
    ctx1.quad.reset();

    InversionReport out{std::move(grid), {}, {}, false, false, timings, used_tg, 0.0, 0};
    out.stages.push_back(stage1);

    if (cfg.enable_refinement && cfg.iters_stage2 > 0) {
        const IndicatorField ind = out.final_gamma.compute_indicator();
        const bool did = out.final_gamma.select_and_refine(ind, cfg.tau_fraction,
                                                           cfg.n_refine_layers, cfg.strategy);
        out.refinement_mask = out.final_gamma.refinement_mask();
        out.refined = did;
        out.nothing_to_refine = !did;
        if (did) {
            StageContext ctx2 = make_stage(cfg, basis, alpha, out.final_gamma, reference,
                                           timings, gradient_evals);
            StageReport stage2 = run_stage(ctx2, cfg.iters_stage2);
            used_tg = ctx2.tg;
            out.stages.push_back(std::move(stage2));
        }
    }

    out.timings = timings;
    out.timings.total = total.seconds();
    out.time_grid = used_tg;
    out.final_chi = out.stages.back().rows.empty() ? 0.0 : out.stages.back().rows.back().chi;
    out.n_gradient_evals = gradient_evals;
    return out;
}

ObjectiveEval evaluate_objective(const ExperimentConfig& cfg, const TraceSet& reference,
                                 const std::vector<double>& gamma_values) {
    const TensorBasis basis = make_basis(cfg);
    const AlphaField alpha = build_alpha(cfg.shapes, cfg.eps_fict, /*include_defects=*/false);
    const int nv = cfg.n_voxels_per_span;
    MaterialGrid grid(cfg.spans_x * nv, cfg.spans_y * nv,
                      basis.kx.span_size() / nv, basis.ky.span_size() / nv,
                      cfg.n_sub_voxels);
    grid.set_values(gamma_values);

    PhaseTimings timings;
    int evals = 0;
    StageContext ctx = make_stage(cfg, basis, alpha, grid, reference, timings, evals);

    Eigen::VectorXd x(static_cast<Eigen::Index>(ctx.active.size()));
    for (size_t i = 0; i < ctx.active.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = gamma_values[ctx.active[i]];
    const Evaluation ev = evaluate(ctx, x);

    ObjectiveEval out;
    out.chi = ev.chi;
    out.gradient.assign(gamma_values.size(), 0.0);
    for (size_t i = 0; i < ctx.active.size(); ++i)
        out.gradient[ctx.active[i]] = ev.grad[static_cast<Eigen::Index>(i)];
    out.active_ids = ctx.active;
    return out;
}

// ---------------------------------------------------------------------------
// Forward convergence study
// ---------------------------------------------------------------------------

Eigen::VectorXd forward_field_at_tmax(const ExperimentConfig& cfg, int spans_x, int spans_y,
                                      int degree, MassMode mode, const Box& window,
                                      int eval_nx, int eval_ny, int* n_steps_used,
                                      double* wall_seconds) {
    Stopwatch sw;
    const TensorBasis basis = make_basis(cfg, spans_x, spans_y, degree);
    const AlphaField alpha = build_alpha(cfg.shapes, cfg.eps_fict, /*include_defects=*/true);
    MaterialGrid grid(spans_x, spans_y, basis.kx.span_size(), basis.ky.span_size(),
                      cfg.n_sub_voxels);
    const IntegrationConfig integ{cfg.quadtree_depth, cfg.gauss_order};
    const SpanQuadrature quad(basis, alpha, grid, integ);
    WaveSystem sys = assemble(basis, alpha, grid, cfg.rho0, cfg.c0, quad, mode);
    sys.F_spatial = spatial_source(
        basis,
        {cfg.sources.at(0), cfg.sigma_x, cfg.sigma_y, cfg.frequency, cfg.envelope_exponent},
        quad);
    const TimeGrid tg = resolve_time_grid(cfg, sys, mode);
    if (n_steps_used) *n_steps_used = tg.n_steps;

    auto signal = [&](double t) { return burst(t, cfg.frequency, cfg.envelope_exponent); };
    auto [hist, traces] = cdm_run(sys, mode, tg, signal, {}, tg.n_steps, true);
    const Eigen::VectorXd& u = hist.final_coeffs();

    Eigen::VectorXd samples(static_cast<Eigen::Index>(eval_nx) * eval_ny);
    Eigen::Index k = 0;
    for (int j = 0; j < eval_ny; ++j) {
        const double y = window.y0 + (eval_ny == 1 ? 0.0 : window.height() * j / (eval_ny - 1));
        for (int i = 0; i < eval_nx; ++i, ++k) {
            const double x =
                window.x0 + (eval_nx == 1 ? 0.0 : window.width() * i / (eval_nx - 1));
            const Footprint fp = tensor_footprint(basis, x, y);
            double v = 0.0;
            for (int a = 0; a < fp.count; ++a) v += fp.values[a] * u[fp.dofs[a]];
            samples[k] = v;
        }
    }
    if (wall_seconds) *wall_seconds = sw.seconds();
    return samples;
}

StudyResult convergence_study(const StudyConfig& cfg) {
    const double lx = cfg.base.length_x, ly = cfg.base.length_y;
    auto spans_of = [&](double h) {
        return std::pair<int, int>{static_cast<int>(std::lround(lx / h)),
                                   static_cast<int>(std::lround(ly / h))};
    };

    const auto [rsx, rsy] = spans_of(cfg.ref_span_size);
    const Eigen::VectorXd u_ref =
        forward_field_at_tmax(cfg.base, rsx, rsy, cfg.ref_degree, MassMode::consistent,
                              cfg.eval_window, cfg.eval_nx, cfg.eval_ny);
    const double ref_norm = u_ref.norm();
    if (!(ref_norm > 0.0))
        throw NumericalError("convergence_study: reference field is identically zero");

    StudyResult out;
    for (MassMode mass : cfg.masses) {
        for (int p : cfg.degrees) {
            for (double h : cfg.span_sizes) {
                const auto [sx, sy] = spans_of(h);
                int nt = 0;
                double wall = 0.0;
                const Eigen::VectorXd u =
                    forward_field_at_tmax(cfg.base, sx, sy, p, mass, cfg.eval_window,
                                          cfg.eval_nx, cfg.eval_ny, &nt, &wall);
                const double eps = (u - u_ref).norm() / ref_norm;
                out.rows.push_back({p, mass, h, eps, nt, wall});
            }
            // log-log slope over the three finest meshes
            std::vector<std::pair<double, double>> pts;
            for (const StudyRow& r : out.rows)
                if (r.degree == p && r.mass == mass) pts.push_back({r.h, r.error});
            std::sort(pts.begin(), pts.end());
            const int use = std::min<int>(3, static_cast<int>(pts.size()));
            double sx_ = 0, sy_ = 0, sxx = 0, sxy = 0;
            for (int i = 0; i < use; ++i) {
                const double X = std::log(pts[i].first), Y = std::log(pts[i].second);
                sx_ += X;
                sy_ += Y;
                sxx += X * X;
                sxy += X * Y;
            }
            const double slope = (use * sxy - sx_ * sy_) / (use * sxx - sx_ * sx_);
            out.slopes.push_back({p, mass, slope});
        }
    }
    return out;
}

} // namespace igafwi
