//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "igafwi/fwi.hpp"

using namespace igafwi;

namespace {

ExperimentConfig tiny_experiment(bool with_defect) {
    ExperimentConfig cfg;
    cfg.length_x = 8.0;
    cfg.length_y = 4.0;
    if (with_defect) {
        ShapeRecord d;
        d.kind = ShapeRecord::Kind::circle;
        d.role = ShapeRecord::Role::true_defect;
        d.center = {5.0, 2.0};
        d.radius = 0.9;
        cfg.shapes.push_back(d);
    }
    cfg.sources = {{2.0, 3.5}, {6.0, 3.5}};
    cfg.receivers = {{2.0, 3.5}, {4.0, 3.5}, {6.0, 3.5}};
    cfg.sigma_x = cfg.sigma_y = 0.4;
    cfg.frequency = 0.5;
    cfg.degree = 2;
    cfg.spans_x = 16;
    cfg.spans_y = 8;
    cfg.quadtree_depth = 3;
    cfg.n_voxels_per_span = 1;
    cfg.n_sub_voxels = 2;
    cfg.t_max = 8.0;
    cfg.n_steps = 400;
    cfg.auto_dt = false;
    cfg.synth_oversampling = 1;
    cfg.synth_degree_increment = 0;
    cfg.iters_stage1 = 2;
    cfg.iters_stage2 = 2;
    return cfg;
}

} // namespace

TEST_CASE("synthesize: self-consistency without defects") {
    const ExperimentConfig cfg = tiny_experiment(false);
    const TraceSet ref = synthesize_reference(cfg, "");
    CHECK(ref.n_sources() == 2);
    CHECK(ref.n_receivers() == 3);

    // The homogeneous model run through the identical pipeline reproduces
    // the reference exactly.
    std::vector<double> gamma(cfg.spans_x * cfg.spans_y, 1.0);
    const ObjectiveEval ev = evaluate_objective(cfg, ref, gamma);
    CHECK(ev.chi < 1e-20);
}

TEST_CASE("synthesize: defect produces nonzero misfit and trace files") {
    const ExperimentConfig cfg = tiny_experiment(true);
    const auto dir = std::filesystem::temp_directory_path() / "igafwi_synth_test";
    std::filesystem::remove_all(dir);
    const TraceSet ref = synthesize_reference(cfg, dir.string());
    for (int s = 0; s < 2; ++s)
        CHECK(std::filesystem::exists(dir / ("traces_s" + std::to_string(s) + ".csv")));
    std::filesystem::remove_all(dir);

    std::vector<double> gamma(cfg.spans_x * cfg.spans_y, 1.0);
    CHECK(evaluate_objective(cfg, ref, gamma).chi > 0.0);
}

TEST_CASE("invert: homogeneous truth stops immediately with nothing to refine") {
    const ExperimentConfig cfg = tiny_experiment(false);
    const TraceSet ref = synthesize_reference(cfg, "");
    const InversionReport rep = invert(cfg, ref);
    CHECK(rep.stages.size() == 1);
    CHECK(rep.stages[0].rows.front().chi < 1e-20);
    CHECK(rep.stages[0].stop_reason == "stationary");
    CHECK(rep.nothing_to_refine);
    CHECK(!rep.refined);
    for (double g : rep.final_gamma.values()) CHECK(g == 1.0);
}

TEST_CASE("invert: defect reduces the misfit and refines around it") {
    ExperimentConfig cfg = tiny_experiment(true);
    cfg.synth_oversampling = 2;
    cfg.synth_degree_increment = 1;
    const TraceSet ref = synthesize_reference(cfg, "");
    const InversionReport rep = invert(cfg, ref);

    REQUIRE(!rep.stages.empty());
    const double chi0 = rep.stages[0].rows.front().chi;
    CHECK(chi0 > 0.0);
    CHECK(rep.final_chi < chi0);
    // chi is non-increasing within each stage.
    for (const StageReport& st : rep.stages)
        for (size_t i = 1; i < st.rows.size(); ++i)
            CHECK(st.rows[i].chi <= st.rows[i - 1].chi + 1e-18);
    CHECK(rep.refined);
    CHECK(rep.final_gamma.has_refinement());
    CHECK(rep.n_gradient_evals > 0);
    CHECK(rep.timings.forward > 0.0);
}

TEST_CASE("invert: determinism of repeated runs") {
    ExperimentConfig cfg = tiny_experiment(true);
    const TraceSet ref = synthesize_reference(cfg, "");
    const InversionReport a = invert(cfg, ref);
    const InversionReport b = invert(cfg, ref);
    REQUIRE(a.stages.size() == b.stages.size());
    for (size_t s = 0; s < a.stages.size(); ++s) {
        REQUIRE(a.stages[s].rows.size() == b.stages[s].rows.size());
        for (size_t i = 0; i < a.stages[s].rows.size(); ++i)
            CHECK(a.stages[s].rows[i].chi == b.stages[s].rows[i].chi);
    }
    const auto va = a.final_gamma.values(), vb = b.final_gamma.values();
    REQUIRE(va.size() == vb.size());
    for (size_t k = 0; k < va.size(); ++k) CHECK(va[k] == vb[k]);
}

TEST_CASE("search window freezes material outside the box") {
    ExperimentConfig cfg = tiny_experiment(true);
    cfg.search_window = Box{3.0, 0.5, 7.0, 3.5};
    const TraceSet ref = synthesize_reference(cfg, "");
    cfg.iters_stage1 = 2;
    cfg.enable_refinement = false;
    const InversionReport rep = invert(cfg, ref);
    const auto mids = rep.final_gamma.voxel_midpoints();
    const auto vals = rep.final_gamma.values();
    bool touched_inside = false;
    for (size_t k = 0; k < mids.size(); ++k) {
        const bool in = mids[k].x >= 3.0 && mids[k].x <= 7.0 && mids[k].y >= 0.5 &&
                        mids[k].y <= 3.5;
        if (!in)
            CHECK(vals[k] == 1.0);
        else if (vals[k] != 1.0)
            touched_inside = true;
    }
    CHECK(touched_inside);
}

TEST_CASE("convergence study: identical settings give zero error") {
    StudyConfig st;
    st.base = tiny_experiment(true);
    st.base.sources = {{2.0, 3.5}};
    st.base.auto_dt = true;
    st.base.n_steps = 400;
    st.base.quadtree_depth = 5;
    st.degrees = {2};
    st.masses = {MassMode::consistent};
    st.span_sizes = {0.5};
    st.ref_span_size = 0.5;
    st.ref_degree = 2;
    st.eval_window = {5.0, 0.0, 8.0, 4.0};
    st.eval_nx = 31;
    st.eval_ny = 41;
    const StudyResult res = convergence_study(st);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].error == 0.0);
}

TEST_CASE("convergence study: errors drop with mesh refinement") {
    StudyConfig st;
    st.base = tiny_experiment(true);
    st.base.sources = {{2.0, 3.5}};
    st.base.auto_dt = true;
    st.base.n_steps = 800;
    st.base.t_max = 6.0;
    st.base.quadtree_depth = 5;
    st.degrees = {1, 2};
    st.masses = {MassMode::consistent};
    st.span_sizes = {1.0, 0.5, 0.25};
    st.ref_span_size = 0.125;
    st.ref_degree = 3;
    st.eval_window = {5.0, 0.0, 8.0, 4.0};
    st.eval_nx = 31;
    st.eval_ny = 41;
    const StudyResult res = convergence_study(st);
    REQUIRE(res.rows.size() == 6);
    REQUIRE(res.slopes.size() == 2);
    for (const StudySlope& s : res.slopes) {
        MESSAGE("p = ", s.degree, " slope = ", s.slope);
        CHECK(s.slope > 1.0);
    }
    // Errors decrease from coarsest to finest within each family.
    for (int p : {1, 2}) {
        std::vector<double> errs;
        for (const StudyRow& r : res.rows)
            if (r.degree == p) errs.push_back(r.error);
        CHECK(errs.front() > errs.back());
    }
}
