//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igafwi/config.hpp"

using namespace igafwi;

namespace {

const char* kDemo = R"(
# demo configuration
[domain]
length_x_mm = 10
length_y_mm = 5
rho0_kg_per_m3 = 2700
c0_mm_per_us = 6
eps_fict = 1e-6
shape = circle role=fictitious cx_mm=3.5 cy_mm=2.0 r_mm=0.75
shape = below_spline role=fictitious pts_mm=0,1;5,0.5;10,1
shape = ellipse role=true_defect cx_mm=6.3 cy_mm=1.8 a_mm=0.6 b_mm=0.1 angle_deg=67.5

[sources]
source_line = n=3 spacing_mm=2 cx_mm=5 y_mm=4.5
sigma_x_mm = 0.25
sigma_y_mm = 0.25
f_mhz = 0.5

[discretization]
degree = 3
spans_x = 20
spans_y = 10
mass = lumped
n_voxels_per_span = 2
t_max_us = 12
n_steps = 900

[inversion]
strategy = warm-start
iters_stage1 = 4
search_window_mm = 2,0,9,4
kernel_sampling = quadrature

[output]
dir = /tmp/igafwi_demo
threads = 1
seed = 42
)";

} // namespace

TEST_CASE("parse: fields, shapes, line generator, FMC default") {
    const RunConfig cfg = parse_config_text(kDemo);
    const ExperimentConfig& e = cfg.experiment;
    CHECK(e.length_x == 10.0);
    CHECK(e.rho0 == 2700.0);
    CHECK(e.c0 == 6.0);
    CHECK(e.eps_fict == 1e-6);
    REQUIRE(e.shapes.size() == 3);
    CHECK(e.shapes[0].kind == ShapeRecord::Kind::circle);
    CHECK(e.shapes[1].kind == ShapeRecord::Kind::below_spline);
    CHECK(e.shapes[1].points.size() == 3);
    CHECK(e.shapes[2].role == ShapeRecord::Role::true_defect);
    CHECK(e.shapes[2].angle_deg == 67.5);

    REQUIRE(e.sources.size() == 3);
    CHECK(e.sources[0].x == doctest::Approx(3.0));
    CHECK(e.sources[2].x == doctest::Approx(7.0));
    CHECK(e.sources[1].y == doctest::Approx(4.5));
    // Receivers default to the source positions (full matrix capture).
    REQUIRE(e.receivers.size() == 3);
    CHECK(e.receivers[1].x == e.sources[1].x);

    CHECK(e.degree == 3);
    CHECK(e.mass == MassMode::lumped);
    CHECK(e.n_voxels_per_span == 2);
    CHECK(e.strategy == RefineStrategy::warm_start);
    CHECK(e.iters_stage1 == 4);
    REQUIRE(e.search_window.has_value());
    CHECK(e.search_window->x1 == 9.0);
    CHECK(e.kernel_sampling == KernelSampling::quadrature);
    CHECK(cfg.output_dir == "/tmp/igafwi_demo");
    CHECK(e.seed == 42u);
}

TEST_CASE("round trip is the identity") {
    const RunConfig a = parse_config_text(kDemo);
    const RunConfig b = parse_config_text(serialize_config(a));
    CHECK(serialize_config(a) == serialize_config(b));
    CHECK(a.experiment.sources.size() == b.experiment.sources.size());
    CHECK(a.experiment.shapes.size() == b.experiment.shapes.size());
    CHECK(a.experiment.search_window->y1 == b.experiment.search_window->y1);
}

TEST_CASE("unknown keys and sections are fatal") {
    CHECK_THROWS_AS(parse_config_text("[domain]\nlenght_x_mm = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[domian]\nlength_x_mm = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("length_x_mm = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[domain]\nshape = blob role=physical\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[domain]\nshape = circle cx_mm=1 cy_mm=1 r_mm=1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[domain]\neps_fict = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[discretization]\ndegree = x\n"), ConfigError);
}

TEST_CASE("set overrides: applied after parsing, distinct keys independent") {
    RunConfig a = parse_config_text(kDemo);
    apply_overrides(a, {"discretization.degree=2", "inversion.strategy=restart"});
    CHECK(a.experiment.degree == 2);
    CHECK(a.experiment.strategy == RefineStrategy::restart);

    RunConfig b = parse_config_text(kDemo);
    apply_overrides(b, {"inversion.strategy=restart", "discretization.degree=2"});
    CHECK(serialize_config(a) == serialize_config(b));

    // Overriding a repeatable key replaces the accumulated list.
    RunConfig c = parse_config_text(kDemo);
    apply_overrides(c, {"sources.source_mm=1.0,4.0"});
    CHECK(c.experiment.sources.size() == 1);

    RunConfig d = parse_config_text(kDemo);
    CHECK_THROWS_AS(apply_overrides(d, {"degree=2"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(d, {"discretization.degree"}), ConfigError);
}

TEST_CASE("study mapping") {
    RunConfig cfg = parse_config_text(kDemo);
    apply_overrides(cfg, {"discretization.study_degrees=2,3",
                          "discretization.study_masses=consistent",
                          "discretization.study_span_sizes_mm=0.5,0.25",
                          "discretization.study_ref_degree=4",
                          "discretization.eval_window_mm=7,0,10,5"});
    const StudyConfig st = cfg.study();
    CHECK(st.degrees == std::vector<int>{2, 3});
    CHECK(st.masses.size() == 1);
    CHECK(st.masses[0] == MassMode::consistent);
    CHECK(st.span_sizes == std::vector<double>{0.5, 0.25});
    CHECK(st.ref_degree == 4);
    CHECK(st.eval_window.x0 == 7.0);
}

TEST_CASE("validation catches out-of-domain sources") {
    CHECK_THROWS_AS(parse_config_text("[domain]\nlength_x_mm = 10\nlength_y_mm = 5\n"
                                      "[sources]\nsource_mm = 12,1\n"),
                    ConfigError);
}
