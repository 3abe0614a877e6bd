//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "igafwi/dynamics.hpp"
#include "igafwi/errors.hpp"

using namespace igafwi;

namespace {

struct Setup {
    TensorBasis basis;
    AlphaField alpha;
    MaterialGrid grid;
    SpanQuadrature quad;
    WaveSystem sys;

    Setup(int sx, int sy, double lx, double ly, int p, MassMode mode,
          ShapePtr physical = make_everything(), double c0 = 1.0, int depth = 4)
        : basis{open_knot_vector(sx, p, lx), open_knot_vector(sy, p, ly)},
          alpha{std::move(physical), 1e-8},
          grid(sx, sy, lx / sx, ly / sy, 4),
          quad(basis, alpha, grid, IntegrationConfig{depth, 0}),
          sys(assemble(basis, alpha, grid, 1.0, c0, quad, mode)) {}
};

WaveSystem single_dof_system(double m, double k, double f) {
    WaveSystem sys;
    sys.M.resize(1, 1);
    sys.M.insert(0, 0) = m;
    sys.K.resize(1, 1);
    sys.K.insert(0, 0) = k;
    sys.M_lumped = Eigen::VectorXd::Constant(1, m);
    sys.F_spatial = Eigen::VectorXd::Constant(1, f);
    return sys;
}

} // namespace

TEST_CASE("critical dt matches a dense generalized eigensolver") {
    for (MassMode mode : {MassMode::lumped, MassMode::consistent}) {
        Setup s(1, 1, 1.0, 1.0, 1, mode);
        const double dtc = critical_dt(s.sys, mode);
        const Eigen::MatrixXd K(s.sys.K);
        const Eigen::MatrixXd M =
            mode == MassMode::lumped ? Eigen::MatrixXd(s.sys.M_lumped.asDiagonal())
                                     : Eigen::MatrixXd(s.sys.M);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
        const double lmax = es.eigenvalues().maxCoeff();
        CHECK(dtc == doctest::Approx(2.0 / std::sqrt(lmax)).epsilon(1e-6));
    }
}

TEST_CASE("critical dt scalings in wave speed and mesh size") {
    Setup s1(4, 2, 4.0, 2.0, 1, MassMode::lumped);
    Setup s2(4, 2, 4.0, 2.0, 1, MassMode::lumped, make_everything(), 2.0);
    const double d1 = critical_dt(s1.sys, MassMode::lumped);
    const double d2 = critical_dt(s2.sys, MassMode::lumped);
    CHECK(d2 == doctest::Approx(0.5 * d1).epsilon(1e-5));

    Setup fine(8, 4, 4.0, 2.0, 1, MassMode::lumped);
    const double df = critical_dt(fine.sys, MassMode::lumped);
    CHECK(df / d1 > 0.45);
    CHECK(df / d1 < 0.55);
}

TEST_CASE("single-dof update identities") {
    // M = 1, K = 0, f = 1: one step from rest gives u = dt^2.
    WaveSystem sys = single_dof_system(1.0, 0.0, 1.0);
    const TimeGrid tg{1.0, 4};
    auto one = [](double) { return 1.0; };
    auto [hist, traces] = cdm_run(sys, MassMode::lumped, tg, one, {}, 1, true);
    const double dt = tg.dt();
    CHECK(hist.snaps[0][0] == 0.0);
    CHECK(hist.snaps[1][0] == doctest::Approx(dt * dt).epsilon(1e-14));

    // Zero forcing keeps everything identically zero.
    auto zero = [](double) { return 0.0; };
    auto [h0, t0] = cdm_run(sys, MassMode::lumped, tg, zero, {}, 1, true);
    for (const auto& snap : h0.snaps) CHECK(snap.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("history stride stores the requested snapshots") {
    WaveSystem sys = single_dof_system(1.0, 1.0, 1.0);
    const TimeGrid tg{1.0, 8};
    auto one = [](double) { return 1.0; };
    auto [h1, t1] = cdm_run(sys, MassMode::lumped, tg, one, {}, 1, true);
    auto [h2, t2] = cdm_run(sys, MassMode::lumped, tg, one, {}, 2, true);
    CHECK(h1.num_snaps() == 9);
    CHECK(h2.num_snaps() == 5);
    for (int j = 0; j < 5; ++j)
        CHECK(h2.snaps[j][0] == doctest::Approx(h1.snaps[2 * j][0]).epsilon(1e-15));
    CHECK_THROWS_AS(cdm_run(sys, MassMode::lumped, tg, one, {}, 3, true),
                    std::invalid_argument);
}

TEST_CASE("instability is detected and reported with a step index") {
    Setup s(4, 2, 4.0, 2.0, 2, MassMode::lumped);
    const double dtc = critical_dt(s.sys, MassMode::lumped);
    s.sys.F_spatial = Eigen::VectorXd::Ones(s.sys.num_dofs());
    const TimeGrid tg{800.0 * dtc, 200}; // dt = 4 dtc
    auto one = [](double) { return 1.0; };
    bool threw = false;
    try {
        cdm_run(s.sys, MassMode::lumped, tg, one, {}, 1, false);
    } catch (const InstabilityError& e) {
        threw = true;
        CHECK(e.step > 0);
        CHECK(e.step <= tg.n_steps);
    }
    CHECK(threw);
}

TEST_CASE("discrete energy is bounded after the burst ends") {
    Setup s(10, 5, 10.0, 5.0, 2, MassMode::consistent);
    s.sys.F_spatial = spatial_source(s.basis, {{2.0, 2.5}, 0.25, 0.25, 0.5, 2.0}, s.quad);
    const double f = 0.5;
    const double dtc = critical_dt(s.sys, MassMode::consistent);
    const double t_max = 8.0;
    const int nt = static_cast<int>(std::ceil(t_max / (0.5 * dtc)));
    const TimeGrid tg{t_max, nt};
    auto signal = [&](double t) { return burst(t, f, 2.0); };
    auto [hist, traces] = cdm_run(s.sys, MassMode::consistent, tg, signal, {}, 1, true);

    // Energy from stored history with central-difference velocities. The
    // drift bound is calibrated at 2% for this configuration; the
    // staggered leapfrog energy below is the sharp invariant.
    std::vector<double> energy, shadow;
    for (int i = 1; i + 1 < hist.num_snaps(); ++i) {
        const double t = tg.time(i);
        if (t <= 2.0 / f + 2.0 * tg.dt()) continue;
        const Eigen::VectorXd v = (hist.snaps[i + 1] - hist.snaps[i - 1]) / (2.0 * tg.dt());
        const Eigen::VectorXd& u = hist.snaps[i];
        energy.push_back(0.5 * v.dot(s.sys.M * v) + 0.5 * u.dot(s.sys.K * u));
        const Eigen::VectorXd vs = (hist.snaps[i + 1] - hist.snaps[i]) / tg.dt();
        shadow.push_back(0.5 * vs.dot(s.sys.M * vs) +
                         0.5 * hist.snaps[i].dot(s.sys.K * hist.snaps[i + 1]));
    }
    REQUIRE(energy.size() > 10);
    const double emax = *std::max_element(energy.begin(), energy.end());
    const double emin = *std::min_element(energy.begin(), energy.end());
    CHECK(emax > 0.0);
    CHECK((emax - emin) / emax < 0.02);

    // With forcing off, the staggered energy is conserved to round-off.
    const double smax = *std::max_element(shadow.begin(), shadow.end());
    const double smin = *std::min_element(shadow.begin(), shadow.end());
    CHECK((smax - smin) / smax < 1e-12);
}

TEST_CASE("adjoint run: zero residuals, reversal identity, linearity") {
    Setup s(6, 3, 6.0, 3.0, 2, MassMode::consistent);
    const std::vector<Point> recs{{1.5, 1.5}};
    std::vector<Footprint> fps;
    for (const Point& r : recs) fps.push_back(tensor_footprint(s.basis, r.x, r.y));
    const TimeGrid tg{3.0, 150};

    // Zero residuals give a zero adjoint field.
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, tg.n_steps + 1);
    WaveHistory h0 = adjoint_run(s.sys, MassMode::consistent, tg, fps, zero, 1);
    for (const auto& snap : h0.snaps) CHECK(snap.cwiseAbs().maxCoeff() == 0.0);

    // A delta residual at the final time equals a forward impulse from the
    // receiver, reversed in time (the adjoint runs one extra step so that
    // snapshot i aligns with the multiplier of the step-i equation).
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(1, tg.n_steps + 1);
    delta(0, tg.n_steps) = 1.0;
    const WaveHistory adj = adjoint_run(s.sys, MassMode::consistent, tg, fps, delta, 1);

    WaveSystem fwd_sys = s.sys;
    Eigen::VectorXd point_load = Eigen::VectorXd::Zero(s.sys.num_dofs());
    for (int a = 0; a < fps[0].count; ++a) point_load[fps[0].dofs[a]] += fps[0].values[a];
    fwd_sys.F_spatial = point_load;
    const TimeGrid tg_ext{tg.t_max * (tg.n_steps + 1) / tg.n_steps, tg.n_steps + 1};
    auto impulse = [&](double t) { return t < 0.5 * tg_ext.dt() ? 1.0 : 0.0; };
    auto [fwd, traces] = cdm_run(fwd_sys, MassMode::consistent, tg_ext, impulse, {}, 1, true);

    double worst = 0.0, scale = 0.0;
    for (int m = 0; m <= tg.n_steps; ++m) {
        worst = std::max(
            worst, (adj.snaps[m] - fwd.snaps[tg.n_steps + 1 - m]).cwiseAbs().maxCoeff());
        scale = std::max(scale, fwd.snaps[m].cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12 * scale);

    // Linearity: doubling the residuals doubles the field.
    const WaveHistory adj2 =
        adjoint_run(s.sys, MassMode::consistent, tg, fps, Eigen::MatrixXd(2.0 * delta), 1);
    double lin = 0.0;
    for (int m = 0; m <= tg.n_steps; ++m)
        lin = std::max(lin, (adj2.snaps[m] - 2.0 * adj.snaps[m]).cwiseAbs().maxCoeff());
    CHECK(lin < 1e-12 * scale);
}

TEST_CASE("reciprocity on a homogeneous medium") {
    Setup s(8, 4, 8.0, 4.0, 2, MassMode::consistent);
    const SourceSpec sa{{2.0, 2.0}, 0.3, 0.3, 0.5, 2.0};
    const SourceSpec sb{{6.0, 2.5}, 0.3, 0.3, 0.5, 2.0};
    const Eigen::VectorXd Fa = spatial_source(s.basis, sa, s.quad);
    const Eigen::VectorXd Fb = spatial_source(s.basis, sb, s.quad);
    const TimeGrid tg{6.0, 400};
    auto signal = [&](double t) { return burst(t, 0.5, 2.0); };

    WaveSystem sys = s.sys;
    sys.F_spatial = Fa;
    auto [ha, ta] = cdm_run(sys, MassMode::consistent, tg, signal, {}, 1, true);
    sys.F_spatial = Fb;
    auto [hb, tb] = cdm_run(sys, MassMode::consistent, tg, signal, {}, 1, true);

    // F_b . u(t; F_a) must equal F_a . u(t; F_b) for the symmetric system.
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= tg.n_steps; ++i) {
        const double uab = Fb.dot(ha.snaps[i]);
        const double uba = Fa.dot(hb.snaps[i]);
        worst = std::max(worst, std::abs(uab - uba));
        scale = std::max(scale, std::abs(uab));
    }
    CHECK(worst < 1e-6 * scale);
}

TEST_CASE("trace error converges at second order in dt") {
    Setup s(6, 3, 6.0, 3.0, 2, MassMode::consistent);
    s.sys.F_spatial = spatial_source(s.basis, {{1.5, 1.5}, 0.25, 0.25, 0.5, 2.0}, s.quad);
    const std::vector<Point> recs{{4.5, 1.5}};
    std::vector<Footprint> fps{tensor_footprint(s.basis, recs[0].x, recs[0].y)};
    auto signal = [&](double t) { return burst(t, 0.5, 2.0); };
    const double t_max = 4.0;

    auto final_trace = [&](int nt) {
        const TimeGrid tg{t_max, nt};
        auto [h, tr] = cdm_run(s.sys, MassMode::consistent, tg, signal, fps, nt, false);
        return tr(0, nt);
    };
    const double u_ref = final_trace(3200);
    const double e1 = std::abs(final_trace(200) - u_ref);
    const double e2 = std::abs(final_trace(400) - u_ref);
    const double order = std::log2(e1 / e2);
    MESSAGE("measured time order: ", order);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("lumped critical dt is insensitive to the cut ratio") {
    std::vector<double> dtcs;
    for (double chi : {1e-3, 1e-2, 1e-1, 0.5}) {
        // Physical slab covering 3 spans plus a sliver of the fourth.
        const ShapePtr slab = make_box_shape({-1.0, -1.0}, {3.0 + chi, 2.0});
        Setup s(4, 1, 4.0, 1.0, 2, MassMode::lumped, slab, 1.0, 12);
        dtcs.push_back(critical_dt(s.sys, MassMode::lumped));
    }
    const double lo = *std::min_element(dtcs.begin(), dtcs.end());
    const double hi = *std::max_element(dtcs.begin(), dtcs.end());
    MESSAGE("lumped dt_c spread across cut ratios: ", hi / lo);
    CHECK(hi / lo < 1.2);
}

TEST_CASE("trace csv round trip") {
    Eigen::MatrixXd tr(2, 4);
    tr << 0, 1, 2, 3, 0, -1, -2, -3;
    std::stringstream ss;
    write_traces_csv(ss, tr, 0.25);
    double dt = 0.0;
    const Eigen::MatrixXd back = read_traces_csv(ss, dt);
    CHECK(dt == doctest::Approx(0.25));
    CHECK(back.rows() == 2);
    CHECK(back.cols() == 4);
    CHECK((back - tr).cwiseAbs().maxCoeff() == 0.0);
}
