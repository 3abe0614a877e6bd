//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "igafwi/config.hpp"
#include "igafwi/errors.hpp"
#include "igafwi/io.hpp"

namespace {

using namespace igafwi;

void usage(std::ostream& os) {
    os << "usage: igafwi <synthesize|forward|invert|convergence-study|indicator>"
          " --config <path> [--set section.key=value ...]\n";
}

int run_synthesize(const RunConfig& cfg) {
    const std::string dir = cfg.resolved_reference_dir();
    const TraceSet traces = synthesize_reference(cfg.experiment, dir);
    if (cfg.verbosity > 0)
        std::cout << "synthesize: wrote " << traces.n_sources() << " trace files ("
                  << traces.n_receivers() << " receivers, dt = " << traces.dt << ") to " << dir
                  << "\n";
    return 0;
}

int run_forward(const RunConfig& cfg) {
    const ExperimentConfig& e = cfg.experiment;
    const TensorBasis basis = make_basis(e);
    const AlphaField alpha = build_alpha(e.shapes, e.eps_fict, /*include_defects=*/true);
    MaterialGrid grid(e.spans_x * e.n_voxels_per_span, e.spans_y * e.n_voxels_per_span,
                      basis.kx.span_size() / e.n_voxels_per_span,
                      basis.ky.span_size() / e.n_voxels_per_span, e.n_sub_voxels);
    const SpanQuadrature quad(basis, alpha, grid, {e.quadtree_depth, e.gauss_order});
    WaveSystem sys = assemble(basis, alpha, grid, e.rho0, e.c0, quad, e.mass);
    const double dtc = critical_dt(sys, e.mass);
    const TimeGrid tg = resolve_time_grid(e, sys, e.mass);

    std::vector<Footprint> rec_fps;
    for (const Point& r : e.receivers) rec_fps.push_back(tensor_footprint(basis, r.x, r.y));
    auto signal = [&](double t) { return burst(t, e.frequency, e.envelope_exponent); };

    std::filesystem::create_directories(cfg.output_dir + "/forward");
    for (size_t s = 0; s < e.sources.size(); ++s) {
        sys.F_spatial = spatial_source(
            basis, {e.sources[s], e.sigma_x, e.sigma_y, e.frequency, e.envelope_exponent},
            quad);
        auto [hist, traces] = cdm_run(sys, e.mass, tg, signal, rec_fps, tg.n_steps, false);
        std::ofstream os(cfg.output_dir + "/forward/traces_s" + std::to_string(s) + ".csv");
        write_traces_csv(os, traces, tg.dt());
    }
    std::cout << "forward: dt = " << tg.dt() << ", dt_c = " << dtc
              << ", n_dof = " << basis.num_dofs() << ", n_steps = " << tg.n_steps << "\n";
    return 0;
}

TraceSet load_reference(const RunConfig& cfg) {
    const std::string dir = cfg.resolved_reference_dir();
    TraceSet ref;
    ref.receivers = cfg.experiment.receivers;
    for (size_t s = 0; s < cfg.experiment.sources.size(); ++s) {
        const std::string path = dir + "/traces_s" + std::to_string(s) + ".csv";
        std::ifstream is(path);
        if (!is)
            throw ConfigError("invert: missing reference trace file '" + path +
                              "' (run synthesize first)");
        double dt = 0.0;
        ref.per_source.push_back(read_traces_csv(is, dt));
        ref.dt = dt;
    }
    return ref;
}

int run_invert(const RunConfig& cfg) {
    const TraceSet ref = load_reference(cfg);
    const InversionReport report = invert(cfg.experiment, ref);

    const std::string dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    write_gamma_grid_file(report.final_gamma, cfg.resolved_grid_file());
    write_gamma_csv(report.final_gamma, dir + "/gamma.csv");
    write_gamma_pgm(report.final_gamma, dir + "/gamma.pgm", cfg.experiment.gamma_min,
                    cfg.experiment.gamma_max);
    for (size_t st = 0; st < report.stages.size(); ++st)
        write_journal_csv(report.stages[st],
                          dir + "/journal_stage" + std::to_string(st + 1) + ".csv");

    if (cfg.verbosity > 0) {
        std::cout << "invert: final chi = " << report.final_chi
                  << ", refined = " << (report.refined ? "yes" : "no")
                  << ", gradient evals = " << report.n_gradient_evals << "\n";
        std::cout << "timings [s]: assembly " << report.timings.assembly << ", forward "
                  << report.timings.forward << ", adjoint " << report.timings.adjoint
                  << ", gradient " << report.timings.gradient << ", total "
                  << report.timings.total << "\n";
        if (report.nothing_to_refine)
            std::cout << "invert: nothing to refine; stage 2 skipped\n";
    }
    return 0;
}

int run_study(const RunConfig& cfg) {
    const StudyResult result = convergence_study(cfg.study());
    std::filesystem::create_directories(cfg.output_dir);
    write_study_csv(result, cfg.output_dir + "/convergence.csv");
    write_study_slopes_csv(result, cfg.output_dir + "/convergence_slopes.csv");
    if (cfg.verbosity > 0)
        for (const StudySlope& s : result.slopes)
            std::cout << "study: p = " << s.degree << ", mass = "
                      << (s.mass == MassMode::consistent ? "consistent" : "lumped")
                      << ", slope = " << s.slope << "\n";
    return 0;
}

int run_indicator(const RunConfig& cfg) {
    const MaterialGrid grid = read_gamma_grid_file(cfg.resolved_grid_file());
    const IndicatorField ind = grid.compute_indicator();
    std::filesystem::create_directories(cfg.output_dir);
    write_indicator_csv(grid, ind, cfg.output_dir + "/indicator.csv");
    if (cfg.verbosity > 0)
        std::cout << "indicator: max eta = " << ind.max_eta() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        usage(std::cerr);
        return 1;
    }
    const std::string cmd = args[0];
    std::string config_path;
    std::vector<std::string> overrides;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[++i];
        else if (args[i] == "--set" && i + 1 < args.size())
            overrides.push_back(args[++i]);
        else {
            std::cerr << "error: unknown argument '" << args[i] << "'\n";
            usage(std::cerr);
            return 1;
        }
    }

    try {
        if (config_path.empty()) throw igafwi::ConfigError("missing --config <path>");
        igafwi::RunConfig cfg = igafwi::parse_config_file(config_path);
        igafwi::apply_overrides(cfg, overrides);
        std::filesystem::create_directories(cfg.output_dir);
        igafwi::write_manifest(cfg, cfg.output_dir + "/manifest.cfg");

        if (cmd == "synthesize") return run_synthesize(cfg);
        if (cmd == "forward") return run_forward(cfg);
        if (cmd == "invert") return run_invert(cfg);
        if (cmd == "convergence-study") return run_study(cfg);
        if (cmd == "indicator") return run_indicator(cfg);
        std::cerr << "error: unknown subcommand '" << cmd << "'\n";
        usage(std::cerr);
        return 1;
    } catch (const igafwi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const igafwi::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
