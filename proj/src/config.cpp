//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace igafwi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + v + "' for " + key);
    }
}

int to_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + v + "' for " + key);
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config: bad boolean value '" + v + "' for " + key + " (true/false)");
}

Point to_point(const std::string& v, const std::string& key) {
    const auto parts = split_on(v, ',');
    if (parts.size() != 2) throw ConfigError("config: expected 'x,y' for " + key);
    return {to_double(parts[0], key), to_double(parts[1], key)};
}

std::vector<Point> to_points(const std::string& v, const std::string& key) {
    std::vector<Point> pts;
    for (const std::string& part : split_on(v, ';'))
        if (!part.empty()) pts.push_back(to_point(part, key));
    return pts;
}

Box to_box(const std::string& v, const std::string& key) {
    const auto parts = split_on(v, ',');
    if (parts.size() != 4) throw ConfigError("config: expected 'x0,y0,x1,y1' for " + key);
    return {to_double(parts[0], key), to_double(parts[1], key), to_double(parts[2], key),
            to_double(parts[3], key)};
}

MassMode to_mass(const std::string& v) {
    if (v == "consistent") return MassMode::consistent;
    if (v == "lumped") return MassMode::lumped;
    throw ConfigError("config: mass must be 'consistent' or 'lumped', got '" + v + "'");
}

ShapeRecord parse_shape(const std::string& value) {
    const auto toks = split_ws(value);
    if (toks.empty()) throw ConfigError("config: empty shape record");
    ShapeRecord rec;
    const std::string& kind = toks[0];
    if (kind == "circle")
        rec.kind = ShapeRecord::Kind::circle;
    else if (kind == "ellipse")
        rec.kind = ShapeRecord::Kind::ellipse;
    else if (kind == "box")
        rec.kind = ShapeRecord::Kind::box;
    else if (kind == "below_spline")
        rec.kind = ShapeRecord::Kind::below_spline;
    else
        throw ConfigError("config: unknown shape kind '" + kind + "'");

    bool role_set = false;
    for (size_t i = 1; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: shape token '" + toks[i] + "' is not key=value");
        const std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
        if (k == "role") {
            role_set = true;
            if (v == "physical")
                rec.role = ShapeRecord::Role::physical;
            else if (v == "fictitious")
                rec.role = ShapeRecord::Role::fictitious;
            else if (v == "true_defect")
                rec.role = ShapeRecord::Role::true_defect;
            else
                throw ConfigError("config: unknown shape role '" + v + "'");
        } else if (k == "cx_mm")
            rec.center.x = to_double(v, k);
        else if (k == "cy_mm")
            rec.center.y = to_double(v, k);
        else if (k == "r_mm")
            rec.radius = to_double(v, k);
        else if (k == "a_mm")
            rec.semi_a = to_double(v, k);
        else if (k == "b_mm")
            rec.semi_b = to_double(v, k);
        else if (k == "angle_deg")
            rec.angle_deg = to_double(v, k);
        else if (k == "lo_mm")
            rec.lo = to_point(v, k);
        else if (k == "hi_mm")
            rec.hi = to_point(v, k);
        else if (k == "pts_mm")
            rec.points = to_points(v, k);
        else
            throw ConfigError("config: unknown shape parameter '" + k + "'");
    }
    if (!role_set) throw ConfigError("config: shape record is missing role=...");
    return rec;
}

std::string shape_to_string(const ShapeRecord& rec) {
    std::ostringstream os;
    os.precision(17);
    switch (rec.kind) {
    case ShapeRecord::Kind::circle:
        os << "circle";
        break;
    case ShapeRecord::Kind::ellipse:
        os << "ellipse";
        break;
    case ShapeRecord::Kind::box:
        os << "box";
        break;
    case ShapeRecord::Kind::below_spline:
        os << "below_spline";
        break;
    }
    os << " role=";
    switch (rec.role) {
    case ShapeRecord::Role::physical:
        os << "physical";
        break;
    case ShapeRecord::Role::fictitious:
        os << "fictitious";
        break;
    case ShapeRecord::Role::true_defect:
        os << "true_defect";
        break;
    }
    switch (rec.kind) {
    case ShapeRecord::Kind::circle:
        os << " cx_mm=" << rec.center.x << " cy_mm=" << rec.center.y << " r_mm=" << rec.radius;
        break;
    case ShapeRecord::Kind::ellipse:
        os << " cx_mm=" << rec.center.x << " cy_mm=" << rec.center.y << " a_mm=" << rec.semi_a
           << " b_mm=" << rec.semi_b << " angle_deg=" << rec.angle_deg;
        break;
    case ShapeRecord::Kind::box:
        os << " lo_mm=" << rec.lo.x << "," << rec.lo.y << " hi_mm=" << rec.hi.x << ","
           << rec.hi.y;
        break;
    case ShapeRecord::Kind::below_spline: {
        os << " pts_mm=";
        for (size_t i = 0; i < rec.points.size(); ++i) {
            if (i) os << ";";
            os << rec.points[i].x << "," << rec.points[i].y;
        }
        break;
    }
    }
    return os.str();
}

std::vector<Point> parse_line_generator(const std::string& value, const std::string& key) {
    int n = 0;
    double spacing = 0.0, cx = 0.0, y = 0.0;
    bool have_n = false, have_s = false, have_c = false, have_y = false;
    for (const std::string& tok : split_ws(value)) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: token '" + tok + "' in " + key + " is not key=value");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "n") {
            n = to_int(v, k);
            have_n = true;
        } else if (k == "spacing_mm") {
            spacing = to_double(v, k);
            have_s = true;
        } else if (k == "cx_mm") {
            cx = to_double(v, k);
            have_c = true;
        } else if (k == "y_mm") {
            y = to_double(v, k);
            have_y = true;
        } else {
            throw ConfigError("config: unknown parameter '" + k + "' in " + key);
        }
    }
    if (!have_n || !have_s || !have_c || !have_y)
        throw ConfigError("config: " + key + " needs n, spacing_mm, cx_mm, y_mm");
    if (n < 1) throw ConfigError("config: " + key + " needs n >= 1");
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back({cx + (i - 0.5 * (n - 1)) * spacing, y});
    return pts;
}

struct EntryContext {
    bool from_override = false;
    std::set<std::string>* cleared = nullptr;

    bool should_clear(const std::string& full_key) const {
        return from_override && cleared && cleared->insert(full_key).second;
    }
};

void apply_entry(RunConfig& cfg, const std::string& section, const std::string& key,
                 const std::string& value, const EntryContext& ctx) {
    ExperimentConfig& e = cfg.experiment;
    const std::string full = section + "." + key;

    auto unknown = [&]() -> void {
        throw ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
    };

    if (section == "domain") {
        if (key == "length_x_mm")
            e.length_x = to_double(value, full);
        else if (key == "length_y_mm")
            e.length_y = to_double(value, full);
        else if (key == "rho0_kg_per_m3")
            e.rho0 = to_double(value, full);
        else if (key == "c0_mm_per_us")
            e.c0 = to_double(value, full);
        else if (key == "eps_fict")
            e.eps_fict = to_double(value, full);
        else if (key == "shape") {
            if (ctx.should_clear(full)) e.shapes.clear();
            e.shapes.push_back(parse_shape(value));
        } else
            unknown();
    } else if (section == "sources") {
        if (key == "source_mm") {
            if (ctx.should_clear(full)) e.sources.clear();
            e.sources.push_back(to_point(value, full));
        } else if (key == "receiver_mm") {
            if (ctx.should_clear(full)) e.receivers.clear();
            e.receivers.push_back(to_point(value, full));
        } else if (key == "source_line") {
            if (ctx.should_clear(full)) e.sources.clear();
            for (const Point& p : parse_line_generator(value, full)) e.sources.push_back(p);
        } else if (key == "receiver_line") {
            if (ctx.should_clear(full)) e.receivers.clear();
            for (const Point& p : parse_line_generator(value, full)) e.receivers.push_back(p);
        } else if (key == "sigma_x_mm")
            e.sigma_x = to_double(value, full);
        else if (key == "sigma_y_mm")
            e.sigma_y = to_double(value, full);
        else if (key == "f_mhz")
            e.frequency = to_double(value, full);
        else if (key == "envelope_exponent")
            e.envelope_exponent = to_double(value, full);
        else
            unknown();
    } else if (section == "discretization") {
        if (key == "degree")
            e.degree = to_int(value, full);
        else if (key == "spans_x")
            e.spans_x = to_int(value, full);
        else if (key == "spans_y")
            e.spans_y = to_int(value, full);
        else if (key == "mass")
            e.mass = to_mass(value);
        else if (key == "quadtree_depth")
            e.quadtree_depth = to_int(value, full);
        else if (key == "gauss_order")
            e.gauss_order = to_int(value, full);
        else if (key == "n_voxels_per_span")
            e.n_voxels_per_span = to_int(value, full);
        else if (key == "n_sub_voxels")
            e.n_sub_voxels = to_int(value, full);
        else if (key == "n_refine_layers")
            e.n_refine_layers = to_int(value, full);
        else if (key == "tau_fraction")
            e.tau_fraction = to_double(value, full);
        else if (key == "t_max_us")
            e.t_max = to_double(value, full);
        else if (key == "n_steps")
            e.n_steps = to_int(value, full);
        else if (key == "auto_dt")
            e.auto_dt = to_bool(value, full);
        else if (key == "dt_safety")
            e.dt_safety = to_double(value, full);
        else if (key == "history_stride")
            e.history_stride = to_int(value, full);
        else if (key == "study_degrees") {
            cfg.study_degrees.clear();
            for (const std::string& v : split_on(value, ','))
                cfg.study_degrees.push_back(to_int(v, full));
        } else if (key == "study_masses") {
            cfg.study_masses.clear();
            for (const std::string& v : split_on(value, ',')) {
                to_mass(v); // validation only
                cfg.study_masses.push_back(v);
            }
        } else if (key == "study_span_sizes_mm") {
            cfg.study_span_sizes.clear();
            for (const std::string& v : split_on(value, ','))
                cfg.study_span_sizes.push_back(to_double(v, full));
        } else if (key == "study_ref_span_size_mm")
            cfg.study_ref_span_size = to_double(value, full);
        else if (key == "study_ref_degree")
            cfg.study_ref_degree = to_int(value, full);
        else if (key == "eval_window_mm")
            cfg.eval_window = to_box(value, full);
        else if (key == "eval_nx")
            cfg.eval_nx = to_int(value, full);
        else if (key == "eval_ny")
            cfg.eval_ny = to_int(value, full);
        else
            unknown();
    } else if (section == "inversion") {
        if (key == "gamma_min")
            e.gamma_min = to_double(value, full);
        else if (key == "gamma_max")
            e.gamma_max = to_double(value, full);
        else if (key == "iters_stage1")
            e.iters_stage1 = to_int(value, full);
        else if (key == "iters_stage2")
            e.iters_stage2 = to_int(value, full);
        else if (key == "enable_refinement")
            e.enable_refinement = to_bool(value, full);
        else if (key == "strategy") {
            if (value == "restart")
                e.strategy = RefineStrategy::restart;
            else if (value == "warm-start")
                e.strategy = RefineStrategy::warm_start;
            else
                throw ConfigError("config: strategy must be 'warm-start' or 'restart'");
        } else if (key == "search_window_mm")
            e.search_window = to_box(value, full);
        else if (key == "kernel_area_weighting")
            e.kernel_area_weighting = to_bool(value, full);
        else if (key == "kernel_sampling") {
            if (value == "midpoint")
                e.kernel_sampling = KernelSampling::midpoint;
            else if (value == "quadrature")
                e.kernel_sampling = KernelSampling::quadrature;
            else
                throw ConfigError("config: kernel_sampling must be 'midpoint' or 'quadrature'");
        }
        else if (key == "lbfgs_memory")
            e.lbfgs_memory = to_int(value, full);
        else if (key == "tol_projected_gradient")
            e.tol_projected_gradient = to_double(value, full);
        else if (key == "tol_chi_relative")
            e.tol_chi_relative = to_double(value, full);
        else if (key == "synth_oversampling")
            e.synth_oversampling = to_int(value, full);
        else if (key == "synth_degree_increment")
            e.synth_degree_increment = to_int(value, full);
        else
            unknown();
    } else if (section == "output") {
        if (key == "dir")
            cfg.output_dir = value;
        else if (key == "reference_dir")
            cfg.reference_dir = value;
        else if (key == "grid_file")
            cfg.grid_file = value;
        else if (key == "threads")
            cfg.threads = to_int(value, full);
        else if (key == "verbosity")
            cfg.verbosity = to_int(value, full);
        else if (key == "seed")
            e.seed = static_cast<unsigned>(to_int(value, full));
        else
            unknown();
    } else {
        throw ConfigError("config: unknown section [" + section + "]");
    }
}

void validate(const RunConfig& cfg) {
    const ExperimentConfig& e = cfg.experiment;
    if (!(e.length_x > 0.0) || !(e.length_y > 0.0))
        throw ConfigError("config: domain extents must be positive");
    if (e.eps_fict < 1e-8 || e.eps_fict > 1e-5)
        throw ConfigError("config: eps_fict must lie in [1e-8, 1e-5]");
    if (e.degree < 1) throw ConfigError("config: degree must be >= 1");
    if (e.spans_x < 1 || e.spans_y < 1) throw ConfigError("config: spans must be >= 1");
    if (e.n_voxels_per_span < 1) throw ConfigError("config: n_voxels_per_span must be >= 1");
    if (e.n_sub_voxels < 2) throw ConfigError("config: n_sub_voxels must be >= 2");
    if (!(e.tau_fraction > 0.0) || e.tau_fraction > 1.0)
        throw ConfigError("config: tau_fraction must lie in (0, 1]");
    if (!(e.t_max > 0.0) || e.n_steps < 1)
        throw ConfigError("config: time grid must be positive");
    if (!(e.gamma_min > 0.0) || !(e.gamma_max > e.gamma_min))
        throw ConfigError("config: need 0 < gamma_min < gamma_max");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    for (const Point& s : e.sources)
        if (s.x < 0.0 || s.x > e.length_x || s.y < 0.0 || s.y > e.length_y)
            throw ConfigError("config: source outside the extended domain");
    for (const Point& r : e.receivers)
        if (r.x < 0.0 || r.x > e.length_x || r.y < 0.0 || r.y > e.length_y)
            throw ConfigError("config: receiver outside the extended domain");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    EntryContext ctx; // file context: repeated keys accumulate
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config: key '" + key + "' before any [section]");
        apply_entry(cfg, section, key, value, ctx);
    }
    // FMC default: receivers coincide with the sources.
    if (cfg.experiment.receivers.empty()) cfg.experiment.receivers = cfg.experiment.sources;
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("config: cannot open file '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    std::set<std::string> cleared;
    EntryContext ctx{true, &cleared};
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects section.key=value, got '" + ov + "'");
        const std::string path = trim(ov.substr(0, eq));
        const std::string value = trim(ov.substr(eq + 1));
        const auto dot = path.find('.');
        if (dot == std::string::npos)
            throw ConfigError("--set expects section.key=value, got '" + ov + "'");
        apply_entry(cfg, path.substr(0, dot), path.substr(dot + 1), value, ctx);
    }
    if (cfg.experiment.receivers.empty()) cfg.experiment.receivers = cfg.experiment.sources;
    validate(cfg);
}

std::string serialize_config(const RunConfig& cfg) {
    const ExperimentConfig& e = cfg.experiment;
    std::ostringstream os;
    os.precision(17);
    os << "[domain]\n";
    os << "length_x_mm = " << e.length_x << "\n";
    os << "length_y_mm = " << e.length_y << "\n";
    os << "rho0_kg_per_m3 = " << e.rho0 << "\n";
    os << "c0_mm_per_us = " << e.c0 << "\n";
    os << "eps_fict = " << e.eps_fict << "\n";
    for (const ShapeRecord& s : e.shapes) os << "shape = " << shape_to_string(s) << "\n";

    os << "\n[sources]\n";
    for (const Point& p : e.sources) os << "source_mm = " << p.x << "," << p.y << "\n";
    for (const Point& p : e.receivers) os << "receiver_mm = " << p.x << "," << p.y << "\n";
    os << "sigma_x_mm = " << e.sigma_x << "\n";
    os << "sigma_y_mm = " << e.sigma_y << "\n";
    os << "f_mhz = " << e.frequency << "\n";
    os << "envelope_exponent = " << e.envelope_exponent << "\n";

    os << "\n[discretization]\n";
    os << "degree = " << e.degree << "\n";
    os << "spans_x = " << e.spans_x << "\n";
    os << "spans_y = " << e.spans_y << "\n";
    os << "mass = " << (e.mass == MassMode::consistent ? "consistent" : "lumped") << "\n";
    os << "quadtree_depth = " << e.quadtree_depth << "\n";
    os << "gauss_order = " << e.gauss_order << "\n";
    os << "n_voxels_per_span = " << e.n_voxels_per_span << "\n";
    os << "n_sub_voxels = " << e.n_sub_voxels << "\n";
    os << "n_refine_layers = " << e.n_refine_layers << "\n";
    os << "tau_fraction = " << e.tau_fraction << "\n";
    os << "t_max_us = " << e.t_max << "\n";
    os << "n_steps = " << e.n_steps << "\n";
    os << "auto_dt = " << (e.auto_dt ? "true" : "false") << "\n";
    os << "dt_safety = " << e.dt_safety << "\n";
    os << "history_stride = " << e.history_stride << "\n";
    os << "study_degrees = ";
    for (size_t i = 0; i < cfg.study_degrees.size(); ++i)
        os << (i ? "," : "") << cfg.study_degrees[i];
    os << "\nstudy_masses = ";
    for (size_t i = 0; i < cfg.study_masses.size(); ++i)
        os << (i ? "," : "") << cfg.study_masses[i];
    os << "\nstudy_span_sizes_mm = ";
    for (size_t i = 0; i < cfg.study_span_sizes.size(); ++i)
        os << (i ? "," : "") << cfg.study_span_sizes[i];
    os << "\nstudy_ref_span_size_mm = " << cfg.study_ref_span_size << "\n";
    os << "study_ref_degree = " << cfg.study_ref_degree << "\n";
    os << "eval_window_mm = " << cfg.eval_window.x0 << "," << cfg.eval_window.y0 << ","
       << cfg.eval_window.x1 << "," << cfg.eval_window.y1 << "\n";
    os << "eval_nx = " << cfg.eval_nx << "\n";
    os << "eval_ny = " << cfg.eval_ny << "\n";

    os << "\n[inversion]\n";
    os << "gamma_min = " << e.gamma_min << "\n";
    os << "gamma_max = " << e.gamma_max << "\n";
    os << "iters_stage1 = " << e.iters_stage1 << "\n";
    os << "iters_stage2 = " << e.iters_stage2 << "\n";
    os << "enable_refinement = " << (e.enable_refinement ? "true" : "false") << "\n";
    os << "strategy = "
       << (e.strategy == RefineStrategy::restart ? "restart" : "warm-start") << "\n";
    if (e.search_window)
        os << "search_window_mm = " << e.search_window->x0 << "," << e.search_window->y0 << ","
           << e.search_window->x1 << "," << e.search_window->y1 << "\n";
    os << "kernel_area_weighting = " << (e.kernel_area_weighting ? "true" : "false") << "\n";
    os << "kernel_sampling = "
       << (e.kernel_sampling == KernelSampling::midpoint ? "midpoint" : "quadrature") << "\n";
    os << "lbfgs_memory = " << e.lbfgs_memory << "\n";
    os << "tol_projected_gradient = " << e.tol_projected_gradient << "\n";
    os << "tol_chi_relative = " << e.tol_chi_relative << "\n";
    os << "synth_oversampling = " << e.synth_oversampling << "\n";
    os << "synth_degree_increment = " << e.synth_degree_increment << "\n";

    os << "\n[output]\n";
    os << "dir = " << cfg.output_dir << "\n";
    if (!cfg.reference_dir.empty()) os << "reference_dir = " << cfg.reference_dir << "\n";
    if (!cfg.grid_file.empty()) os << "grid_file = " << cfg.grid_file << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "verbosity = " << cfg.verbosity << "\n";
    os << "seed = " << e.seed << "\n";
    return os.str();
}

StudyConfig RunConfig::study() const {
    StudyConfig s;
    s.base = experiment;
    s.degrees = study_degrees;
    s.masses.clear();
    for (const std::string& m : study_masses)
        s.masses.push_back(m == "lumped" ? MassMode::lumped : MassMode::consistent);
    s.span_sizes = study_span_sizes;
    s.ref_span_size = study_ref_span_size;
    s.ref_degree = study_ref_degree;
    s.eval_window = eval_window;
    s.eval_nx = eval_nx;
    s.eval_ny = eval_ny;
    return s;
}

} // namespace igafwi
