// crosslocate.cpp - command line front end: locate a height-profile cross
// pattern in a DEM, build patterns, and run the synthetic experiment.
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crosslocate/dem.hpp"
#include "crosslocate/derivative.hpp"
#include "crosslocate/errors.hpp"
#include "crosslocate/experiment.hpp"
#include "crosslocate/measures.hpp"
#include "crosslocate/pattern.hpp"
#include "crosslocate/search.hpp"

namespace {

using namespace crosslocate;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

Point3 parse_coords(const std::string& text, bool allow_z, bool& has_z) {
    Point3 p;
    has_z = false;
    std::string s = text;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    if (!(in >> p.x >> p.y))
        throw std::invalid_argument("coordinates '" + text + "': expected 'x,y'" +
                                    std::string(allow_z ? " or 'x,y,z'" : ""));
    if (in >> p.z) {
        if (!allow_z)
            throw std::invalid_argument("coordinates '" + text + "': expected exactly 'x,y'");
        has_z = true;
    }
    std::string extra;
    if (in >> extra)
        throw std::invalid_argument("coordinates '" + text + "': trailing garbage");
    return p;
}

int cmd_match(const std::string& dem_path, const std::string& pattern_path,
              const std::string& guess_text, const std::string& measure_name_,
              double lambda, double radius, double d1, int angles, int top_k,
              bool no_normalize, const std::string& window, bool skip_angles,
              int threads, const std::string& out_path) {
    SearchConfig cfg;
    cfg.measure = parse_measure(measure_name_);
    cfg.lambda = lambda;
    cfg.radius = radius;
    cfg.height_tol = d1;
    cfg.n_angles = angles;
    cfg.top_k = top_k;
    cfg.normalize = !no_normalize;
    cfg.threads = threads;
    cfg.skip_angles_for_procrustes = skip_angles;
    if (window == "full")
        cfg.window = NormWindow::FullCloud;
    else if (window == "box")
        cfg.window = NormWindow::Box;
    else
        throw std::invalid_argument("--window must be full|box");

    const DemCloud cloud = load_ascii_grid(dem_path);
    const PointPattern pattern = read_pattern_json(pattern_path);
    bool has_z = false;
    Point3 guess = parse_coords(guess_text, true, has_z);
    // The height window is anchored at the pattern's own center height;
    // an explicit z overrides it.
    if (!has_z)
        guess.z = pattern.center().z;

    const MatchResult result = match(cloud, pattern, guess, cfg);
    const std::string report = match_report_json(result, cfg);
    if (!out_path.empty())
        write_match_report(result, cfg, out_path);
    std::cout << report << std::endl;
    return kExitOk;
}

int cmd_derive(const std::string& dem_path, const std::string& center_text,
               double alpha, int arm_points, double spacing, int n_arms,
               int per_group, bool abs_slope, const std::string& prefix) {
    const DemCloud cloud = load_ascii_grid(dem_path);
    bool has_z = false;
    CrossSpec spec;
    spec.center = parse_coords(center_text, false, has_z);
    spec.first_arm_angle_deg = alpha;
    spec.arm_length_points = arm_points;
    spec.spacing = spacing;
    spec.n_arms = n_arms;

    const PointPattern cross = build_cross(cloud, spec);
    const ArmDerivative deriv = arc_derivative(cross);
    const std::vector<int> indices = exact_indices(deriv, per_group, abs_slope);
    const PointPattern target = extract_target(cross, indices);

    const std::string cross_path = prefix + "_cross.json";
    const std::string target_path = prefix + "_target.json";
    const std::string deriv_path = prefix + "_derivative.csv";
    write_pattern_json(cross, cross_path);
    write_pattern_json(target, target_path);
    write_derivative_csv(deriv, deriv_path);

    nlohmann::json j;
    j["cross"] = cross_path;
    j["target"] = target_path;
    j["derivative"] = deriv_path;
    j["indices"] = indices;
    j["center"] = {{"x", cross.points[0].x}, {"y", cross.points[0].y}, {"z", cross.points[0].z}};
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_synth(const SyntheticTerrainSpec& spec, const std::string& out_path) {
    const DemCloud cloud = synth_terrain(spec);
    save_ascii_grid(cloud, out_path);
    nlohmann::json j;
    j["out"] = out_path;
    j["nrows"] = cloud.nrows();
    j["ncols"] = cloud.ncols();
    j["resolution"] = cloud.resolution();
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_info(const std::string& dem_path) {
    const DemCloud cloud = load_ascii_grid(dem_path);
    double z_lo = 0.0, z_hi = 0.0;
    bool first = true;
    for (int i = 0; i < cloud.nrows(); ++i)
        for (int j = 0; j < cloud.ncols(); ++j) {
            if (cloud.is_nodata(i, j)) continue;
            const double z = cloud.height(i, j);
            if (first) {
                z_lo = z_hi = z;
                first = false;
            } else {
                z_lo = std::min(z_lo, z);
                z_hi = std::max(z_hi, z);
            }
        }
    nlohmann::json j;
    j["nrows"] = cloud.nrows();
    j["ncols"] = cloud.ncols();
    j["resolution"] = cloud.resolution();
    j["origin"] = {{"x", cloud.origin_x()}, {"y", cloud.origin_y()}};
    j["valid_cells"] = cloud.valid_count();
    j["nodata_cells"] =
        static_cast<long>(cloud.nrows()) * cloud.ncols() - cloud.valid_count();
    j["z_min"] = z_lo;
    j["z_max"] = z_hi;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_experiment(const std::string& spec_path, const std::string& out_dir,
                   bool dry_run, int threads) {
    ExperimentSpec spec = load_experiment_spec(spec_path);
    if (threads >= 0)
        spec.search.threads = threads;
    if (dry_run) {
        nlohmann::json j;
        j["ok"] = true;
        j["n_trials"] = spec.n_trials;
        std::cout << j.dump(2) << std::endl;
        return kExitOk;
    }
    const DemCloud cloud = spec.terrain_file ? load_ascii_grid(*spec.terrain_file)
                                             : synth_terrain(*spec.synthetic);
    const ExperimentResult result = run_experiment(cloud, spec);
    write_experiment_outputs(result, spec, out_dir);
    double total_time = 0.0;
    for (const auto& t : result.trials)
        for (const auto& o : t.outcomes)
            total_time += o.wall_time_s;
    std::cerr << "experiment: " << result.trials.size() << " trials, "
              << total_time << " s of matcher time\n";
    nlohmann::json j;
    j["out_dir"] = out_dir;
    j["trials_csv"] = (std::filesystem::path(out_dir) / "trials.csv").string();
    j["summary"] = (std::filesystem::path(out_dir) / "summary.txt").string();
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crosslocate - locate height-profile cross patterns in a DEM"};
    app.require_subcommand(1);

    // match
    auto* match_cmd = app.add_subcommand("match", "search a DEM for a pattern");
    std::string m_dem, m_pattern, m_guess, m_measure = "w2", m_window = "full", m_out;
    double m_lambda = 1.0, m_radius = 450.0, m_d1 = 1.0;
    int m_angles = 360, m_topk = 16, m_threads = 0;
    bool m_no_norm = false, m_skip_angles = false;
    match_cmd->add_option("--dem", m_dem, "DEM file (.asc)")->required();
    match_cmd->add_option("--pattern", m_pattern, "reference pattern JSON")->required();
    match_cmd->add_option("--guess", m_guess,
                          "center guess 'x,y[,z]'; z defaults to the pattern center height")
        ->required();
    match_cmd->add_option("--measure", m_measure, "w2|ls|procrustes");
    match_cmd->add_option("--lambda", m_lambda, "z penalty > 0");
    match_cmd->add_option("--radius", m_radius, "center window half-width r (m)");
    match_cmd->add_option("--d1", m_d1, "height tolerance d1 (m)");
    match_cmd->add_option("--angles", m_angles, "rotation grid size over [0,2pi)");
    match_cmd->add_option("--top-k", m_topk, "diagnostics entries to keep");
    match_cmd->add_option("--out", m_out, "also write the JSON report here");
    match_cmd->add_flag("--no-normalize", m_no_norm, "compare in raw meters");
    match_cmd->add_option("--window", m_window, "normalization stats window: full|box");
    match_cmd->add_flag("--skip-angles-for-procrustes", m_skip_angles,
                        "evaluate only theta=0 when the measure is procrustes");
    match_cmd->add_option("--threads", m_threads, "worker threads (0 = auto)")
        ->envname("CROSSLOCATE_THREADS");

    // derive
    auto* derive_cmd = app.add_subcommand("derive", "build a cross and its target pattern");
    std::string d_dem, d_center, d_prefix = "pattern";
    double d_alpha = 0.0, d_spacing = 1.0;
    int d_arm_points = 100, d_arms = 4, d_per_group = 9;
    bool d_abs = false;
    derive_cmd->add_option("--dem", d_dem, "DEM file (.asc)")->required();
    derive_cmd->add_option("--center", d_center, "cross center 'x,y'")->required();
    derive_cmd->add_option("--alpha", d_alpha, "first arm bearing, deg anti-clockwise from North");
    derive_cmd->add_option("--arm-points", d_arm_points, "points per arm");
    derive_cmd->add_option("--spacing", d_spacing, "meters between arm points");
    derive_cmd->add_option("--arms", d_arms, "number of arms");
    derive_cmd->add_option("--per-group", d_per_group, "high-slope indices kept per arm");
    derive_cmd->add_flag("--abs-slope", d_abs, "rank by |slope| instead of signed slope");
    derive_cmd->add_option("--out-prefix", d_prefix, "output file prefix");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate deterministic synthetic terrain");
    SyntheticTerrainSpec s_spec;
    std::string s_out = "terrain.asc";
    synth_cmd->add_option("--seed", s_spec.seed, "terrain seed");
    synth_cmd->add_option("--rows", s_spec.nrows, "grid rows");
    synth_cmd->add_option("--cols", s_spec.ncols, "grid cols");
    synth_cmd->add_option("--resolution", s_spec.resolution, "cell size (m)");
    synth_cmd->add_option("--origin-x", s_spec.origin_x, "west node x");
    synth_cmd->add_option("--origin-y", s_spec.origin_y, "south node y");
    synth_cmd->add_option("--base", s_spec.base_height, "base height (m)");
    synth_cmd->add_option("--trend-x", s_spec.trend_x, "z slope per meter east");
    synth_cmd->add_option("--trend-y", s_spec.trend_y, "z slope per meter north");
    synth_cmd->add_option("--bumps", s_spec.n_bumps, "number of Gaussian bumps");
    synth_cmd->add_option("--amp-min", s_spec.amp_min, "min bump amplitude (m)");
    synth_cmd->add_option("--amp-max", s_spec.amp_max, "max bump amplitude (m)");
    synth_cmd->add_option("--sigma-min", s_spec.sigma_min, "min bump width (m)");
    synth_cmd->add_option("--sigma-max", s_spec.sigma_max, "max bump width (m)");
    synth_cmd->add_option("--out", s_out, "output .asc path");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run the synthetic evaluation protocol");
    std::string e_spec, e_out = "experiment_out";
    bool e_dry = false;
    int e_threads = -1;
    exp_cmd->add_option("--spec", e_spec, "experiment config JSON")->required();
    exp_cmd->add_option("--out-dir", e_out, "output directory");
    exp_cmd->add_flag("--dry-run", e_dry, "validate the spec and exit");
    exp_cmd->add_option("--threads", e_threads, "worker threads (0 = auto)")
        ->envname("CROSSLOCATE_THREADS");

    // info
    auto* info_cmd = app.add_subcommand("info", "print DEM statistics");
    std::string i_dem;
    info_cmd->add_option("--dem", i_dem, "DEM file (.asc)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message to stderr
        return kExitUsage;
    }

    try {
        if (match_cmd->parsed())
            return cmd_match(m_dem, m_pattern, m_guess, m_measure, m_lambda, m_radius,
                             m_d1, m_angles, m_topk, m_no_norm, m_window, m_skip_angles,
                             m_threads, m_out);
        if (derive_cmd->parsed())
            return cmd_derive(d_dem, d_center, d_alpha, d_arm_points, d_spacing, d_arms,
                              d_per_group, d_abs, d_prefix);
        if (synth_cmd->parsed())
            return cmd_synth(s_spec, s_out);
        if (exp_cmd->parsed())
            return cmd_experiment(e_spec, e_out, e_dry, e_threads);
        if (info_cmd->parsed())
            return cmd_info(i_dem);
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
