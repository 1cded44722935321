// experiment.cpp
#include "crosslocate/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crosslocate/errors.hpp"
#include "crosslocate/normalize.hpp"
#include "crosslocate/rng.hpp"

namespace crosslocate {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct RunPlan {
    MeasureKind measure;
    double lambda;
    bool normalized;
};

std::vector<RunPlan> build_plan(const ExperimentSpec& spec) {
    std::vector<RunPlan> plan;
    const auto has = [&](MeasureKind m) {
        return std::find(spec.measures.begin(), spec.measures.end(), m) !=
               spec.measures.end();
    };
    // Raw-frame Wasserstein reference column first, then the normalized
    // sweeps, then Procrustes once (it is evaluated at lambda = 1).
    if (has(MeasureKind::Wasserstein)) {
        plan.push_back({MeasureKind::Wasserstein, 1.0, false});
        for (double l : spec.lambda_sweep)
            plan.push_back({MeasureKind::Wasserstein, l, true});
    }
    if (has(MeasureKind::LeastSquares))
        for (double l : spec.lambda_sweep)
            plan.push_back({MeasureKind::LeastSquares, l, true});
    if (has(MeasureKind::Procrustes))
        plan.push_back({MeasureKind::Procrustes, 1.0, true});
    return plan;
}

std::string plan_label(const RunPlan& p) {
    switch (p.measure) {
        case MeasureKind::Wasserstein:
            return p.normalized ? "W~" + fmtg(p.lambda) : "W1raw";
        case MeasureKind::LeastSquares:
            return "LS~" + fmtg(p.lambda);
        case MeasureKind::Procrustes:
            return "PC";
    }
    return "?";
}

} // namespace

DemCloud synth_terrain(const SyntheticTerrainSpec& spec) {
    if (spec.nrows < 64 || spec.ncols < 64)
        throw std::invalid_argument("synth_terrain: dimensions must be >= 64");
    if (spec.resolution <= 0.0)
        throw std::invalid_argument("synth_terrain: resolution must be > 0");
    if (spec.n_bumps < 0 || spec.amp_min < 0.0 || spec.amp_max < spec.amp_min ||
        spec.sigma_min <= 0.0 || spec.sigma_max < spec.sigma_min)
        throw std::invalid_argument("synth_terrain: bad roughness parameters");

    const int nr = spec.nrows, nc = spec.ncols;
    const double d = spec.resolution;
    std::vector<double> z(static_cast<std::size_t>(nr) * nc, 0.0);

    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            z[static_cast<std::size_t>(i) * nc + j] =
                spec.base_height + spec.trend_x * (j * d) + spec.trend_y * (i * d);

    Rng rng(spec.seed);
    const double x_max = (nc - 1) * d;
    const double y_max = (nr - 1) * d;
    for (int b = 0; b < spec.n_bumps; ++b) {
        const double cx = rng.uniform(0.0, x_max);
        const double cy = rng.uniform(0.0, y_max);
        const double amp = rng.uniform(spec.amp_min, spec.amp_max);
        const double sig = rng.uniform(spec.sigma_min, spec.sigma_max);
        const double sign = rng.unit() < 0.5 ? -1.0 : 1.0;

        const double reach = 4.0 * sig;
        const int jlo = std::max(0, static_cast<int>(std::floor((cx - reach) / d)));
        const int jhi = std::min(nc - 1, static_cast<int>(std::ceil((cx + reach) / d)));
        const int ilo = std::max(0, static_cast<int>(std::floor((cy - reach) / d)));
        const int ihi = std::min(nr - 1, static_cast<int>(std::ceil((cy + reach) / d)));
        const double inv2s2 = 1.0 / (2.0 * sig * sig);
        for (int i = ilo; i <= ihi; ++i) {
            const double dy = i * d - cy;
            for (int j = jlo; j <= jhi; ++j) {
                const double dx = j * d - cx;
                z[static_cast<std::size_t>(i) * nc + j] +=
                    sign * amp * std::exp(-(dx * dx + dy * dy) * inv2s2);
            }
        }
    }

    bool flat = true;
    for (std::size_t k = 1; k < z.size() && flat; ++k)
        flat = z[k] == z[0];
    if (flat)
        std::cerr << "synth_terrain: warning: generated terrain is flat "
                     "(sigma_z = 0); normalization will fail on it\n";

    std::vector<std::uint8_t> mask(z.size(), 0);
    return DemCloud(spec.origin_x, spec.origin_y, d, nr, nc, std::move(z), std::move(mask));
}

void ExperimentSpec::validate() const {
    if (terrain_file.has_value() == synthetic.has_value())
        throw std::invalid_argument("terrain: exactly one of file/synthetic must be set");
    if (n_trials < 1)
        throw std::invalid_argument("n_trials: must be >= 1");
    if (perturbation_range < 0.0)
        throw std::invalid_argument("perturbation_range: must be >= 0");
    if (lambda_sweep.empty())
        throw std::invalid_argument("lambda_sweep: must not be empty");
    for (double l : lambda_sweep)
        if (!(l > 0.0))
            throw std::invalid_argument("lambda_sweep: entries must be > 0");
    if (measures.empty())
        throw std::invalid_argument("measures: must not be empty");
    if (arm_length_points < 2)
        throw std::invalid_argument("cross.arm_points: must be >= 2");
    if (spacing <= 0.0)
        throw std::invalid_argument("cross.spacing: must be > 0");
    if (n_arms < 1)
        throw std::invalid_argument("cross.n_arms: must be >= 1");
    if (slope_per_group < 1)
        throw std::invalid_argument("cross.slope_per_group: must be >= 1");
    if (search.n_angles < 1)
        throw std::invalid_argument("search.n_angles: must be >= 1");
    if (search.height_tol <= 0.0)
        throw std::invalid_argument("search.d1: must be > 0");
}

TrialRecord run_trial(const DemCloud& cloud, const ExperimentSpec& spec, int trial_no) {
    TrialRecord rec;
    rec.trial_no = trial_no;

    Rng rng(spec.rng_seed ^ static_cast<std::uint64_t>(trial_no));
    const double extent = spec.arm_length_points * spec.spacing;
    const double margin = extent + 2.0 * cloud.resolution();
    const double x_lo = cloud.x_of(0) + margin;
    const double x_hi = cloud.x_of(cloud.ncols() - 1) - margin;
    const double y_lo = cloud.y_of(0) + margin;
    const double y_hi = cloud.y_of(cloud.nrows() - 1) - margin;
    if (x_lo >= x_hi || y_lo >= y_hi) {
        rec.error = "terrain too small for the cross extent";
        return rec;
    }

    const double cx = rng.uniform(x_lo, x_hi);
    const double cy = rng.uniform(y_lo, y_hi);
    rec.alpha_deg = rng.uniform(0.0, 360.0);
    rec.vx = rng.uniform(-spec.perturbation_range, spec.perturbation_range);
    rec.vy = rng.uniform(-spec.perturbation_range, spec.perturbation_range);

    CrossSpec cross_spec;
    cross_spec.center = Point3{cx, cy, 0.0};
    cross_spec.arm_length_points = spec.arm_length_points;
    cross_spec.spacing = spec.spacing;
    cross_spec.first_arm_angle_deg = rec.alpha_deg;
    cross_spec.n_arms = spec.n_arms;

    try {
        rec.cross = build_cross(cloud, cross_spec);
        const ArmDerivative deriv = arc_derivative(rec.cross);
        rec.target_indices = exact_indices(deriv, spec.slope_per_group);
        rec.target = extract_target(rec.cross, rec.target_indices);
    } catch (const std::exception& e) {
        rec.error = e.what();
        return rec;
    }
    rec.ok = true;

    rec.true_center = rec.cross.points.front();
    const PointPattern perturbed = translate_xy(rec.target, rec.vx, rec.vy);
    rec.perturbed_center = perturbed.points.front();
    rec.initial_error = dist_xy(rec.true_center, rec.perturbed_center);

    for (const RunPlan& p : build_plan(spec)) {
        MatchOutcome out;
        out.measure = p.measure;
        out.lambda = p.lambda;
        out.normalized = p.normalized;
        SearchConfig cfg = spec.search;
        cfg.measure = p.measure;
        cfg.lambda = p.lambda;
        cfg.normalize = p.normalized;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const MatchResult m = match(cloud, perturbed, rec.perturbed_center, cfg);
            out.ok = true;
            out.recovered_center = m.best_center;
            out.theta = m.best_angle;
            out.value = m.best_value;
            out.final_error = dist_xy(m.best_center, rec.true_center);
            out.evaluations = m.evaluations;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

ExperimentResult run_experiment(const DemCloud& cloud, const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult result;
    result.trials.reserve(static_cast<std::size_t>(spec.n_trials));
    for (int t = 1; t <= spec.n_trials; ++t)
        result.trials.push_back(run_trial(cloud, spec, t));
    return result;
}

namespace {

void write_trials_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    out << "trial,status,measure,lambda,normalized,true_x,true_y,true_z,"
           "perturbed_x,perturbed_y,alpha_deg,initial_error,"
           "recovered_x,recovered_y,theta_rad,best_value,final_error,evaluations\n";
    for (const auto& t : result.trials) {
        if (!t.ok) {
            out << t.trial_no << ",failed:" << t.error << ",,,,,,,,,,,,,,,,\n";
            continue;
        }
        for (const auto& o : t.outcomes) {
            out << t.trial_no << ',' << (o.ok ? "ok" : "error:" + o.error) << ','
                << measure_name(o.measure) << ',' << fmtg(o.lambda) << ','
                << (o.normalized ? 1 : 0) << ',' << fmt(t.true_center.x) << ','
                << fmt(t.true_center.y) << ',' << fmt(t.true_center.z) << ','
                << fmt(t.perturbed_center.x) << ',' << fmt(t.perturbed_center.y) << ','
                << fmt(t.alpha_deg) << ',' << fmt(t.initial_error) << ',';
            if (o.ok) {
                out << fmt(o.recovered_center.x) << ',' << fmt(o.recovered_center.y) << ','
                    << fmt(o.theta) << ',' << fmt(o.value) << ',' << fmt(o.final_error)
                    << ',' << o.evaluations;
            } else {
                out << ",,,,,";
            }
            out << '\n';
        }
    }
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

void write_summary(const ExperimentResult& result, const ExperimentSpec& spec,
                   const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");

    std::vector<RunPlan> plan;
    for (const auto& t : result.trials) {
        if (t.ok) {
            for (const auto& o : t.outcomes)
                plan.push_back({o.measure, o.lambda, o.normalized});
            break;
        }
    }

    out << "crosslocate experiment summary\n";
    out << "seed=" << spec.rng_seed << " trials=" << spec.n_trials
        << " perturbation_range=" << fmtg(spec.perturbation_range)
        << " radius=" << fmtg(spec.search.radius) << " d1=" << fmtg(spec.search.height_tol)
        << " n_angles=" << spec.search.n_angles << "\n\n";

    out << "Trial centers (meters):\n";
    out << "No.        true_x       true_y       pert_x       pert_y     distance\n";
    for (const auto& t : result.trials) {
        char buf[256];
        if (!t.ok) {
            std::snprintf(buf, sizeof buf, "%3d  failed: %s\n", t.trial_no, t.error.c_str());
            out << buf;
            continue;
        }
        std::snprintf(buf, sizeof buf, "%3d  %11.2f  %11.2f  %11.2f  %11.2f  %11.2f\n",
                      t.trial_no, t.true_center.x, t.true_center.y,
                      t.perturbed_center.x, t.perturbed_center.y, t.initial_error);
        out << buf;
    }
    out << '\n';

    out << "Final center error (meters) per measure column:\n";
    out << "No.";
    for (const auto& p : plan) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %9s", plan_label(p).c_str());
        out << buf;
    }
    out << '\n';

    std::vector<std::vector<double>> columns(plan.size());
    for (const auto& t : result.trials) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%3d", t.trial_no);
        out << buf;
        if (!t.ok) {
            out << "  (failed)\n";
            continue;
        }
        for (std::size_t c = 0; c < t.outcomes.size(); ++c) {
            const auto& o = t.outcomes[c];
            if (o.ok) {
                std::snprintf(buf, sizeof buf, " %9s", fmt2(o.final_error).c_str());
                columns[c].push_back(o.final_error);
            } else {
                std::snprintf(buf, sizeof buf, " %9s", "err");
            }
            out << buf;
        }
        out << '\n';
    }

    const auto stat_row = [&](const char* name, double (*f)(std::vector<double>&)) {
        out << name;
        for (auto& col : columns) {
            char buf[32];
            if (col.empty()) {
                std::snprintf(buf, sizeof buf, " %9s", "-");
            } else {
                std::vector<double> copy = col;
                std::snprintf(buf, sizeof buf, " %9s", fmt2(f(copy)).c_str());
            }
            out << buf;
        }
        out << '\n';
    };
    stat_row("avg", [](std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    });
    stat_row("med", [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    });
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

void write_profile_csv(const TrialRecord& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    const std::set<int> sel_idx(t.target_indices.begin(), t.target_indices.end());
    out << "arm,k,index,s,x,y,z,selected\n";
    const Point3& c = t.cross.points.front();
    out << "0,0,0,0," << fmt(c.x) << ',' << fmt(c.y) << ',' << fmt(c.z) << ",1\n";
    for (std::size_t a = 0; a < t.cross.arms.size(); ++a) {
        for (std::size_t k = 0; k < t.cross.arms[a].size(); ++k) {
            const int idx = t.cross.arms[a][k];
            const Point3& p = t.cross.points[idx];
            const double s = dist_xy(p, c);
            out << (a + 1) << ',' << (k + 1) << ',' << idx << ',' << fmt(s) << ','
                << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ','
                << (sel_idx.count(idx) ? 1 : 0) << '\n';
        }
    }
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

void write_profile_svg(const TrialRecord& t, const std::filesystem::path& path) {
    const int strip_w = 800, strip_h = 140, pad = 20;
    const int n_arms = static_cast<int>(t.cross.arms.size());
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");

    double z_lo = t.cross.points.front().z, z_hi = z_lo;
    for (const auto& p : t.cross.points) {
        z_lo = std::min(z_lo, p.z);
        z_hi = std::max(z_hi, p.z);
    }
    if (z_hi == z_lo) z_hi = z_lo + 1.0;

    const int height = n_arms * (strip_h + pad) + pad;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (strip_w + 2 * pad)
        << "\" height=\"" << height << "\">\n";
    for (int a = 0; a < n_arms; ++a) {
        const int y0 = pad + a * (strip_h + pad);
        out << "<polyline fill=\"none\" stroke=\"#336\" stroke-width=\"1\" points=\"";
        const auto& arm = t.cross.arms[a];
        for (std::size_t k = 0; k < arm.size(); ++k) {
            const double fx = static_cast<double>(k) / (arm.size() - 1);
            const double fz = (t.cross.points[arm[k]].z - z_lo) / (z_hi - z_lo);
            out << (pad + fx * strip_w) << ',' << (y0 + (1.0 - fz) * strip_h) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << pad << "\" y=\"" << (y0 - 5) << "\" font-size=\"11\">arm "
            << (a + 1) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace

void write_experiment_outputs(const ExperimentResult& result, const ExperimentSpec& spec,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_trials_csv(result, out_dir / "trials.csv");
    write_summary(result, spec, out_dir / "summary.txt");
    if (spec.emit_profiles) {
        std::filesystem::create_directories(out_dir / "profiles");
        for (const auto& t : result.trials) {
            if (!t.ok) continue;
            const std::string stem = "trial_" + std::to_string(t.trial_no);
            write_profile_csv(t, out_dir / "profiles" / (stem + ".csv"));
            if (spec.emit_svg)
                write_profile_svg(t, out_dir / "profiles" / (stem + ".svg"));
        }
    }
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path.string() + ": invalid JSON: " + e.what());
    }

    const auto reject_unknown = [&](const nlohmann::json& obj,
                                    const std::set<std::string>& allowed,
                                    const std::string& where) {
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key))
                throw format_error(path.string() + ": unknown field '" + where + key + "'");
    };

    ExperimentSpec spec;
    try {
        reject_unknown(j, {"terrain", "n_trials", "perturbation_range", "lambda_sweep",
                           "measures", "rng_seed", "cross", "search", "emit_profiles",
                           "emit_svg"},
                       "");
        const auto& jt = j.at("terrain");
        reject_unknown(jt, {"file", "synthetic"}, "terrain.");
        if (jt.contains("file")) {
            spec.terrain_file = std::filesystem::path(jt.at("file").get<std::string>());
        }
        if (jt.contains("synthetic")) {
            const auto& js = jt.at("synthetic");
            reject_unknown(js,
                           {"seed", "nrows", "ncols", "resolution", "origin_x", "origin_y",
                            "base_height", "trend_x", "trend_y", "n_bumps", "amp_min",
                            "amp_max", "sigma_min", "sigma_max"},
                           "terrain.synthetic.");
            SyntheticTerrainSpec s;
            s.seed = js.value("seed", s.seed);
            s.nrows = js.value("nrows", s.nrows);
            s.ncols = js.value("ncols", s.ncols);
            s.resolution = js.value("resolution", s.resolution);
            s.origin_x = js.value("origin_x", s.origin_x);
            s.origin_y = js.value("origin_y", s.origin_y);
            s.base_height = js.value("base_height", s.base_height);
            s.trend_x = js.value("trend_x", s.trend_x);
            s.trend_y = js.value("trend_y", s.trend_y);
            s.n_bumps = js.value("n_bumps", s.n_bumps);
            s.amp_min = js.value("amp_min", s.amp_min);
            s.amp_max = js.value("amp_max", s.amp_max);
            s.sigma_min = js.value("sigma_min", s.sigma_min);
            s.sigma_max = js.value("sigma_max", s.sigma_max);
            spec.synthetic = s;
        }
        spec.n_trials = j.value("n_trials", spec.n_trials);
        spec.perturbation_range = j.value("perturbation_range", spec.perturbation_range);
        if (j.contains("lambda_sweep"))
            spec.lambda_sweep = j.at("lambda_sweep").get<std::vector<double>>();
        if (j.contains("measures")) {
            spec.measures.clear();
            for (const auto& m : j.at("measures"))
                spec.measures.push_back(parse_measure(m.get<std::string>()));
        }
        spec.rng_seed = j.value("rng_seed", spec.rng_seed);
        if (j.contains("cross")) {
            const auto& jc = j.at("cross");
            reject_unknown(jc, {"arm_points", "spacing", "n_arms", "slope_per_group"},
                           "cross.");
            spec.arm_length_points = jc.value("arm_points", spec.arm_length_points);
            spec.spacing = jc.value("spacing", spec.spacing);
            spec.n_arms = jc.value("n_arms", spec.n_arms);
            spec.slope_per_group = jc.value("slope_per_group", spec.slope_per_group);
        }
        if (j.contains("search")) {
            const auto& js = j.at("search");
            reject_unknown(js, {"radius", "d1", "n_angles", "window", "top_k", "threads"},
                           "search.");
            spec.search.radius = js.value("radius", spec.search.radius);
            spec.search.height_tol = js.value("d1", spec.search.height_tol);
            spec.search.n_angles = js.value("n_angles", spec.search.n_angles);
            spec.search.top_k = js.value("top_k", spec.search.top_k);
            spec.search.threads = js.value("threads", spec.search.threads);
            if (js.contains("window")) {
                const std::string w = js.at("window").get<std::string>();
                if (w == "full")
                    spec.search.window = NormWindow::FullCloud;
                else if (w == "box")
                    spec.search.window = NormWindow::Box;
                else
                    throw format_error(path.string() + ": search.window must be full|box");
            }
        }
        spec.emit_profiles = j.value("emit_profiles", spec.emit_profiles);
        spec.emit_svg = j.value("emit_svg", spec.emit_svg);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path.string() + ": bad experiment spec: " + e.what());
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw format_error(path.string() + ": " + e.what());
    }
    return spec;
}

} // namespace crosslocate
