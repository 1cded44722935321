// search.cpp
#include "crosslocate/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "crosslocate/errors.hpp"

namespace crosslocate {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

bool score_less(const CandidateScore& a, const CandidateScore& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.center_index != b.center_index) return a.center_index < b.center_index;
    return a.angle_index < b.angle_index;
}

void validate(const DemCloud& cloud, const PointPattern& reference,
              const SearchConfig& config) {
    if (reference.points.empty())
        throw std::invalid_argument("match: empty reference pattern");
    if (!(config.radius > cloud.resolution()))
        throw std::invalid_argument("match: requires radius > grid resolution");
    if (!(config.height_tol > 0.0))
        throw std::invalid_argument("match: requires height_tol > 0");
    if (config.n_angles < 1)
        throw std::invalid_argument("match: requires n_angles >= 1");
    if (!(config.lambda > 0.0))
        throw std::invalid_argument("match: requires lambda > 0");
}

} // namespace

Projection project_pattern(const DemCloud& cloud, const PointPattern& reference,
                           const Point3& center, double theta, double d1) {
    if (reference.points.empty())
        throw std::invalid_argument("project_pattern: empty reference pattern");

    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Point3 t0 = reference.points.front();
    const double tol = 0.5 * d1;

    Projection out;
    out.pattern.points.reserve(reference.points.size());
    for (std::size_t j = 0; j < reference.points.size(); ++j) {
        const double dx = reference.points[j].x - t0.x;
        const double dy = reference.points[j].y - t0.y;
        const double nx = center.x + (c * dx - s * dy);
        const double ny = center.y + (s * dx + c * dy);
        const Point3 snapped = cloud.nearest_xy(nx, ny);
        if (std::fabs(snapped.x - nx) > tol || std::fabs(snapped.y - ny) > tol) {
            out.feasible = false;
            out.violating_index = static_cast<int>(j);
            return out;
        }
        out.pattern.points.push_back(snapped);
    }
    return out;
}

MatchResult match(const DemCloud& cloud, const PointPattern& reference,
                  const Point3& guess, const SearchConfig& config) {
    validate(cloud, reference, config);

    const std::vector<Point3> centers =
        cloud.candidate_centers(guess, config.radius, config.height_tol);
    if (centers.empty())
        throw infeasible_error("match: no candidate centers in the search window");

    NormalizationParams params = NormalizationParams::identity(config.lambda);
    if (config.normalize) {
        std::optional<StatsWindow> window;
        if (config.window == NormWindow::Box) {
            double pat_radius = 0.0;
            for (const auto& p : reference.points)
                pat_radius = std::max(pat_radius, dist_inf_xy(p, reference.points.front()));
            const double half = config.radius + pat_radius + cloud.resolution();
            window = StatsWindow{guess.x - half, guess.x + half,
                                 guess.y - half, guess.y + half};
        }
        params = fit_params(cloud, config.lambda, window);
    }

    const int n_angles =
        (config.measure == MeasureKind::Procrustes && config.skip_angles_for_procrustes)
            ? 1
            : config.n_angles;

    // Rotated copies of the reference, raw and in the measure frame.
    std::vector<double> thetas(n_angles);
    std::vector<PointPattern> ref_rotated(n_angles);
    std::vector<PointPattern> ref_scaled(n_angles);
    for (int a = 0; a < n_angles; ++a) {
        thetas[a] = kTwoPi * a / config.n_angles;
        ref_rotated[a] = rotate(reference, thetas[a]);
        ref_scaled[a] = apply_pattern(params, ref_rotated[a]);
    }

    struct Local {
        bool has_best = false;
        CandidateScore best;
        std::vector<CandidateScore> top;
        long evaluations = 0;
        long infeasible = 0;
    };

    const int n_centers = static_cast<int>(centers.size());
    int n_threads = config.threads > 0
                        ? config.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, n_centers));
    const std::size_t keep = static_cast<std::size_t>(std::max(config.top_k, 1));

    std::vector<Local> locals(n_threads);
    const auto worker = [&](int t) {
        Local& local = locals[t];
        const int lo = static_cast<int>(static_cast<long>(n_centers) * t / n_threads);
        const int hi = static_cast<int>(static_cast<long>(n_centers) * (t + 1) / n_threads);
        for (int ci = lo; ci < hi; ++ci) {
            for (int ai = 0; ai < n_angles; ++ai) {
                Projection proj = project_pattern(cloud, reference, centers[ci],
                                                  thetas[ai], config.height_tol);
                if (!proj.feasible) {
                    ++local.infeasible;
                    continue;
                }
                const PointPattern q_scaled = apply_pattern(params, proj.pattern);
                const double value = evaluate(config.measure, ref_scaled[ai], q_scaled);
                ++local.evaluations;
                const CandidateScore score{value, centers[ci], thetas[ai], ci, ai};
                if (!local.has_best || score_less(score, local.best)) {
                    local.has_best = true;
                    local.best = score;
                }
                if (local.top.size() < keep || score_less(score, local.top.back())) {
                    local.top.insert(std::upper_bound(local.top.begin(), local.top.end(),
                                                      score, score_less),
                                     score);
                    if (local.top.size() > keep) local.top.pop_back();
                }
            }
        }
    };

    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker, t);
        for (auto& th : pool)
            th.join();
    }

    MatchResult result;
    result.candidates_total = n_centers;
    result.params = params;
    bool any = false;
    CandidateScore best{};
    std::vector<CandidateScore> merged;
    for (const auto& local : locals) {
        result.evaluations += local.evaluations;
        result.infeasible += local.infeasible;
        if (local.has_best && (!any || score_less(local.best, best))) {
            any = true;
            best = local.best;
        }
        merged.insert(merged.end(), local.top.begin(), local.top.end());
    }
    if (!any)
        throw infeasible_error("match: every candidate violated the d1/2 snap tolerance");

    std::sort(merged.begin(), merged.end(), score_less);
    if (merged.size() > keep) merged.resize(keep);
    result.top_k = std::move(merged);

    result.best_center = best.center;
    result.best_angle = best.angle;
    result.best_value = best.value;
    result.best_center_index = best.center_index;
    result.best_angle_index = best.angle_index;
    result.best_pattern = project_pattern(cloud, reference, best.center, best.angle,
                                          config.height_tol)
                              .pattern;
    return result;
}

std::string match_report_json(const MatchResult& result, const SearchConfig& config) {
    nlohmann::json j;
    j["best"] = {{"x", result.best_center.x},
                 {"y", result.best_center.y},
                 {"z", result.best_center.z},
                 {"theta_rad", result.best_angle},
                 {"value", result.best_value},
                 {"measure", measure_name(config.measure)},
                 {"lambda", config.lambda}};
    j["candidates_total"] = result.candidates_total;
    j["candidates_evaluated"] = result.evaluations;
    j["candidates_infeasible"] = result.infeasible;
    auto& topk = j["top_k"] = nlohmann::json::array();
    for (const auto& s : result.top_k)
        topk.push_back({{"x", s.center.x},
                        {"y", s.center.y},
                        {"z", s.center.z},
                        {"theta_rad", s.angle},
                        {"value", s.value}});
    j["normalization"] = {{"mu", {result.params.mu.x, result.params.mu.y, result.params.mu.z}},
                          {"sigma", {result.params.sigma.x, result.params.sigma.y, result.params.sigma.z}},
                          {"lambda", result.params.lambda},
                          {"normalized", config.normalize}};
    auto& pat = j["pattern"] = nlohmann::json::array();
    for (const auto& p : result.best_pattern.points)
        pat.push_back({{"x", p.x}, {"y", p.y}, {"z", p.z}});
    return j.dump(2);
}

void write_match_report(const MatchResult& result, const SearchConfig& config,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    out << match_report_json(result, config) << '\n';
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

} // namespace crosslocate
