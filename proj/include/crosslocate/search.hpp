// search.hpp - candidate-center x angle grid search: project the rotated
// reference pattern onto the DEM and return the measure argmin.
#pragma once

#include <filesystem>
#include <vector>

#include "crosslocate/dem.hpp"
#include "crosslocate/measures.hpp"
#include "crosslocate/normalize.hpp"
#include "crosslocate/pattern.hpp"

namespace crosslocate {

enum class NormWindow { FullCloud, Box };

struct SearchConfig {
    double radius = 450.0;    // r: infinity-norm half-width of the center window
    double height_tol = 1.0;  // d1: |z - guess.z| bound; d1/2 is the snap tolerance
    int n_angles = 360;       // theta_k = 2*pi*k / n_angles, k = 0..n_angles-1
    double lambda = 1.0;
    MeasureKind measure = MeasureKind::Wasserstein;
    bool normalize = true;    // false: compare in raw meters (lambda still scales z)
    NormWindow window = NormWindow::FullCloud;
    int top_k = 16;
    int threads = 0;          // 0 = hardware concurrency
    bool skip_angles_for_procrustes = false;
};

struct CandidateScore {
    double value = 0.0;
    Point3 center;
    double angle = 0.0;
    int center_index = 0; // position in the row-major candidate list
    int angle_index = 0;
};

struct MatchResult {
    Point3 best_center;
    double best_angle = 0.0;
    double best_value = 0.0;
    int best_center_index = 0;
    int best_angle_index = 0;
    PointPattern best_pattern; // Q at the argmin, in raw meters
    std::vector<CandidateScore> top_k; // ascending by (value, center, angle)
    long candidates_total = 0;      // centers passing the z/radius filter
    long evaluations = 0;           // feasible (center, angle) pairs scored
    long infeasible = 0;            // pairs rejected by the d1/2 snap tolerance
    NormalizationParams params;     // frame the measure was evaluated in
};

struct Projection {
    PointPattern pattern;
    bool feasible = true;
    int violating_index = -1;
};

/// Q for one (center, theta): rotate the reference offsets about the given
/// center, snap every nominal position to the nearest DEM node and read z
/// there. Infeasible (not an error) when a snapped node misses its nominal
/// position by more than d1/2 in x or y.
Projection project_pattern(const DemCloud& cloud, const PointPattern& reference,
                           const Point3& center, double theta, double d1);

/// Evaluate the chosen measure in the normalized frame for every candidate
/// center and discretized angle; return the minimizer. Ties break toward the
/// smaller row-major center index, then the smaller angle index, so results
/// are bit-identical regardless of thread count.
MatchResult match(const DemCloud& cloud, const PointPattern& reference,
                  const Point3& guess, const SearchConfig& config);

/// Report JSON: {"best": {...}, "candidates_evaluated": n, "top_k": [...], ...}.
void write_match_report(const MatchResult& result, const SearchConfig& config,
                        const std::filesystem::path& path);
std::string match_report_json(const MatchResult& result, const SearchConfig& config);

} // namespace crosslocate
