// experiment.hpp - synthetic evaluation protocol: plant a cross on terrain,
// derive the 41-point target, perturb it, and score recovery across
// measures and z penalties.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crosslocate/dem.hpp"
#include "crosslocate/derivative.hpp"
#include "crosslocate/pattern.hpp"
#include "crosslocate/search.hpp"

namespace crosslocate {

/// Seeded sum of Gaussian bumps over a linear trend. Per bump the draw
/// order is cx, cy, amplitude, sigma, sign; bump k is rasterized over
/// [c - 4*sigma, c + 4*sigma] before bump k+1, so a seed pins the terrain
/// bit-for-bit.
struct SyntheticTerrainSpec {
    std::uint64_t seed = 1;
    int nrows = 512;
    int ncols = 512;
    double resolution = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double base_height = 120.0;
    double trend_x = 0.02;   // meters of z per meter east of the origin
    double trend_y = -0.015; // meters of z per meter north of the origin
    int n_bumps = 180;
    double amp_min = 2.0;
    double amp_max = 9.0;
    double sigma_min = 8.0;
    double sigma_max = 30.0;
};

/// Requires nrows, ncols >= 64. Warns on stderr when the parameters can
/// only produce flat terrain (normalization would fail downstream).
DemCloud synth_terrain(const SyntheticTerrainSpec& spec);

struct ExperimentSpec {
    std::optional<std::filesystem::path> terrain_file; // exactly one of
    std::optional<SyntheticTerrainSpec> synthetic;     // these two is set
    int n_trials = 8;
    double perturbation_range = 400.0; // v components uniform in [-range, range]
    std::vector<double> lambda_sweep = {1, 20, 40, 60, 80, 100, 200};
    std::vector<MeasureKind> measures = {MeasureKind::Wasserstein,
                                         MeasureKind::LeastSquares,
                                         MeasureKind::Procrustes};
    std::uint64_t rng_seed = 1;
    int arm_length_points = 100;
    double spacing = 1.0;
    int n_arms = 4;
    int slope_per_group = 9;
    SearchConfig search; // measure / lambda / normalize overridden per run
    bool emit_profiles = true;
    bool emit_svg = false;

    void validate() const; // throws invalid_argument naming the field
};

/// One matcher run inside a trial. The raw-frame Wasserstein reference
/// column has normalized = false and lambda = 1.
struct MatchOutcome {
    MeasureKind measure = MeasureKind::Wasserstein;
    double lambda = 1.0;
    bool normalized = true;
    bool ok = false;
    std::string error;
    Point3 recovered_center;
    double theta = 0.0;
    double value = 0.0;
    double final_error = 0.0; // xy distance recovered vs true center
    long evaluations = 0;
    double wall_time_s = 0.0; // never written to deterministic outputs
};

struct TrialRecord {
    int trial_no = 0;
    bool ok = false;
    std::string error;
    Point3 true_center;      // snapped cross center
    Point3 perturbed_center; // true center + v
    double alpha_deg = 0.0;
    double vx = 0.0, vy = 0.0;
    double initial_error = 0.0; // xy distance true vs perturbed
    std::vector<MatchOutcome> outcomes;
    PointPattern cross;              // 401-point initialization pattern
    PointPattern target;             // 41-point reference pattern
    std::vector<int> target_indices; // cross indices forming the target
};

/// Per-trial seeding is rng_seed ^ trial_no (trials are numbered from 1),
/// draw order x, y, alpha, vx, vy. The perturbed pattern is the matcher
/// input and its center the search guess.
TrialRecord run_trial(const DemCloud& cloud, const ExperimentSpec& spec, int trial_no);

struct ExperimentResult {
    std::vector<TrialRecord> trials;
};

/// All trials from one seed stream; construction failures are recorded and
/// the batch continues.
ExperimentResult run_experiment(const DemCloud& cloud, const ExperimentSpec& spec);

/// trials.csv, summary.txt and per-trial profile CSVs (plus SVGs when
/// enabled) under out_dir. Outputs are byte-stable for a given spec.
void write_experiment_outputs(const ExperimentResult& result, const ExperimentSpec& spec,
                              const std::filesystem::path& out_dir);

/// Experiment config file (JSON). Unknown fields are rejected.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

} // namespace crosslocate
