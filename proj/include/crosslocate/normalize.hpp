// normalize.hpp - cloud statistics and the centered/scaled coordinate frame
// with the z penalty.
#pragma once

#include <optional>

#include "crosslocate/dem.hpp"
#include "crosslocate/pattern.hpp"
#include "crosslocate/point.hpp"

namespace crosslocate {

/// Centroid, per-axis population standard deviation and z penalty that
/// define the map (x,y,z) -> ((x-mu_x)/s_x, (y-mu_y)/s_y, lambda*(z-mu_z)/s_z).
struct NormalizationParams {
    Point3 mu;
    Point3 sigma;
    double lambda = 1.0;

    /// Pass-through frame: mu = 0, sigma = 1, with the given z penalty.
    static NormalizationParams identity(double lambda = 1.0) {
        return NormalizationParams{Point3{0, 0, 0}, Point3{1, 1, 1}, lambda};
    }
};

/// Optional axis-aligned sub-window for the statistics pass.
struct StatsWindow {
    double x_lo, x_hi, y_lo, y_hi;
};

/// Mean and population (1/N) standard deviation over the non-nodata cells,
/// optionally restricted to a window. Throws infeasible_error when fewer
/// than two points remain or any sigma component falls below 1e-9
/// (degenerate axis, e.g. perfectly flat terrain).
NormalizationParams fit_params(const DemCloud& cloud, double lambda,
                               const std::optional<StatsWindow>& window = std::nullopt);

Point3 apply(const NormalizationParams& params, const Point3& p);
Point3 apply_inverse(const NormalizationParams& params, const Point3& p);

/// Point-wise apply; ordering and arm layout preserved.
PointPattern apply_pattern(const NormalizationParams& params, const PointPattern& pattern);

} // namespace crosslocate
