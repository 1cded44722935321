// derivative.hpp - chord-normalized height derivative along cross arms
// and selection of the high-slope target indices.
#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "crosslocate/pattern.hpp"

namespace crosslocate {

/// Slope values keyed by cross point index. For a pattern of n_arms arms
/// of arm_len points the derivative exists on every arm index except the
/// outermost point of each arm: the first point of an arm differences
/// against the center, interior points use the central scheme.
struct ArmDerivative {
    std::map<int, double> values; // index -> dz/ds (dimensionless)
    int n_arms = 0;
    int arm_len = 0;
};

/// Discrete arc-length derivative of the height profile:
///   interior k:   (z[k+1] - z[k-1]) / chord_xy(k+1, k-1)
///   arm-first k:  (z[k+1] - z[0])   / chord_xy(k+1, 0)
/// Requires the cross layout produced by build_cross (arms populated).
/// Throws infeasible_error on a zero chord (coincident snapped points).
ArmDerivative arc_derivative(const PointPattern& cross);

/// Per arm group, the `per_group` indices of highest derivative value
/// (highest |value| when use_abs), ties to the smaller index; unioned
/// with the center and the outermost index of each arm; sorted ascending.
/// For the 401-point cross with per_group = 9 this is exactly 41 indices.
std::vector<int> exact_indices(const ArmDerivative& deriv, int per_group = 9,
                               bool use_abs = false);

/// Pattern made of the cross points at `indices` (sorted, containing 0),
/// preserving order so index 0 stays the center.
PointPattern extract_target(const PointPattern& cross, const std::vector<int>& indices);

/// CSV with columns index,dz_ds in ascending index order.
void write_derivative_csv(const ArmDerivative& deriv, const std::filesystem::path& path);

} // namespace crosslocate
