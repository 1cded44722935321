// pattern.hpp - ordered point patterns with a distinguished center:
// cross construction on a DEM, z-axis rotation, planar translation.
#pragma once

#include <filesystem>
#include <vector>

#include "crosslocate/dem.hpp"
#include "crosslocate/point.hpp"

namespace crosslocate {

/// Ordered pattern; index 0 is the center. Ordering is significant
/// (the least-squares measure pairs points by index) and every
/// transform preserves it. `arms` optionally records, per arm, the
/// ordered point indices belonging to it; empty means unknown.
struct PointPattern {
    std::vector<Point3> points;
    std::vector<std::vector<int>> arms;

    std::size_t size() const { return points.size(); }
    const Point3& center() const { return points.front(); }
};

/// Geometry of a survey cross: n_arms arms of arm_length_points samples
/// each, `spacing` meters apart, first arm at bearing alpha_deg measured
/// anti-clockwise from North. Arm k sits at alpha_deg + 90*k.
struct CrossSpec {
    Point3 center;               // z is ignored; filled from the DEM
    int arm_length_points = 100;
    double spacing = 1.0;
    double first_arm_angle_deg = 0.0;
    int n_arms = 4;

    int total_points() const { return n_arms * arm_length_points + 1; }
};

/// Unit direction for a bearing in degrees anti-clockwise from North
/// (+y axis): direction(a) = (-sin a, cos a).
inline void bearing_direction(double alpha_deg, double& ux, double& uy) {
    const double a = alpha_deg * (3.14159265358979323846 / 180.0);
    ux = -std::sin(a);
    uy = std::cos(a);
}

/// Rotate every point about the pattern center by theta (radians,
/// anti-clockwise); z values and ordering are untouched.
PointPattern rotate(const PointPattern& pattern, double theta);

/// Shift all (x, y) by v; z unchanged.
PointPattern translate_xy(const PointPattern& pattern, double vx, double vy);

/// Build the initialization pattern: center plus n_arms*arm_length_points
/// samples snapped to DEM nodes, heights read from the grid. Index 0 is
/// the center, indices within each arm run outward.
/// Throws infeasible_error naming the arm and index when a nominal
/// position leaves the DEM footprint or lands on a nodata hole.
PointPattern build_cross(const DemCloud& cloud, const CrossSpec& spec);

/// Pattern JSON: {"center_index": 0, "points": [{"x","y","z"},...],
/// "arms": [[...],...]}. Coordinates survive round-trips bit-for-bit.
PointPattern read_pattern_json(const std::filesystem::path& path);
void write_pattern_json(const PointPattern& pattern, const std::filesystem::path& path);

} // namespace crosslocate
