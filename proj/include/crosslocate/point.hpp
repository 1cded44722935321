// point.hpp - basic 3-D sample type and small vector helpers.
#pragma once

#include <algorithm>
#include <cmath>

namespace crosslocate {

// One elevation sample: planar easting/northing and height, all in meters.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline double dist_xy(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double dist2_xyz(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline double dist_inf_xy(const Point3& a, const Point3& b) {
    return std::max(std::fabs(a.x - b.x), std::fabs(a.y - b.y));
}

} // namespace crosslocate
