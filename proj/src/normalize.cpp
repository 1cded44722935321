// normalize.cpp
#include "crosslocate/normalize.hpp"

#include <cmath>

#include "crosslocate/errors.hpp"

namespace crosslocate {

NormalizationParams fit_params(const DemCloud& cloud, double lambda,
                               const std::optional<StatsWindow>& window) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("fit_params: lambda must be > 0");

    const auto inside = [&](double x, double y) {
        if (!window) return true;
        return x >= window->x_lo && x <= window->x_hi &&
               y >= window->y_lo && y <= window->y_hi;
    };

    long n = 0;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int i = 0; i < cloud.nrows(); ++i) {
        const double y = cloud.y_of(i);
        for (int j = 0; j < cloud.ncols(); ++j) {
            if (cloud.is_nodata(i, j)) continue;
            const double x = cloud.x_of(j);
            if (!inside(x, y)) continue;
            sx += x;
            sy += y;
            sz += cloud.height(i, j);
            ++n;
        }
    }
    if (n < 2)
        throw infeasible_error("fit_params: fewer than two points in the statistics window");
    NormalizationParams params;
    params.lambda = lambda;
    params.mu = Point3{sx / n, sy / n, sz / n};

    double vx = 0.0, vy = 0.0, vz = 0.0;
    for (int i = 0; i < cloud.nrows(); ++i) {
        const double y = cloud.y_of(i);
        for (int j = 0; j < cloud.ncols(); ++j) {
            if (cloud.is_nodata(i, j)) continue;
            const double x = cloud.x_of(j);
            if (!inside(x, y)) continue;
            const double dx = x - params.mu.x;
            const double dy = y - params.mu.y;
            const double dz = cloud.height(i, j) - params.mu.z;
            vx += dx * dx;
            vy += dy * dy;
            vz += dz * dz;
        }
    }
    params.sigma = Point3{std::sqrt(vx / n), std::sqrt(vy / n), std::sqrt(vz / n)};
    if (params.sigma.x < 1e-9 || params.sigma.y < 1e-9 || params.sigma.z < 1e-9)
        throw infeasible_error("fit_params: degenerate cloud (a standard deviation is ~0)");
    return params;
}

Point3 apply(const NormalizationParams& params, const Point3& p) {
    return Point3{(p.x - params.mu.x) / params.sigma.x,
                  (p.y - params.mu.y) / params.sigma.y,
                  params.lambda * (p.z - params.mu.z) / params.sigma.z};
}

Point3 apply_inverse(const NormalizationParams& params, const Point3& p) {
    return Point3{p.x * params.sigma.x + params.mu.x,
                  p.y * params.sigma.y + params.mu.y,
                  p.z * params.sigma.z / params.lambda + params.mu.z};
}

PointPattern apply_pattern(const NormalizationParams& params, const PointPattern& pattern) {
    PointPattern out = pattern;
    for (auto& p : out.points)
        p = apply(params, p);
    return out;
}

} // namespace crosslocate
