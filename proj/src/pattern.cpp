// pattern.cpp - cross construction, rigid pattern transforms, JSON io.
#include "crosslocate/pattern.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "crosslocate/errors.hpp"

namespace crosslocate {

PointPattern rotate(const PointPattern& pattern, double theta) {
    if (pattern.points.empty())
        throw std::invalid_argument("rotate: empty pattern");
    if (theta == 0.0) return pattern; // keep rot(0) an exact identity
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Point3 t0 = pattern.points.front();
    PointPattern out = pattern;
    for (auto& p : out.points) {
        const double dx = p.x - t0.x;
        const double dy = p.y - t0.y;
        p.x = t0.x + (c * dx - s * dy);
        p.y = t0.y + (s * dx + c * dy);
    }
    return out;
}

PointPattern translate_xy(const PointPattern& pattern, double vx, double vy) {
    PointPattern out = pattern;
    for (auto& p : out.points) {
        p.x += vx;
        p.y += vy;
    }
    return out;
}

PointPattern build_cross(const DemCloud& cloud, const CrossSpec& spec) {
    if (spec.arm_length_points <= 0 || spec.n_arms <= 0)
        throw std::invalid_argument("build_cross: arm_length_points and n_arms must be positive");
    if (spec.spacing <= 0.0)
        throw std::invalid_argument("build_cross: spacing must be > 0");

    const double snap_tol = 0.5 * cloud.resolution() + 1e-9;
    const auto snap = [&](double nx, double ny, const std::string& what) -> Point3 {
        const Point3 p = cloud.nearest_xy(nx, ny);
        if (std::fabs(p.x - nx) > snap_tol || std::fabs(p.y - ny) > snap_tol)
            throw infeasible_error("build_cross: " + what +
                                   " is outside the DEM or on a nodata hole");
        return p;
    };

    PointPattern out;
    out.points.reserve(static_cast<std::size_t>(spec.total_points()));
    out.points.push_back(snap(spec.center.x, spec.center.y, "center"));
    out.arms.assign(spec.n_arms, {});

    for (int arm = 0; arm < spec.n_arms; ++arm) {
        double ux = 0.0, uy = 0.0;
        bearing_direction(spec.first_arm_angle_deg + 90.0 * arm, ux, uy);
        auto& arm_indices = out.arms[arm];
        arm_indices.reserve(static_cast<std::size_t>(spec.arm_length_points));
        for (int k = 1; k <= spec.arm_length_points; ++k) {
            const double nx = out.points[0].x + k * spec.spacing * ux;
            const double ny = out.points[0].y + k * spec.spacing * uy;
            const std::string what =
                "arm " + std::to_string(arm + 1) + " point " + std::to_string(k);
            arm_indices.push_back(static_cast<int>(out.points.size()));
            out.points.push_back(snap(nx, ny, what));
        }
    }
    return out;
}

PointPattern read_pattern_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path.string() + ": invalid JSON: " + e.what());
    }
    PointPattern out;
    try {
        if (j.value("center_index", 0) != 0)
            throw format_error(path.string() + ": center_index must be 0");
        for (const auto& jp : j.at("points")) {
            Point3 p{jp.at("x").get<double>(), jp.at("y").get<double>(),
                     jp.at("z").get<double>()};
            if (!p.finite())
                throw format_error(path.string() + ": non-finite coordinate");
            out.points.push_back(p);
        }
        if (j.contains("arms")) {
            for (const auto& ja : j.at("arms")) {
                std::vector<int> arm;
                for (const auto& ji : ja) {
                    const int idx = ji.get<int>();
                    if (idx < 0 || idx >= static_cast<int>(out.points.size()))
                        throw format_error(path.string() + ": arm index out of range");
                    arm.push_back(idx);
                }
                out.arms.push_back(std::move(arm));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path.string() + ": bad pattern schema: " + e.what());
    }
    if (out.points.empty())
        throw format_error(path.string() + ": pattern has no points");
    return out;
}

void write_pattern_json(const PointPattern& pattern, const std::filesystem::path& path) {
    nlohmann::json j;
    j["center_index"] = 0;
    auto& jp = j["points"] = nlohmann::json::array();
    for (const auto& p : pattern.points)
        jp.push_back({{"x", p.x}, {"y", p.y}, {"z", p.z}});
    if (!pattern.arms.empty())
        j["arms"] = pattern.arms;
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

} // namespace crosslocate
