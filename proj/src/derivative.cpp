// derivative.cpp
#include "crosslocate/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "crosslocate/errors.hpp"

namespace crosslocate {

namespace {

void check_cross_layout(const PointPattern& cross, int& n_arms, int& arm_len) {
    if (cross.arms.empty())
        throw std::invalid_argument("arc_derivative: pattern has no arm layout");
    n_arms = static_cast<int>(cross.arms.size());
    arm_len = static_cast<int>(cross.arms.front().size());
    if (arm_len < 2)
        throw std::invalid_argument("arc_derivative: arms must have at least 2 points");
    for (int a = 0; a < n_arms; ++a) {
        if (static_cast<int>(cross.arms[a].size()) != arm_len)
            throw std::invalid_argument("arc_derivative: ragged arm layout");
        for (int k = 0; k < arm_len; ++k) {
            if (cross.arms[a][k] != 1 + a * arm_len + k)
                throw std::invalid_argument("arc_derivative: arm indices must be contiguous");
        }
    }
    if (static_cast<std::size_t>(n_arms) * arm_len + 1 != cross.points.size())
        throw std::invalid_argument("arc_derivative: arm layout does not cover the pattern");
}

} // namespace

ArmDerivative arc_derivative(const PointPattern& cross) {
    ArmDerivative out;
    check_cross_layout(cross, out.n_arms, out.arm_len);

    const auto& pts = cross.points;
    const auto slope = [&](int k, int hi, int lo) {
        const double dx = pts[hi].x - pts[lo].x;
        const double dy = pts[hi].y - pts[lo].y;
        const double chord = std::sqrt(dy * dy + dx * dx);
        if (chord == 0.0)
            throw infeasible_error("arc_derivative: zero chord at index " + std::to_string(k));
        return (pts[hi].z - pts[lo].z) / chord;
    };

    for (int a = 0; a < out.n_arms; ++a) {
        const int first = 1 + a * out.arm_len;
        const int last = first + out.arm_len - 1; // outermost point: no value
        out.values[first] = slope(first, first + 1, 0);
        for (int k = first + 1; k < last; ++k)
            out.values[k] = slope(k, k + 1, k - 1);
    }
    return out;
}

std::vector<int> exact_indices(const ArmDerivative& deriv, int per_group, bool use_abs) {
    if (per_group <= 0)
        throw std::invalid_argument("exact_indices: per_group must be positive");

    std::vector<int> out;
    out.push_back(0);
    for (int a = 0; a < deriv.n_arms; ++a) {
        const int first = 1 + a * deriv.arm_len;
        const int last = first + deriv.arm_len - 1;
        out.push_back(last);

        // Group = arm indices with a defined derivative, i.e. [first, last).
        std::vector<int> group;
        group.reserve(static_cast<std::size_t>(deriv.arm_len) - 1);
        for (int k = first; k < last; ++k)
            group.push_back(k);
        const auto key = [&](int k) {
            const double v = deriv.values.at(k);
            return use_abs ? std::fabs(v) : v;
        };
        // Highest value first, ties to the smaller index.
        std::sort(group.begin(), group.end(), [&](int a_, int b_) {
            const double va = key(a_), vb = key(b_);
            if (va != vb) return va > vb;
            return a_ < b_;
        });
        const int take = std::min<int>(per_group, static_cast<int>(group.size()));
        out.insert(out.end(), group.begin(), group.begin() + take);
    }
    std::sort(out.begin(), out.end());
    return out;
}

PointPattern extract_target(const PointPattern& cross, const std::vector<int>& indices) {
    if (indices.empty() || indices.front() != 0)
        throw std::invalid_argument("extract_target: indices must be sorted and contain 0");
    PointPattern out;
    out.points.reserve(indices.size());
    int prev = -1;
    for (int idx : indices) {
        if (idx <= prev)
            throw std::invalid_argument("extract_target: indices must be strictly ascending");
        if (idx < 0 || idx >= static_cast<int>(cross.points.size()))
            throw std::invalid_argument("extract_target: index " + std::to_string(idx) +
                                        " out of range");
        out.points.push_back(cross.points[idx]);
        prev = idx;
    }
    return out;
}

void write_derivative_csv(const ArmDerivative& deriv, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    out << "index,dz_ds\n";
    char buf[64];
    for (const auto& [k, v] : deriv.values) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, v);
        out << buf;
    }
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

} // namespace crosslocate
