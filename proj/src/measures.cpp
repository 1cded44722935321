// measures.cpp
#include "crosslocate/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "crosslocate/assignment.hpp"

namespace crosslocate {

namespace {

void require_equal_size(const PointPattern& U, const PointPattern& V, const char* op) {
    if (U.points.empty() || U.points.size() != V.points.size())
        throw std::invalid_argument(std::string(op) + ": patterns must be non-empty and equal-sized");
}

} // namespace

const char* measure_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::Wasserstein: return "w2";
        case MeasureKind::LeastSquares: return "ls";
        case MeasureKind::Procrustes: return "procrustes";
    }
    return "?";
}

MeasureKind parse_measure(const std::string& name) {
    std::string s;
    for (char c : name)
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "w2" || s == "wasserstein" || s == "w") return MeasureKind::Wasserstein;
    if (s == "ls" || s == "l2" || s == "leastsquares" || s == "least_squares")
        return MeasureKind::LeastSquares;
    if (s == "procrustes" || s == "pc" || s == "p") return MeasureKind::Procrustes;
    throw std::invalid_argument("unknown measure '" + name + "'");
}

W2Result wasserstein2(const PointPattern& U, const PointPattern& V) {
    require_equal_size(U, V, "wasserstein2");
    const int n = static_cast<int>(U.points.size());
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[i * static_cast<std::size_t>(n) + j] = dist2_xyz(U.points[i], V.points[j]);

    const AssignmentResult assigned = solve_assignment(cost, n);
    W2Result out;
    out.assignment = assigned.row_to_col;
    out.assignment_cost = assigned.cost;
    out.value = std::sqrt(assigned.cost / n);
    return out;
}

TransportPlan transport_plan(const W2Result& result) {
    TransportPlan plan;
    plan.size = result.assignment.size();
    plan.weights.assign(plan.size * plan.size, 0.0);
    const double w = 1.0 / static_cast<double>(plan.size);
    for (std::size_t i = 0; i < plan.size; ++i)
        plan.weights[i * plan.size + result.assignment[i]] = w;
    return plan;
}

double least_squares(const PointPattern& U, const PointPattern& V) {
    require_equal_size(U, V, "least_squares");
    double s = 0.0;
    for (std::size_t i = 0; i < U.points.size(); ++i)
        s += dist2_xyz(U.points[i], V.points[i]);
    return std::sqrt(s);
}

ProcrustesResult procrustes(const PointPattern& U, const PointPattern& V) {
    require_equal_size(U, V, "procrustes");
    const int n = static_cast<int>(U.points.size());

    Eigen::Vector3d mu_u = Eigen::Vector3d::Zero();
    Eigen::Vector3d mu_v = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        mu_u += Eigen::Vector3d(U.points[i].x, U.points[i].y, U.points[i].z);
        mu_v += Eigen::Vector3d(V.points[i].x, V.points[i].y, V.points[i].z);
    }
    mu_u /= n;
    mu_v /= n;

    // Cross-covariance H = sum u~_i v~_i^T of the centered configurations.
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d u = Eigen::Vector3d(U.points[i].x, U.points[i].y, U.points[i].z) - mu_u;
        const Eigen::Vector3d v = Eigen::Vector3d(V.points[i].x, V.points[i].y, V.points[i].z) - mu_v;
        H += u * v.transpose();
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d Us = svd.matrixU();
    const Eigen::Matrix3d Vs = svd.matrixV();
    Eigen::Vector3d d(1.0, 1.0, 1.0);
    d(2) = (Us * Vs.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Eigen::Matrix3d R = Us * d.asDiagonal() * Vs.transpose();

    ProcrustesResult out;
    out.rotation = R;
    const double s_max = svd.singularValues()(0);
    const double s_tol = std::max(1e-12 * s_max, 1e-300);
    out.rank_deficient = svd.singularValues()(2) <= s_tol;

    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d u = Eigen::Vector3d(U.points[i].x, U.points[i].y, U.points[i].z) - mu_u;
        const Eigen::Vector3d v = Eigen::Vector3d(V.points[i].x, V.points[i].y, V.points[i].z) - mu_v;
        resid += (u - R * v).squaredNorm();
    }
    out.value = std::sqrt(resid);
    return out;
}

double evaluate(MeasureKind kind, const PointPattern& U, const PointPattern& V) {
    switch (kind) {
        case MeasureKind::Wasserstein: return wasserstein2(U, V).value;
        case MeasureKind::LeastSquares: return least_squares(U, V);
        case MeasureKind::Procrustes: return procrustes(U, V).value;
    }
    throw std::invalid_argument("evaluate: unknown measure");
}

} // namespace crosslocate
