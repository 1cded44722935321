// measures.hpp - the three pattern similarity measures: Wasserstein W2 via
// exact assignment, index-paired least squares, and SVD Procrustes.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crosslocate/pattern.hpp"

namespace crosslocate {

enum class MeasureKind { Wasserstein, LeastSquares, Procrustes };

const char* measure_name(MeasureKind kind);
/// Accepts "w2"/"wasserstein", "ls"/"l2"/"leastsquares", "procrustes"/"pc".
MeasureKind parse_measure(const std::string& name);

/// Dense transport plan between two uniform discrete measures of equal
/// size m+1. Rows and columns each sum to 1/(m+1); for equal-size inputs
/// the optimum is a permutation scaled by 1/(m+1).
struct TransportPlan {
    std::size_t size = 0;
    std::vector<double> weights; // row-major size*size

    double at(std::size_t i, std::size_t j) const { return weights[i * size + j]; }
};

struct W2Result {
    double value = 0.0;           // sqrt(assignment_cost / (m+1))
    double assignment_cost = 0.0; // min-permutation sum of squared distances
    std::vector<int> assignment;  // u_i pairs with v_assignment[i]
};

/// W2(U, V) with uniform marginals 1/(m+1), solved exactly as a linear sum
/// assignment on squared Euclidean costs.
W2Result wasserstein2(const PointPattern& U, const PointPattern& V);

TransportPlan transport_plan(const W2Result& result);

/// sqrt(sum_i |u_i - v_i|^2); correspondence is by index.
double least_squares(const PointPattern& U, const PointPattern& V);

struct ProcrustesResult {
    double value = 0.0;       // residual after optimal SO(3) alignment
    Eigen::Matrix3d rotation; // applied to the centered second pattern
    bool rank_deficient = false;
};

/// min over R in SO(3) of sqrt(sum |u~_i - R v~_i|^2) with both patterns
/// centered at their centroids; R from the SVD of the cross-covariance
/// with the determinant correction, so reflections are never returned.
ProcrustesResult procrustes(const PointPattern& U, const PointPattern& V);

/// Scalar value of the chosen measure.
double evaluate(MeasureKind kind, const PointPattern& U, const PointPattern& V);

} // namespace crosslocate
