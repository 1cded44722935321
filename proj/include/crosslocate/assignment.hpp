// assignment.hpp - exact linear sum assignment (square cost matrix).
#pragma once

#include <vector>

namespace crosslocate {

struct AssignmentResult {
    std::vector<int> row_to_col; // row i pairs with column row_to_col[i]
    double cost = 0.0;           // sum of the selected cost entries
};

/// Kuhn-Munkres via shortest augmenting paths, O(n^3). `cost` is a dense
/// row-major n x n matrix of finite values. The reported cost is re-summed
/// from the returned permutation, so identical inputs give it exactly.
AssignmentResult solve_assignment(const std::vector<double>& cost, int n);

} // namespace crosslocate
