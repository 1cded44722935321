// assignment.cpp
#include "crosslocate/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crosslocate {

AssignmentResult solve_assignment(const std::vector<double>& cost, int n) {
    if (n <= 0)
        throw std::invalid_argument("solve_assignment: n must be positive");
    if (cost.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("solve_assignment: cost matrix size mismatch");
    for (double c : cost)
        if (!std::isfinite(c))
            throw std::invalid_argument("solve_assignment: non-finite cost entry");

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials/links; p[j] = row assigned to column j.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * static_cast<std::size_t>(n) + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    AssignmentResult out;
    out.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        out.row_to_col[p[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i)
        out.cost += cost[i * static_cast<std::size_t>(n) + out.row_to_col[i]];
    return out;
}

} // namespace crosslocate
