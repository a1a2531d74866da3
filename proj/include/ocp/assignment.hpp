#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace ocp {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(n^3) with potentials). Returns column index assigned to each row.
inline std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost)
{
    const std::size_t n = cost.size();
    for (const auto& row : cost)
        if (row.size() != n) throw std::invalid_argument("solve_assignment: cost matrix must be square");
    if (n == 0) return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is a virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[col0] = true;
            const std::size_t row0 = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const double cur = cost[row0 - 1][col - 1] - u[row0] - v[col];
                if (cur < minv[col]) {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if (minv[col] < delta) {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[match[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> result(n);
    for (std::size_t col = 1; col <= n; ++col) result[match[col] - 1] = col - 1;
    return result;
}

} // namespace ocp
