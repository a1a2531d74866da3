#pragma once

// Goal-directed trajectory generation on a soft-collision grid. Each cell
// carries a value in [0, 1] that grows as the cell gets closer to another
// object; A* trades path length against those values and only refuses cells
// with value 1.

#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "ocp/arrangement.hpp"
#include "ocp/geometry.hpp"
#include "ocp/tasks.hpp"

namespace ocp {

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
    auto operator<=>(const Cell&) const = default;
};

/// Row-major grid; row indexes y, col indexes x, origin is the lower-left corner.
struct GridMap {
    int width = 0;  ///< columns
    int height = 0; ///< rows
    double cell_size = 0.0;
    Vec2 origin{};
    std::vector<double> values;

    GridMap() = default;
    GridMap(int w, int h, double delta, Vec2 org, double fill = 0.0)
        : width(w), height(h), cell_size(delta), origin(org), values(static_cast<std::size_t>(w) * h, fill)
    {
        if (w < 1 || h < 1) throw std::invalid_argument("grid needs at least one cell");
        if (!(delta > 0.0)) throw std::invalid_argument("grid cell_size must be positive");
    }

    bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width; }
    double& value(Cell c) { return values[index(c)]; }
    double value(Cell c) const { return values[index(c)]; }
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * width + c.col; }

    Vec2 center(Cell c) const { return origin + Vec2{(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }

    /// Cell containing `p`, clamped into the grid.
    Cell cell_of(Vec2 p) const
    {
        const int col = static_cast<int>(std::floor((p.x - origin.x) / cell_size));
        const int row = static_cast<int>(std::floor((p.y - origin.y) / cell_size));
        return {std::clamp(row, 0, height - 1), std::clamp(col, 0, width - 1)};
    }
};

enum class CollisionMode {
    soft, ///< cost grows with cell value; value 1 blocks
    hard, ///< any positive value blocks
};

struct SoftAStarParams {
    double c_min = 0.025; ///< meters; closer than this the cell value is 1
    double c_max = 0.05;  ///< meters; farther than this the cell value is 0
    double cell_size = 0.035;
    CollisionMode mode = CollisionMode::soft;

    void validate() const
    {
        if (!(c_min > 0.0 && c_min < c_max)) throw std::invalid_argument("soft A*: need 0 < c_min < c_max");
        if (!(cell_size > 0.0)) throw std::invalid_argument("soft A*: cell_size must be positive");
    }

    /// Size-derived defaults for activated object `i`.
    static SoftAStarParams defaults_for(const Arrangement& arr, std::size_t i)
    {
        double max_r = 0.0, min_in = std::numeric_limits<double>::infinity(), max_other_r = 0.0;
        for (std::size_t j = 0; j < arr.size(); ++j) {
            max_r = std::max(max_r, arr.shape(j).circumradius());
            if (j == i && arr.size() > 1) continue;
            min_in = std::min(min_in, arr.shape(j).inradius());
            max_other_r = std::max(max_other_r, arr.shape(j).circumradius());
        }
        SoftAStarParams p;
        p.cell_size = 2.0 * max_r;
        p.c_min = arr.shape(i).inradius() + min_in;
        p.c_max = arr.shape(i).circumradius() + max_other_r + p.cell_size / 2.0;
        return p;
    }
};

/// Cell value from the distance to the nearest other object center.
inline double soft_collision_value(double d, double c_min, double c_max)
{
    if (d < c_min) return 1.0;
    if (d > c_max) return 0.0;
    return (c_max - d) / (c_max - c_min);
}

/// Grid covering the workspace, centered on it, with values from every
/// object except the activated one.
inline GridMap build_grid(const Arrangement& arr, std::size_t i, const Workspace& ws, const SoftAStarParams& params)
{
    params.validate();
    if (i >= arr.size()) throw std::invalid_argument("build_grid: object index out of range");
    const double delta = params.cell_size;
    const int w = std::max(1, static_cast<int>(std::ceil(ws.width() / delta - 1e-9)));
    const int h = std::max(1, static_cast<int>(std::ceil(ws.height() / delta - 1e-9)));
    const Vec2 origin = ws.center() - Vec2{w * delta / 2.0, h * delta / 2.0};
    GridMap grid(w, h, delta, origin);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const Vec2 p = grid.center({r, c});
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < arr.size(); ++j)
                if (j != i) d = std::min(d, distance(p, arr.position(j)));
            grid.value({r, c}) = soft_collision_value(d, params.c_min, params.c_max);
        }
    return grid;
}

/// Cell minimizing h when object `i` is moved to its center (heading kept).
/// Ties resolve to the lowest (row, col).
inline Cell find_goal_cell(const GridMap& grid, const TaskSpec& spec, const Arrangement& arr, std::size_t i)
{
    Arrangement probe = arr;
    const double theta = arr.pose(i).theta();
    Cell best{0, 0};
    double best_h = std::numeric_limits<double>::infinity();
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c) {
            probe.set_pose(i, Pose2(grid.center({r, c}), theta));
            const double h = heuristic(spec, probe);
            if (h < best_h) {
                best_h = h;
                best = {r, c};
            }
        }
    return best;
}

struct GridPath {
    std::vector<Cell> cells;
    double total_cost = 0.0;
};

namespace detail {

inline bool blocked(double value, CollisionMode mode)
{
    return mode == CollisionMode::soft ? value >= 1.0 : value > 0.0;
}

} // namespace detail

/// A* with edge cost |g g'| + cell_size * value(g'), 8-connected. Returns
/// nullopt when the goal is unreachable at finite cost. The start cell may
/// be blocked (the object already occupies it).
inline std::optional<GridPath> soft_astar(const GridMap& grid, Cell start, Cell goal,
                                          CollisionMode mode = CollisionMode::soft)
{
    if (!grid.in_bounds(start) || !grid.in_bounds(goal)) throw std::invalid_argument("soft_astar: cell out of bounds");
    if (detail::blocked(grid.value(goal), mode)) return std::nullopt;
    if (start == goal) return GridPath{{start}, 0.0};

    const double delta = grid.cell_size;
    const Vec2 goal_p = grid.center(goal);
    auto h_of = [&](Cell c) { return distance(grid.center(c), goal_p); };

    const std::size_t n = grid.values.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(n, inf);
    std::vector<std::size_t> parent(n, n);
    std::vector<bool> closed(n, false);

    // (f, h, row, col); the smallest tuple pops first
    using Entry = std::tuple<double, double, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    g[grid.index(start)] = 0.0;
    open.emplace(h_of(start), h_of(start), start.row, start.col);

    static constexpr int dr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int dc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    while (!open.empty()) {
        const auto [f, h, row, col] = open.top();
        open.pop();
        const Cell cur{row, col};
        const std::size_t ci = grid.index(cur);
        if (closed[ci]) continue;
        closed[ci] = true;
        if (cur == goal) break;
        for (int k = 0; k < 8; ++k) {
            const Cell nb{row + dr[k], col + dc[k]};
            if (!grid.in_bounds(nb)) continue;
            const std::size_t ni = grid.index(nb);
            if (closed[ni]) continue;
            const double v = grid.value(nb);
            if (detail::blocked(v, mode)) continue;
            const double step = (dr[k] != 0 && dc[k] != 0) ? std::sqrt(2.0) * delta : delta;
            const double cand = g[ci] + step + delta * v;
            if (cand < g[ni]) {
                g[ni] = cand;
                parent[ni] = ci;
                const double hn = h_of(nb);
                open.emplace(cand + hn, hn, nb.row, nb.col);
            }
        }
    }
    const std::size_t gi = grid.index(goal);
    if (!closed[gi]) return std::nullopt;
    GridPath path;
    path.total_cost = g[gi];
    for (std::size_t k = gi; k != n; k = parent[k])
        path.cells.push_back({static_cast<int>(k / grid.width), static_cast<int>(k % grid.width)});
    std::reverse(path.cells.begin(), path.cells.end());
    return path;
}

/// Cell centers at constant heading; the start cell is dropped.
inline Trajectory path_to_trajectory(const GridMap& grid, const std::vector<Cell>& cells, double theta)
{
    if (cells.empty()) throw std::invalid_argument("path_to_trajectory: empty path");
    Trajectory traj;
    for (std::size_t k = 1; k < cells.size(); ++k) traj.emplace_back(grid.center(cells[k]), theta);
    return traj;
}

} // namespace ocp
