#pragma once

// Object-centric tree search. Nodes are arrangements; an edge moves one
// activated object along a trajectory while the others react through
// contact. Expansion picks a node by inverse child count, an object by
// heuristic-gradient magnitude, and a trajectory by either an
// epsilon-greedy straight line (Mode I) or soft-collision A* (Mode II).

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "ocp/arrangement.hpp"
#include "ocp/push.hpp"
#include "ocp/rng.hpp"
#include "ocp/sim.hpp"
#include "ocp/soft_astar.hpp"
#include "ocp/tasks.hpp"

namespace ocp {

struct PlannerConfig {
    int s_max = 50;
    int d_max = 5;
    double p_astar = 0.5;
    double epsilon = 0.2;
    double l_min = 0.015; ///< meters
    double l_max = 0.075; ///< meters
    double sigma = 0.072; ///< meters
    double stretch_k = 2.0;
    std::uint64_t rng_seed = 0;

    /// Use Mode I when Mode II was already tried for the object at a node.
    bool mode1_fallback = true;
    CollisionMode astar_mode = CollisionMode::soft;
    /// Overrides the size-derived grid parameters when set.
    std::optional<SoftAStarParams> astar;
    /// Cap on expansion attempts; 0 means 20 * s_max.
    int max_expansion_attempts = 0;
    GradientParams gradient;
    PushParams push;

    void validate() const
    {
        if (s_max < 1) throw std::invalid_argument("planner.s_max must be >= 1");
        if (d_max < 1) throw std::invalid_argument("planner.d_max must be >= 1");
        if (!(p_astar >= 0.0 && p_astar <= 1.0)) throw std::invalid_argument("planner.p_astar must be in [0, 1]");
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("planner.epsilon must be in [0, 1]");
        if (!(l_min > 0.0 && l_min < l_max)) throw std::invalid_argument("planner: need 0 < l_min < l_max");
        if (!(sigma > 0.0)) throw std::invalid_argument("planner.sigma must be positive");
        if (!(stretch_k >= 1.0)) throw std::invalid_argument("planner.stretch_k must be >= 1");
        if (max_expansion_attempts < 0) throw std::invalid_argument("planner.max_expansion_attempts must be >= 0");
        if (astar) astar->validate();
        gradient.validate();
        push.validate();
    }

    int attempt_cap() const { return max_expansion_attempts > 0 ? max_expansion_attempts : 20 * s_max; }

    /// Workspace- and object-size-derived defaults.
    static PlannerConfig defaults_for(const Workspace& ws, const Arrangement& arr)
    {
        PlannerConfig c;
        c.l_min = 0.05 * ws.width();
        c.l_max = 0.25 * ws.width();
        double diameter = 0.0;
        for (std::size_t k = 0; k < arr.size(); ++k) diameter += 2.0 * arr.shape(k).circumradius();
        c.sigma = 2.0 * diameter / static_cast<double>(arr.size());
        return c;
    }
};

struct PlanStep {
    std::size_t object = 0;
    Trajectory trajectory;
};

struct TreeNode {
    Arrangement arrangement;
    int depth = 0;
    int child_count = 0;
    std::set<std::size_t> mode2_explored;
    std::optional<std::size_t> parent;
    std::optional<PlanStep> incoming;
    double h = 0.0;
    std::optional<std::vector<PoseGradient>> gradient; ///< filled on first activation
};

class PlanTree {
public:
    std::size_t add_root(Arrangement arr, double h)
    {
        if (!nodes_.empty()) throw std::logic_error("tree already has a root");
        TreeNode n;
        n.arrangement = std::move(arr);
        n.h = h;
        nodes_.push_back(std::move(n));
        return 0;
    }

    std::size_t add_child(std::size_t parent, Arrangement arr, PlanStep edge, double h)
    {
        TreeNode n;
        n.arrangement = std::move(arr);
        n.depth = nodes_.at(parent).depth + 1;
        n.parent = parent;
        n.incoming.emplace(std::move(edge));
        n.h = h;
        nodes_.push_back(std::move(n));
        ++nodes_[parent].child_count;
        return nodes_.size() - 1;
    }

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    TreeNode& node(std::size_t id) { return nodes_.at(id); }
    const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    /// Edges from the root to `id`, in order.
    std::vector<PlanStep> backtrace(std::size_t id) const
    {
        std::vector<PlanStep> steps;
        for (std::optional<std::size_t> k = id; k && nodes_[*k].incoming; k = nodes_[*k].parent)
            steps.push_back(*nodes_[*k].incoming);
        std::reverse(steps.begin(), steps.end());
        return steps;
    }

private:
    std::vector<TreeNode> nodes_;
};

/// w(n) = 1 / (children + 1) below the depth limit, 0 at it.
inline double node_weight(const TreeNode& n, int d_max)
{
    return n.depth < d_max ? 1.0 / (n.child_count + 1) : 0.0;
}

namespace detail {

inline std::optional<std::size_t> sample_index(std::span<const double> weights, Rng& rng)
{
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return std::nullopt;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::optional<std::size_t> last;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        acc += weights[k];
        last = k;
        if (target < acc) return k;
    }
    return last;
}

} // namespace detail

/// Node drawn with probability proportional to its weight; nullopt when
/// every node sits at the depth limit.
inline std::optional<std::size_t> sample_node(const PlanTree& tree, int d_max, Rng& rng)
{
    std::vector<double> w;
    w.reserve(tree.size());
    for (const auto& n : tree.nodes()) w.push_back(node_weight(n, d_max));
    return detail::sample_index(w, rng);
}

/// Gradient magnitude with the heading component converted to arc length.
inline double gradient_magnitude(const PoseGradient& g, double circumradius)
{
    const double t = g.theta / circumradius;
    return std::sqrt(g.x * g.x + g.y * g.y + t * t);
}

/// Activation probabilities: score(i) = f(|g_i|) + sum_{j != i} f(|g_j|) exp(-d_ij^2 / 2 sigma^2),
/// f(x) = x^k, uniform when every score vanishes.
inline std::vector<double> activation_probabilities(const Arrangement& arr, std::span<const PoseGradient> grad,
                                                    double sigma, double stretch_k)
{
    const std::size_t n = arr.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = std::pow(gradient_magnitude(grad[i], arr.shape(i).circumradius()), stretch_k);
    std::vector<double> score(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = f[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || f[j] == 0.0) continue;
            s += f[j] * std::exp(-(arr.position(i) - arr.position(j)).squared_norm() / (2.0 * sigma * sigma));
        }
        score[i] = s;
        total += s;
    }
    if (!(total > 0.0) || !std::isfinite(total)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    for (double& s : score) s /= total;
    return score;
}

inline const std::vector<PoseGradient>& node_gradient(TreeNode& node, const TaskSpec& spec,
                                                      const GradientParams& params)
{
    if (!node.gradient) node.gradient = heuristic_gradient(spec, node.arrangement, params);
    return *node.gradient;
}

inline std::size_t activate_object(TreeNode& node, const TaskSpec& spec, const PlannerConfig& config, Rng& rng)
{
    const auto& grad = node_gradient(node, spec, config.gradient);
    const auto p = activation_probabilities(node.arrangement, grad, config.sigma, config.stretch_k);
    return *detail::sample_index(p, rng);
}

/// One straight segment: heading-descent direction with probability
/// 1 - epsilon (spread by +-pi/4), uniform otherwise; uniform length and
/// uniform heading change.
inline Trajectory mode1_trajectory(const Arrangement& arr, std::size_t i, const PoseGradient& grad,
                                   const PlannerConfig& config, Rng& rng)
{
    const bool explore = rng.uniform() < config.epsilon;
    const bool flat = grad.x == 0.0 && grad.y == 0.0;
    double gamma;
    if (explore || flat) gamma = rng.uniform(-kPi, kPi);
    else gamma = std::atan2(-grad.y, -grad.x) + rng.uniform(-kPi / 4.0, kPi / 4.0);
    const double length = rng.uniform(config.l_min, config.l_max);
    const double dtheta = rng.uniform(-kPi, kPi);
    const Pose2& s = arr.pose(i);
    return {Pose2(s.position() + unit_vector(gamma) * length, s.theta() + dtheta)};
}

/// Mode II trajectory, or nullopt when the search fails or has nothing to do.
inline std::optional<Trajectory> mode2_trajectory(const Arrangement& arr, std::size_t i, const TaskSpec& spec,
                                                  const PlannerConfig& config, const Workspace& ws)
{
    SoftAStarParams params = config.astar ? *config.astar : SoftAStarParams::defaults_for(arr, i);
    params.mode = config.astar_mode;
    const GridMap grid = build_grid(arr, i, ws, params);
    const Cell goal = find_goal_cell(grid, spec, arr, i);
    const auto path = soft_astar(grid, grid.cell_of(arr.position(i)), goal, params.mode);
    if (!path) return std::nullopt;
    Trajectory traj = path_to_trajectory(grid, path->cells, arr.pose(i).theta());
    if (traj.empty()) return std::nullopt;
    return traj;
}

/// Expands `node_id` by moving object `i`; returns the new node or nullopt.
inline std::optional<std::size_t> expand_tree(PlanTree& tree, std::size_t node_id, std::size_t i,
                                              const TaskSpec& spec, const PlannerConfig& config,
                                              const Workspace& ws, const SimParams& sim, Rng& rng)
{
    const bool tried = tree.node(node_id).mode2_explored.contains(i);
    const bool mode1 = rng.uniform() > config.p_astar || tried;
    const Arrangement arr = tree.node(node_id).arrangement; // copy: the node vector may grow
    Trajectory traj;
    if (mode1) {
        if (tried && !config.mode1_fallback) return std::nullopt;
        const auto& grad = node_gradient(tree.node(node_id), spec, config.gradient);
        traj = mode1_trajectory(arr, i, grad[i], config, rng);
    } else {
        tree.node(node_id).mode2_explored.insert(i);
        auto t = mode2_trajectory(arr, i, spec, config, ws);
        if (!t) return std::nullopt;
        traj = std::move(*t);
    }
    PushParams push = config.push;
    push.pusher_radius = sim.pusher_radius;
    if (const auto u0 = push_strategy(arr.pose(i), traj.front(), arr.shape(i), push))
        if (occluded(u0->start, arr, i, ws, sim.pusher_radius)) return std::nullopt;
    SimResult r = simulate_trajectory(arr, i, traj, ws, sim);
    if (!r.valid) return std::nullopt;
    const double h = heuristic(spec, r.arrangement);
    return tree.add_child(node_id, std::move(r.arrangement), PlanStep{i, std::move(traj)}, h);
}

struct PlanResult {
    std::vector<PlanStep> steps;
    bool goal_reached = false;
    double start_h = 0.0;
    double final_h = 0.0;
    std::size_t tree_size = 0;
    int expansion_attempts = 0;
    /// Planned arrangement after each step (size steps + 1, starting with the root).
    std::vector<Arrangement> arrangements;
};

namespace detail {

inline PlanResult finish_plan(const PlanTree& tree, std::size_t id, bool goal, int attempts)
{
    PlanResult r;
    r.steps = tree.backtrace(id);
    r.goal_reached = goal;
    r.start_h = tree.node(0).h;
    r.final_h = tree.node(id).h;
    r.tree_size = tree.size();
    r.expansion_attempts = attempts;
    std::vector<Arrangement> chain;
    for (std::optional<std::size_t> k = id; k; k = tree.node(*k).parent) chain.push_back(tree.node(*k).arrangement);
    r.arrangements.assign(chain.rbegin(), chain.rend());
    return r;
}

} // namespace detail

/// Grows a tree from `start` until a goal arrangement appears or the tree
/// holds s_max nodes; returns the edge list to the goal or to the
/// lowest-heuristic node (earliest on ties, possibly the root).
inline PlanResult ocp_plan(const Arrangement& start, const TaskSpec& spec, const PlannerConfig& config,
                           const Workspace& ws, const SimParams& sim)
{
    config.validate();
    PlanTree tree;
    tree.add_root(start, heuristic(spec, start));
    if (goal_satisfied(spec, start)) return detail::finish_plan(tree, 0, true, 0);

    Rng rng(config.rng_seed);
    int attempts = 0;
    while (tree.size() < static_cast<std::size_t>(config.s_max) && attempts < config.attempt_cap()) {
        ++attempts;
        const auto n = sample_node(tree, config.d_max, rng);
        if (!n) break;
        const std::size_t i = activate_object(tree.node(*n), spec, config, rng);
        const auto child = expand_tree(tree, *n, i, spec, config, ws, sim, rng);
        if (child && goal_satisfied(spec, tree.node(*child).arrangement))
            return detail::finish_plan(tree, *child, true, attempts);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < tree.size(); ++k)
        if (tree.node(k).h < tree.node(best).h) best = k;
    return detail::finish_plan(tree, best, false, attempts);
}

} // namespace ocp
