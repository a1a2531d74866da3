#pragma once

// Task variants: goal criteria, heuristic costs, finite-difference heuristic
// gradients and dynamic goal assignment for interchangeable objects.

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ocp/arrangement.hpp"
#include "ocp/assignment.hpp"
#include "ocp/geometry.hpp"

namespace ocp {

struct GoalRegion {
    Vec2 center{};
    double radius = 0.02;

    /// Inclusive: a position on the boundary counts as inside.
    bool contains(Vec2 p) const { return (p - center).squared_norm() <= radius * radius; }
};

/// Cluster objects by class with no goal poses. The heuristic rewards tight
/// classes and far-apart class centroids:
///   h = lambda * sum_i |p_i - c_class(i)|^2 + sum_{j<k} exp(-|c_j - c_k|^2 / rho^2)
/// This concrete form is an interpretation; only its intent is fixed.
struct SortNoGoals {
    int num_classes = 2;
    double separation_threshold = 0.05; ///< eps_d, meters
    double cluster_weight = 1.0;        ///< lambda
    double repel_scale = 0.1;           ///< rho, meters

    static SortNoGoals with_defaults(int num_classes, const Workspace& ws, double eps_d = 0.05)
    {
        const double w = ws.width();
        return {num_classes, eps_d, 1.0 / (w * w), 0.25 * w};
    }
};

/// Objects whose goal regions are interchangeable. The region set is
/// re-assigned on every evaluation by minimum summed distance.
struct InterchangeGroup {
    std::vector<std::size_t> objects;
    std::vector<GoalRegion> regions;
};

struct GoalRegions {
    std::vector<GoalRegion> regions; ///< one per object; ignored for grouped objects
    std::vector<InterchangeGroup> interchange_groups;
};

struct TaskSpec {
    std::variant<SortNoGoals, GoalRegions> variant;

    bool has_goal_regions() const { return std::holds_alternative<GoalRegions>(variant); }

    void validate(std::size_t num_objects) const
    {
        if (const auto* s = std::get_if<SortNoGoals>(&variant)) {
            if (!(s->separation_threshold > 0.0)) throw std::invalid_argument("task.separation_threshold must be > 0");
            if (s->num_classes < 1) throw std::invalid_argument("task.num_classes must be >= 1");
            if (!(s->repel_scale > 0.0)) throw std::invalid_argument("task.repel_scale must be > 0");
            if (!(s->cluster_weight >= 0.0)) throw std::invalid_argument("task.cluster_weight must be >= 0");
            return;
        }
        const auto& g = std::get<GoalRegions>(variant);
        if (g.regions.size() != num_objects) throw std::invalid_argument("task.regions must list one region per object");
        for (const auto& r : g.regions)
            if (!(r.radius > 0.0)) throw std::invalid_argument("task.regions radius must be > 0");
        std::vector<bool> seen(num_objects, false);
        for (const auto& grp : g.interchange_groups) {
            if (grp.objects.size() != grp.regions.size())
                throw std::invalid_argument("task.interchange_groups: object and region counts differ");
            for (std::size_t k : grp.objects) {
                if (k >= num_objects) throw std::invalid_argument("task.interchange_groups: object index out of range");
                if (seen[k]) throw std::invalid_argument("task.interchange_groups: object listed twice");
                seen[k] = true;
            }
            for (const auto& r : grp.regions)
                if (!(r.radius > 0.0)) throw std::invalid_argument("task.interchange_groups radius must be > 0");
        }
    }
};

struct GradientParams {
    double fd_step = 1e-3;        ///< meters, for x and y
    double fd_step_theta = 1e-2;  ///< radians

    void validate() const
    {
        if (!(fd_step > 0.0) || !(fd_step_theta > 0.0)) throw std::invalid_argument("fd_step must be positive");
    }
};

/// d h / d(x, y, theta) for one object.
struct PoseGradient {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

/// Bijection from group objects to group regions minimizing the summed
/// Euclidean distance. Entry k is the region index for objects[k].
inline std::vector<std::size_t> assign_goals(std::span<const std::size_t> objects,
                                             std::span<const GoalRegion> regions, const Arrangement& arr)
{
    if (objects.size() != regions.size()) throw std::invalid_argument("assign_goals: |objects| != |regions|");
    std::vector<std::vector<double>> cost(objects.size(), std::vector<double>(regions.size()));
    for (std::size_t a = 0; a < objects.size(); ++a)
        for (std::size_t b = 0; b < regions.size(); ++b)
            cost[a][b] = distance(arr.position(objects[a]), regions[b].center);
    return solve_assignment(cost);
}

/// Goal region per object after dynamic assignment.
inline std::vector<GoalRegion> assigned_regions(const GoalRegions& task, const Arrangement& arr)
{
    std::vector<GoalRegion> out = task.regions;
    for (const auto& grp : task.interchange_groups) {
        const auto a = assign_goals(grp.objects, grp.regions, arr);
        for (std::size_t k = 0; k < grp.objects.size(); ++k) out[grp.objects[k]] = grp.regions[a[k]];
    }
    return out;
}

namespace detail {

inline double goal_region_cost(const GoalRegions& task, const Arrangement& arr)
{
    const auto regions = assigned_regions(task, arr);
    double h = 0.0;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const GoalRegion& g = regions[i];
        if (g.contains(arr.position(i))) continue;
        h += (arr.position(i) - g.center).squared_norm() / (g.radius * g.radius);
    }
    return h;
}

inline std::map<int, Vec2> class_centroids(const Arrangement& arr)
{
    std::map<int, std::pair<Vec2, int>> acc;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto& [sum, count] = acc[arr.class_of(i)];
        sum += arr.position(i);
        ++count;
    }
    std::map<int, Vec2> out;
    for (const auto& [cls, sc] : acc) out[cls] = sc.first / static_cast<double>(sc.second);
    return out;
}

inline double sorting_cost(const SortNoGoals& task, const Arrangement& arr)
{
    const auto centroids = class_centroids(arr);
    double spread = 0.0;
    for (std::size_t i = 0; i < arr.size(); ++i)
        spread += (arr.position(i) - centroids.at(arr.class_of(i))).squared_norm();
    double repel = 0.0;
    const double rho2 = task.repel_scale * task.repel_scale;
    for (auto a = centroids.begin(); a != centroids.end(); ++a)
        for (auto b = std::next(a); b != centroids.end(); ++b)
            repel += std::exp(-(a->second - b->second).squared_norm() / rho2);
    return task.cluster_weight * spread + repel;
}

} // namespace detail

/// Per-class convex hulls of all object outlines.
inline std::map<int, std::vector<Vec2>> class_hull_points(const Arrangement& arr)
{
    std::map<int, std::vector<Vec2>> pts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto outline = arr.shape(i).outline(arr.pose(i));
        auto& dst = pts[arr.class_of(i)];
        dst.insert(dst.end(), outline.begin(), outline.end());
    }
    return pts;
}

/// Smallest distance between the convex hulls of two different classes
/// (infinity with fewer than two classes present).
inline double min_class_hull_distance(const Arrangement& arr)
{
    const auto pts = class_hull_points(arr);
    double best = std::numeric_limits<double>::infinity();
    for (auto a = pts.begin(); a != pts.end(); ++a)
        for (auto b = std::next(a); b != pts.end(); ++b)
            best = std::min(best, convex_hull_distance(a->second, b->second));
    return best;
}

/// Goal criterion g.
inline bool goal_satisfied(const TaskSpec& spec, const Arrangement& arr)
{
    if (const auto* s = std::get_if<SortNoGoals>(&spec.variant))
        return min_class_hull_distance(arr) > s->separation_threshold;
    const auto& task = std::get<GoalRegions>(spec.variant);
    const auto regions = assigned_regions(task, arr);
    for (std::size_t i = 0; i < arr.size(); ++i)
        if (!regions[i].contains(arr.position(i))) return false;
    return true;
}

/// Heuristic cost h >= 0; smaller is closer to the goal.
inline double heuristic(const TaskSpec& spec, const Arrangement& arr)
{
    if (const auto* s = std::get_if<SortNoGoals>(&spec.variant)) return detail::sorting_cost(*s, arr);
    return detail::goal_region_cost(std::get<GoalRegions>(spec.variant), arr);
}

/// Central finite-difference gradient of h with respect to each object pose.
inline std::vector<PoseGradient> heuristic_gradient(const TaskSpec& spec, const Arrangement& arr,
                                                    const GradientParams& params = {})
{
    params.validate();
    std::vector<PoseGradient> grad(arr.size());
    Arrangement probe = arr;
    auto central = [&](std::size_t i, double dx, double dy, double dth, double step) {
        const Pose2 base = arr.pose(i);
        probe.set_pose(i, Pose2(base.x() + dx, base.y() + dy, base.theta() + dth));
        const double plus = heuristic(spec, probe);
        probe.set_pose(i, Pose2(base.x() - dx, base.y() - dy, base.theta() - dth));
        const double minus = heuristic(spec, probe);
        probe.set_pose(i, base);
        return (plus - minus) / (2.0 * step);
    };
    const double d = params.fd_step, t = params.fd_step_theta;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        grad[i].x = central(i, d, 0.0, 0.0, d);
        grad[i].y = central(i, 0.0, d, 0.0, d);
        grad[i].theta = central(i, 0.0, 0.0, t, t);
    }
    return grad;
}

} // namespace ocp
