#pragma once

// Quasi-static planar contact model. Bodies have no momentum: a pinned body
// (the activated object or the pusher) is moved in small sub-steps and every
// overlap it causes is removed by projecting the free body out along the
// minimum-translation axis.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ocp/arrangement.hpp"
#include "ocp/geometry.hpp"

namespace ocp {

struct SimParams {
    double step_length = 0.002;     ///< sub-step along a motion, meters
    int max_resolve_iters = 64;     ///< Gauss-Seidel passes per sub-step
    double penetration_tol = 1e-4;  ///< meters
    double pusher_radius = 0.005;   ///< meters
    double k_rot = 1.0;             ///< pusher-object rotation coupling gain

    void validate() const
    {
        if (!(step_length > 0.0)) throw std::invalid_argument("sim.step_length must be positive");
        if (max_resolve_iters < 1) throw std::invalid_argument("sim.max_resolve_iters must be >= 1");
        if (!(penetration_tol > 0.0)) throw std::invalid_argument("sim.penetration_tol must be positive");
        if (!(pusher_radius > 0.0)) throw std::invalid_argument("sim.pusher_radius must be positive");
        if (!(k_rot >= 0.0)) throw std::invalid_argument("sim.k_rot must be non-negative");
    }
};

struct ResolveResult {
    Arrangement arrangement;
    bool unresolved = false;
    double residual_depth = 0.0;
    int iterations = 0;
};

struct SimResult {
    Arrangement arrangement;
    bool valid = true;
    bool unresolved = false;
};

struct PushResult {
    Arrangement arrangement;
    Vec2 pusher_end{};
    bool contact = false;
};

namespace detail {

/// Working set for one contact resolution episode. Bodies are only visited
/// once they have been touched, so objects outside the contact set keep
/// bit-identical poses.
class ContactSolver {
public:
    ContactSolver(const Arrangement& arr, const SimParams& params) : params_(params)
    {
        const std::size_t n = arr.size();
        shapes_.reserve(n + 1);
        poses_.assign(arr.poses().begin(), arr.poses().end());
        world_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            shapes_.push_back(&arr.shape(k));
            world_[k].update(arr.shape(k), poses_[k]);
        }
        pinned_.assign(n, false);
        active_.assign(n, false);
    }

    /// Appends the circular pusher as a pinned, active body; returns its index.
    std::size_t add_pusher(Vec2 position)
    {
        pusher_shape_ = Shape::circle(params_.pusher_radius);
        shapes_.push_back(&*pusher_shape_);
        poses_.emplace_back(position, 0.0);
        world_.emplace_back(*pusher_shape_, poses_.back());
        pinned_.push_back(true);
        active_.push_back(true);
        pusher_ = poses_.size() - 1;
        return *pusher_;
    }

    void pin(std::size_t k) { pinned_[k] = true; }
    void activate(std::size_t k) { active_[k] = true; }
    void activate_all() { active_.assign(active_.size(), true); }

    void set_pose(std::size_t k, const Pose2& p)
    {
        poses_[k] = p;
        world_[k].update(*shapes_[k], p);
    }

    const Pose2& pose(std::size_t k) const { return poses_[k]; }

    /// Motion of the pusher during the current sub-step (for rotation coupling).
    void set_push_motion(Vec2 dir, double substep)
    {
        push_dir_ = dir;
        push_substep_ = substep;
    }

    bool touched_by_pusher() const { return pusher_contact_; }

    /// Gauss-Seidel projection in ascending index order.
    ResolveResult solve()
    {
        ResolveResult r;
        const double tol = params_.penetration_tol;
        for (int iter = 1; iter <= params_.max_resolve_iters; ++iter) {
            double worst = 0.0;
            for (std::size_t a = 0; a < poses_.size(); ++a) {
                for (std::size_t b = a + 1; b < poses_.size(); ++b) {
                    if (!active_[a] && !active_[b]) continue;
                    if (pinned_[a] && pinned_[b]) continue;
                    const auto pen = penetration(world_[a], world_[b]);
                    if (!pen || pen->depth <= tol) continue;
                    worst = std::max(worst, pen->depth);
                    separate(a, b, *pen);
                }
            }
            r.iterations = iter;
            if (worst <= tol) return r;
        }
        r.residual_depth = max_active_depth();
        r.unresolved = r.residual_depth > 10.0 * tol;
        return r;
    }

    /// Object poses only (pusher excluded).
    Arrangement arrangement(const Arrangement& like) const
    {
        std::vector<Pose2> p(poses_.begin(), poses_.begin() + static_cast<std::ptrdiff_t>(like.size()));
        return Arrangement(std::move(p), like.table());
    }

private:
    void separate(std::size_t a, std::size_t b, const Penetration& pen)
    {
        const Vec2 shift = pen.axis * pen.depth;
        if (pinned_[a]) {
            translate(b, shift);
            couple_rotation(a, b, pen);
        } else if (pinned_[b]) {
            translate(a, -shift);
            couple_rotation(b, a, Penetration{pen.depth, -pen.axis});
        } else {
            translate(a, shift * -0.5);
            translate(b, shift * 0.5);
        }
    }

    void translate(std::size_t k, Vec2 d)
    {
        set_pose(k, Pose2(poses_[k].position() + d, poses_[k].theta()));
        active_[k] = true;
    }

    // Offset pushes turn the object: dtheta = k_rot * (offset / R) * (step / R),
    // with the offset signed as the torque of the push direction about the
    // object center.
    void couple_rotation(std::size_t pinned_body, std::size_t body, const Penetration& pen)
    {
        if (!pusher_ || pinned_body != *pusher_) return;
        pusher_contact_ = true;
        if (params_.k_rot == 0.0 || push_substep_ <= 0.0) return;
        const double radius = shapes_[body]->circumradius();
        const Vec2 contact = poses_[pinned_body].position() + pen.axis * params_.pusher_radius;
        const Vec2 lever = contact - poses_[body].position();
        const double offset = cross(lever, push_dir_);
        const double travel = std::min(pen.depth, push_substep_);
        const double dtheta = params_.k_rot * (offset / radius) * (travel / radius);
        set_pose(body, Pose2(poses_[body].position(), poses_[body].theta() + dtheta));
    }

    double max_active_depth() const
    {
        double worst = 0.0;
        for (std::size_t a = 0; a < poses_.size(); ++a)
            for (std::size_t b = a + 1; b < poses_.size(); ++b) {
                if (!active_[a] && !active_[b]) continue;
                if (pinned_[a] && pinned_[b]) continue;
                if (const auto pen = penetration(world_[a], world_[b])) worst = std::max(worst, pen->depth);
            }
        return worst;
    }

    const SimParams& params_;
    std::vector<const Shape*> shapes_;
    std::vector<Pose2> poses_;
    std::vector<WorldShape> world_;
    std::vector<bool> pinned_;
    std::vector<bool> active_;
    std::optional<Shape> pusher_shape_;
    std::optional<std::size_t> pusher_;
    Vec2 push_dir_{};
    double push_substep_ = 0.0;
    bool pusher_contact_ = false;
};

} // namespace detail

/// Removes overlaps by iterative projection. Pinned objects never move;
/// passive objects translate without rotating.
inline ResolveResult resolve_penetrations(const Arrangement& arr, std::span<const std::size_t> pinned,
                                          const SimParams& params)
{
    detail::ContactSolver solver(arr, params);
    for (std::size_t k : pinned) solver.pin(k);
    solver.activate_all();
    ResolveResult r = solver.solve();
    r.arrangement = solver.arrangement(arr);
    return r;
}

/// Largest pairwise penetration depth in an arrangement.
inline double max_penetration(const Arrangement& arr)
{
    std::vector<WorldShape> world;
    world.reserve(arr.size());
    for (std::size_t k = 0; k < arr.size(); ++k) world.emplace_back(arr.shape(k), arr.pose(k));
    double worst = 0.0;
    for (std::size_t a = 0; a < arr.size(); ++a)
        for (std::size_t b = a + 1; b < arr.size(); ++b)
            if (const auto pen = penetration(world[a], world[b])) worst = std::max(worst, pen->depth);
    return worst;
}

inline bool all_inside(const Arrangement& arr, const Workspace& ws)
{
    for (std::size_t k = 0; k < arr.size(); ++k)
        if (!ws.contains(arr.position(k))) return false;
    return true;
}

/// Number of sub-steps needed to move between two poses of a body.
inline int substep_count(const Pose2& from, const Pose2& to, double circumradius, double step_length)
{
    const double travel = std::max(distance(from.position(), to.position()),
                                   std::abs(angle_diff(to.theta(), from.theta())) * circumradius);
    return std::max(1, static_cast<int>(std::ceil(travel / step_length)));
}

/// Object-centric transition: object `i` follows `traj` as if self-actuated,
/// other objects move only through contact.
inline SimResult simulate_trajectory(const Arrangement& arr, std::size_t i, const Trajectory& traj,
                                     const Workspace& ws, const SimParams& params)
{
    if (traj.empty()) throw std::invalid_argument("simulate_trajectory: empty trajectory");
    if (i >= arr.size()) throw std::invalid_argument("simulate_trajectory: object index out of range");
    detail::ContactSolver solver(arr, params);
    solver.pin(i);
    solver.activate(i);
    SimResult out;
    Pose2 current = arr.pose(i);
    for (const Pose2& waypoint : traj) {
        const int n = substep_count(current, waypoint, arr.shape(i).circumradius(), params.step_length);
        for (int k = 1; k <= n; ++k) {
            solver.set_pose(i, k == n ? waypoint : interpolate(current, waypoint, static_cast<double>(k) / n));
            if (solver.solve().unresolved) {
                out.unresolved = true;
                out.valid = false;
                out.arrangement = solver.arrangement(arr);
                return out;
            }
        }
        current = waypoint;
    }
    out.arrangement = solver.arrangement(arr);
    out.valid = all_inside(out.arrangement, ws);
    return out;
}

/// Translates a pinned circular pusher by `dist` along `direction`,
/// displacing every object it reaches (directly or through chains).
inline PushResult pusher_step(const Arrangement& arr, Vec2 pusher_pos, Vec2 direction, double dist,
                              const Workspace& /*ws*/, const SimParams& params)
{
    if (!(dist > 0.0)) throw std::invalid_argument("pusher_step: distance must be positive");
    const double len = direction.norm();
    if (!(len > 0.0)) throw std::invalid_argument("pusher_step: direction must be nonzero");
    const Vec2 dir = direction / len;
    detail::ContactSolver solver(arr, params);
    const std::size_t pusher = solver.add_pusher(pusher_pos);
    const int n = std::max(1, static_cast<int>(std::ceil(dist / params.step_length)));
    const double substep = dist / n;
    solver.set_push_motion(dir, substep);
    solver.solve(); // a pusher placed in contact acts before it moves
    for (int k = 1; k <= n; ++k) {
        solver.set_pose(pusher, Pose2(pusher_pos + dir * (dist * k / n), 0.0));
        solver.solve();
    }
    PushResult out;
    out.arrangement = solver.arrangement(arr);
    out.pusher_end = solver.pose(pusher).position();
    out.contact = solver.touched_by_pusher();
    return out;
}

} // namespace ocp
