#pragma once

// Proportional push law: place a circular pusher behind the object relative
// to the desired motion, biased sideways to steer the heading, and push
// along the position error.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ocp/arrangement.hpp"
#include "ocp/geometry.hpp"

namespace ocp {

struct PushParams {
    double k_align = 0.8;       ///< heading-correction gain on the placement angle
    double contact_gap = 0.002; ///< meters between pusher and circumcircle at placement
    double d_push = 0.01;       ///< maximum push length, meters
    double min_push = 0.002;    ///< minimum push length, meters
    double pusher_radius = 0.005;

    void validate() const
    {
        if (!(k_align >= 0.0)) throw std::invalid_argument("push.k_align must be >= 0");
        if (!(contact_gap >= 0.0)) throw std::invalid_argument("push.contact_gap must be >= 0");
        if (!(d_push > 0.0)) throw std::invalid_argument("push.d_push must be positive");
        if (!(min_push > 0.0 && min_push <= d_push)) throw std::invalid_argument("push.min_push must be in (0, d_push]");
        if (!(pusher_radius > 0.0)) throw std::invalid_argument("push.pusher_radius must be positive");
    }
};

struct PushAction {
    double alpha = 0.0;  ///< pusher placement angle, object body frame
    double beta = 0.0;   ///< push direction, object body frame
    double d_push = 0.0; ///< push length after contact, meters
    Vec2 start{};        ///< world pusher start position P
    Vec2 direction{};    ///< world unit push direction
    double approach = 0.0; ///< free travel from P until the pusher reaches the outline

    /// Total pusher travel for this action.
    double travel() const { return approach + d_push; }
};

/// Distance a pusher disc travels from `start` along `dir` before touching
/// `body`; `limit` when the line misses it.
inline double contact_travel(const WorldShape& body, Vec2 start, Vec2 dir, double pusher_radius, double limit)
{
    const Shape disc = Shape::circle(pusher_radius);
    WorldShape probe(disc, Pose2(start, 0.0));
    auto hits = [&](double t) {
        probe.update(disc, Pose2(start + dir * t, 0.0));
        return penetration(body, probe).has_value();
    };
    if (hits(0.0)) return 0.0;
    const double step = 0.25 * pusher_radius;
    for (double lo = 0.0; lo < limit; lo += step) {
        double hi = std::min(lo + step, limit);
        if (!hits(hi)) continue;
        double clear = lo;
        for (int k = 0; k < 40; ++k) {
            const double mid = 0.5 * (clear + hi);
            if (hits(mid)) hi = mid;
            else clear = mid;
        }
        return clear;
    }
    return limit;
}

/// Action moving the object at `s` toward `s_hat`, or nullopt when there is
/// nothing to correct.
inline std::optional<PushAction> push_strategy(const Pose2& s, const Pose2& s_hat, const Shape& shape,
                                               const PushParams& params = {})
{
    const Vec2 e = s_hat.position() - s.position();
    const double theta_err = angle_diff(s_hat.theta(), s.theta());
    const double e_norm = e.norm();
    constexpr double tiny = 1e-12;
    if (e_norm <= tiny && std::abs(theta_err) <= tiny) return std::nullopt;

    const double quarter = kPi / 4.0;
    double phi = 0.0, correction = 0.0;
    if (e_norm > tiny) {
        phi = std::atan2(e.y, e.x);
        correction = std::clamp(theta_err, -quarter, quarter);
    } else {
        // pure rotation: push along the current heading with a saturated offset
        phi = s.theta();
        correction = std::copysign(quarter, theta_err);
    }
    const double place_world = normalize_angle(phi + kPi + params.k_align * correction);
    const double radius = shape.circumradius();
    const double reach = radius + params.pusher_radius + params.contact_gap;

    PushAction a;
    a.alpha = normalize_angle(place_world - s.theta());
    a.beta = normalize_angle(phi - s.theta());
    a.start = s.position() + unit_vector(place_world) * reach;
    a.direction = unit_vector(phi);
    a.d_push = std::clamp(std::max(e_norm, radius * std::abs(theta_err)), params.min_push, params.d_push);

    a.approach = contact_travel(WorldShape(shape, s), a.start, a.direction, params.pusher_radius, 2.0 * reach);
    return a;
}

/// True when a pusher disc at `p` would start outside the workspace or
/// overlapping any object other than `i`.
inline bool occluded(Vec2 p, const Arrangement& arr, std::size_t i, const Workspace& ws, double pusher_radius,
                     bool check_bounds = true)
{
    if (check_bounds && !ws.contains(p)) return true;
    const Shape disc = Shape::circle(pusher_radius);
    const WorldShape pusher(disc, Pose2(p, 0.0));
    for (std::size_t j = 0; j < arr.size(); ++j) {
        if (j == i) continue;
        if (penetration(pusher, WorldShape(arr.shape(j), arr.pose(j)))) return true;
    }
    return false;
}

} // namespace ocp
