#pragma once

// Closed-loop execution of planned object trajectories with a simulated
// pusher, plus the interleaved sense-plan-execute loop.

#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocp/arrangement.hpp"
#include "ocp/planner.hpp"
#include "ocp/push.hpp"
#include "ocp/rng.hpp"
#include "ocp/sim.hpp"
#include "ocp/tasks.hpp"

namespace ocp {

struct NoiseModel {
    double actuation_sigma = 0.0;     ///< fractional push-length error; also direction jitter in radians
    double sensing_sigma_pos = 0.0;   ///< meters
    double sensing_sigma_theta = 0.0; ///< radians
    std::uint64_t rng_seed = 0;

    void validate() const
    {
        if (!(actuation_sigma >= 0.0) || !(sensing_sigma_pos >= 0.0) || !(sensing_sigma_theta >= 0.0))
            throw std::invalid_argument("noise sigmas must be >= 0");
    }
};

struct Tolerances {
    double eps_p_final = 0.005;
    double eps_p_intermediate = 0.015;
    double eps_theta_final = 0.1;
    /// Infinite means heading is not controlled at intermediate waypoints.
    double eps_theta_intermediate = std::numeric_limits<double>::infinity();
    int max_pushes_per_waypoint = 80;

    void validate() const
    {
        if (!(eps_p_final > 0.0) || !(eps_p_intermediate > 0.0) || !(eps_theta_final > 0.0) ||
            !(eps_theta_intermediate > 0.0))
            throw std::invalid_argument("tolerances must be positive");
        if (max_pushes_per_waypoint < 1) throw std::invalid_argument("max_pushes_per_waypoint must be >= 1");
    }
};

struct ExecutorParams {
    PushParams push;
    Tolerances tolerances;
    /// Target depth inside the guard band edge for corrective pushes, meters.
    double guard_clearance = 0.005;
    int guard_rounds = 3;

    void validate() const
    {
        push.validate();
        tolerances.validate();
        if (!(guard_clearance >= 0.0)) throw std::invalid_argument("guard_clearance must be >= 0");
        if (guard_rounds < 0) throw std::invalid_argument("guard_rounds must be >= 0");
    }
};

struct SkipRecord {
    std::size_t object = 0;
    std::string reason;
};

struct ExecutionReport {
    int pushes_executed = 0;
    int objects_completed = 0;
    std::vector<SkipRecord> skipped;
    bool budget_exhausted = false;
};

struct LoopResult {
    bool success = false;
    int num_actions = 0;     ///< executed trajectories with at least one push
    int execution_steps = 0; ///< pusher_step invocations
    int plan_cycles = 0;
    double planning_time_s = 0.0;
    double wall_time_s = 0.0;
    std::string termination;
    Arrangement final_arrangement; ///< true (noise-free) state at the end

    double planning_time_per_action_s() const { return num_actions > 0 ? planning_time_s / num_actions : 0.0; }
};

/// Receives loop events; every callback has an empty default.
class LoopObserver {
public:
    virtual ~LoopObserver() = default;
    virtual void on_observe(int /*step*/, const Arrangement& /*sensed*/) {}
    virtual void on_plan_start(int /*step*/, int /*cycle*/) {}
    virtual void on_plan_end(int /*step*/, int /*cycle*/, const PlanResult& /*plan*/, double /*seconds*/) {}
    virtual void on_push(int /*step*/, std::size_t /*object*/, int /*plan_step*/, const PushAction& /*action*/,
                         Vec2 /*start*/, Vec2 /*direction*/, double /*travel*/, const Arrangement& /*after*/)
    {
    }
    virtual void on_skip(int /*step*/, std::size_t /*object*/, const std::string& /*reason*/) {}
    virtual void on_boundary_guard(int /*step*/, std::size_t /*object*/, Vec2 /*target*/) {}
    virtual void on_done(int /*step*/, const LoopResult& /*result*/) {}
};

/// Target on the segment toward the workspace center that lies `clearance`
/// inside the guard band.
inline Vec2 guard_target(Vec2 p, const Workspace& ws, double clearance)
{
    const double m = ws.boundary_margin + clearance;
    const Vec2 lo = ws.min + Vec2{m, m}, hi = ws.max - Vec2{m, m};
    const Vec2 c = ws.center();
    double t = 0.0;
    auto need = [&](double v, double cv, double a, double b) {
        if (v < a && cv > v) t = std::max(t, (a - v) / (cv - v));
        if (v > b && cv < v) t = std::max(t, (v - b) / (v - cv));
    };
    need(p.x, c.x, lo.x, hi.x);
    need(p.y, c.y, lo.y, hi.y);
    return p + (c - p) * std::min(t, 1.0);
}

/// Owns the noise streams and counters for one run.
class Executor {
public:
    Executor(const Workspace& ws, const SimParams& sim, const ExecutorParams& params, const NoiseModel& noise,
             LoopObserver* observer = nullptr)
        : ws_(ws),
          sim_(sim),
          params_(params),
          noise_(noise),
          actuation_(derive_seed(noise.rng_seed, 1)),
          sensing_(derive_seed(noise.rng_seed, 2)),
          observer_(observer)
    {
        ws_.validate();
        sim_.validate();
        params_.validate();
        noise_.validate();
        params_.push.pusher_radius = sim_.pusher_radius;
    }

    /// Observation of the true state with sensing noise.
    Arrangement sense(const Arrangement& truth)
    {
        if (noise_.sensing_sigma_pos == 0.0 && noise_.sensing_sigma_theta == 0.0) return truth;
        Arrangement out = truth;
        for (std::size_t k = 0; k < truth.size(); ++k) {
            const Pose2& p = truth.pose(k);
            const double dx = sensing_.normal(0.0, noise_.sensing_sigma_pos);
            const double dy = sensing_.normal(0.0, noise_.sensing_sigma_pos);
            const double dt = sensing_.normal(0.0, noise_.sensing_sigma_theta);
            out.set_pose(k, Pose2(p.x() + dx, p.y() + dy, p.theta() + dt));
        }
        return out;
    }

    /// Drives object `i` through `traj`. `truth` and `sensed` are updated in
    /// place; at most `push_budget` pushes are spent.
    ExecutionReport execute(Arrangement& truth, Arrangement& sensed, std::size_t i, const Trajectory& traj,
                            int plan_step, int push_budget)
    {
        return run(truth, sensed, i, traj, plan_step, push_budget, params_.tolerances.eps_p_final,
                   params_.tolerances.eps_theta_final, true);
    }

    /// Pushes every object inside the guard band back toward the center.
    /// Returns the number of corrective trajectories that used a push.
    int boundary_guard(Arrangement& truth, Arrangement& sensed, int& push_budget)
    {
        int actions = 0;
        for (int round = 0; round < params_.guard_rounds; ++round) {
            bool any = false;
            for (std::size_t k = 0; k < sensed.size() && push_budget > 0; ++k) {
                if (!ws_.in_guard_band(sensed.position(k))) continue;
                any = true;
                const Vec2 target = guard_target(sensed.position(k), ws_, params_.guard_clearance);
                if (observer_) observer_->on_boundary_guard(steps_, k, target);
                const Trajectory traj{Pose2(target, sensed.pose(k).theta())};
                const auto rep = run(truth, sensed, k, traj, -1, push_budget, params_.tolerances.eps_p_final,
                                     std::numeric_limits<double>::infinity(), false);
                push_budget -= rep.pushes_executed;
                if (rep.pushes_executed > 0) ++actions;
            }
            if (!any) break;
        }
        return actions;
    }

    int steps() const { return steps_; }
    LoopObserver* observer() const { return observer_; }

private:
    ExecutionReport run(Arrangement& truth, Arrangement& sensed, std::size_t i, const Trajectory& traj,
                        int plan_step, int push_budget, double eps_p_final, double eps_theta_final, bool check_bounds)
    {
        if (traj.empty()) throw std::invalid_argument("execute_trajectory: empty trajectory");
        if (i >= truth.size()) throw std::invalid_argument("execute_trajectory: object index out of range");
        ExecutionReport rep;
        const auto& tol = params_.tolerances;
        for (std::size_t w = 0; w < traj.size(); ++w) {
            const bool last = w + 1 == traj.size();
            const double eps_p = last ? eps_p_final : tol.eps_p_intermediate;
            const double eps_t = last ? eps_theta_final : tol.eps_theta_intermediate;
            int pushes = 0;
            for (;;) {
                const Pose2& s = sensed.pose(i);
                // an uncontrolled heading is targeted at its current value
                const Pose2 target = std::isfinite(eps_t) ? traj[w] : Pose2(traj[w].position(), s.theta());
                if (distance(s.position(), target.position()) <= eps_p &&
                    std::abs(angle_diff(target.theta(), s.theta())) <= eps_t)
                    break;
                if (pushes >= tol.max_pushes_per_waypoint) return skip(rep, i, "push cap reached");
                if (push_budget - rep.pushes_executed <= 0) {
                    rep.budget_exhausted = true;
                    return rep;
                }
                const auto action = push_strategy(s, target, sensed.shape(i), params_.push);
                if (!action) break;
                if (occluded(action->start, sensed, i, ws_, sim_.pusher_radius, check_bounds))
                    return skip(rep, i, rep.pushes_executed == 0 ? "start occluded" : "push occluded");
                Vec2 dir = action->direction;
                double length = action->d_push;
                if (noise_.actuation_sigma > 0.0) {
                    dir = rotate(dir, actuation_.normal(0.0, noise_.actuation_sigma));
                    length *= std::max(0.0, 1.0 + actuation_.normal(0.0, noise_.actuation_sigma));
                }
                const double travel = action->approach + length;
                if (travel > 0.0) truth = pusher_step(truth, action->start, dir, travel, ws_, sim_).arrangement;
                ++steps_;
                ++pushes;
                ++rep.pushes_executed;
                sensed = sense(truth);
                if (observer_) observer_->on_push(steps_, i, plan_step, *action, action->start, dir, travel, truth);
            }
        }
        ++rep.objects_completed;
        return rep;
    }

    ExecutionReport& skip(ExecutionReport& rep, std::size_t i, const std::string& reason)
    {
        rep.skipped.push_back({i, reason});
        if (observer_) observer_->on_skip(steps_, i, reason);
        return rep;
    }

    Workspace ws_;
    SimParams sim_;
    ExecutorParams params_;
    NoiseModel noise_;
    Rng actuation_;
    Rng sensing_;
    LoopObserver* observer_ = nullptr;
    int steps_ = 0;
};

struct ExecuteResult {
    Arrangement arrangement;
    ExecutionReport report;
};

/// Single-trajectory execution starting from a perfectly known state.
inline ExecuteResult execute_trajectory(const Arrangement& arr, std::size_t i, const Trajectory& traj,
                                        const NoiseModel& noise, const SimParams& sim, const Workspace& ws,
                                        const Tolerances& tolerances, const PushParams& push = {})
{
    ExecutorParams params;
    params.push = push;
    params.tolerances = tolerances;
    Executor ex(ws, sim, params, noise);
    Arrangement truth = arr, sensed = arr;
    auto rep = ex.execute(truth, sensed, i, traj, 0, std::numeric_limits<int>::max());
    return {truth, rep};
}

struct Budgets {
    int max_pushes = 500;
    int max_plan_cycles = 200;
    double max_wall_seconds = 0.0; ///< 0 disables the wall-clock limit

    void validate() const
    {
        if (max_pushes < 0) throw std::invalid_argument("budget.max_pushes must be >= 0");
        if (max_plan_cycles < 1) throw std::invalid_argument("budget.max_plan_cycles must be >= 1");
        if (!(max_wall_seconds >= 0.0)) throw std::invalid_argument("budget.max_wall_seconds must be >= 0");
    }
};

struct LoopSetup {
    Workspace workspace;
    TaskSpec task;
    PlannerConfig planner;
    SimParams sim;
    ExecutorParams executor;
    NoiseModel noise;
    Budgets budgets;
};

/// Sense, plan from the observation, execute every planned trajectory,
/// guard the boundary; repeat until the goal holds or a budget runs out.
inline LoopResult rearrange_loop(const Arrangement& start, const LoopSetup& setup, LoopObserver* observer = nullptr)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    setup.budgets.validate();
    setup.task.validate(start.size());
    setup.planner.validate();

    Executor ex(setup.workspace, setup.sim, setup.executor, setup.noise, observer);
    LoopResult res;
    Arrangement truth = start;
    int push_budget = setup.budgets.max_pushes;
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };
    auto out_of_time = [&] { return setup.budgets.max_wall_seconds > 0.0 && elapsed() >= setup.budgets.max_wall_seconds; };

    for (;;) {
        Arrangement sensed = ex.sense(truth);
        if (observer) observer->on_observe(ex.steps(), sensed);
        if (goal_satisfied(setup.task, sensed)) {
            res.success = true;
            res.termination = "goal reached";
            break;
        }
        if (push_budget <= 0) {
            res.termination = "push budget exhausted";
            break;
        }
        if (res.plan_cycles >= setup.budgets.max_plan_cycles) {
            res.termination = "plan cycle budget exhausted";
            break;
        }
        if (out_of_time()) {
            res.termination = "wall-clock budget exhausted";
            break;
        }

        PlannerConfig cfg = setup.planner;
        cfg.rng_seed = derive_seed(setup.planner.rng_seed, static_cast<std::uint64_t>(res.plan_cycles));
        if (observer) observer->on_plan_start(ex.steps(), res.plan_cycles);
        const auto tp = clock::now();
        const PlanResult plan = ocp_plan(sensed, setup.task, cfg, setup.workspace, setup.sim);
        const double plan_s = std::chrono::duration<double>(clock::now() - tp).count();
        res.planning_time_s += plan_s;
        if (observer) observer->on_plan_end(ex.steps(), res.plan_cycles, plan, plan_s);
        ++res.plan_cycles;

        for (std::size_t d = 0; d < plan.steps.size() && push_budget > 0; ++d) {
            const auto& step = plan.steps[d];
            const auto rep = ex.execute(truth, sensed, step.object, step.trajectory, static_cast<int>(d), push_budget);
            push_budget -= rep.pushes_executed;
            if (rep.pushes_executed > 0) ++res.num_actions;
            if (goal_satisfied(setup.task, sensed)) break;
        }
        res.num_actions += ex.boundary_guard(truth, sensed, push_budget);
    }
    res.execution_steps = ex.steps();
    res.final_arrangement = truth;
    res.wall_time_s = elapsed();
    if (observer) observer->on_done(ex.steps(), res);
    return res;
}

} // namespace ocp
