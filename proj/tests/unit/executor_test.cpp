#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ocp/executor.hpp"

using namespace ocp;

namespace {

const Shape kCube = Shape::box(0.0254, 0.0254);
const Workspace kWs{{-0.15, -0.15}, {0.15, 0.15}, 0.02};

Arrangement cubes(std::vector<Pose2> poses, std::vector<int> classes = {})
{
    if (classes.empty()) classes.assign(poses.size(), 1);
    const std::size_t n = poses.size();
    return Arrangement(std::move(poses), std::vector<Shape>(n, kCube), classes);
}

TaskSpec regions_task(std::vector<GoalRegion> r)
{
    GoalRegions g;
    g.regions = std::move(r);
    return TaskSpec{g};
}

/// Checks every push against the state it was planned from.
class PushAuditor : public LoopObserver {
public:
    explicit PushAuditor(const Workspace& ws) : ws_(ws) {}

    void on_observe(int, const Arrangement& sensed) override { state_ = sensed; }
    void on_push(int step, std::size_t object, int plan_step, const PushAction&, Vec2 start, Vec2, double,
                 const Arrangement& after) override
    {
        ++pushes;
        last_step = step;
        if (state_ && occluded(start, *state_, object, ws_, SimParams{}.pusher_radius, plan_step >= 0)) ++occluded_starts;
        state_ = after;
    }
    void on_done(int step, const LoopResult&) override { done_step = step; }

    int pushes = 0;
    int occluded_starts = 0;
    int last_step = 0;
    int done_step = -1;

private:
    Workspace ws_;
    std::optional<Arrangement> state_;
};

LoopSetup single_object_setup(std::uint64_t seed, double actuation = 0.0)
{
    LoopSetup s;
    s.workspace = kWs;
    s.task = regions_task({{{0.07, 0.06}, 0.02}});
    s.planner = PlannerConfig::defaults_for(kWs, cubes({Pose2()}));
    s.planner.rng_seed = seed;
    s.noise.actuation_sigma = actuation;
    s.noise.rng_seed = seed + 1000;
    return s;
}

} // namespace

TEST(PushStrategy, StraightAheadPushesFromBehind)
{
    const auto a = push_strategy(Pose2(0, 0, 0), Pose2(0.05, 0, 0), kCube);
    ASSERT_TRUE(a.has_value());
    EXPECT_NEAR(std::abs(a->alpha), kPi, 1e-12);
    EXPECT_NEAR(a->beta, 0.0, 1e-12);
    EXPECT_NEAR(a->direction.x, 1.0, 1e-12);
    const double reach = kCube.circumradius() + PushParams{}.pusher_radius + PushParams{}.contact_gap;
    EXPECT_NEAR(a->start.x, -reach, 1e-12);
    EXPECT_NEAR(a->start.y, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(a->d_push, PushParams{}.d_push);
    // the face is at 12.7 mm; contact happens once the disc edge reaches it
    EXPECT_NEAR(a->approach, reach - 0.0127 - PushParams{}.pusher_radius, 1e-9);
}

TEST(PushStrategy, PureRotationSaturatesOffset)
{
    const PushParams p;
    for (double sign : {1.0, -1.0}) {
        const auto a = push_strategy(Pose2(0, 0, 0.3), Pose2(0, 0, 0.3 + sign * 0.5), kCube, p);
        ASSERT_TRUE(a.has_value());
        const double base = 0.3 + kPi;
        const Vec2 offset = a->start;
        const double placed = std::atan2(offset.y, offset.x);
        EXPECT_NEAR(angle_diff(placed, base), sign * p.k_align * kPi / 4, 1e-12);
        EXPECT_GE(a->d_push, p.min_push);
    }
    EXPECT_FALSE(push_strategy(Pose2(0.1, 0.1, 0.2), Pose2(0.1, 0.1, 0.2), kCube).has_value());
}

TEST(PushStrategy, BodyFrameAnglesAreConsistent)
{
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const Pose2 s(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-kPi, kPi));
        const Pose2 t(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-kPi, kPi));
        const auto a = push_strategy(s, t, kCube);
        ASSERT_TRUE(a.has_value());
        const Vec2 dir_world = unit_vector(a->beta + s.theta());
        EXPECT_NEAR(dir_world.x, a->direction.x, 1e-12);
        EXPECT_NEAR(dir_world.y, a->direction.y, 1e-12);
        EXPECT_GE(a->alpha, -kPi);
        EXPECT_LT(a->alpha, kPi);
        EXPECT_GT(a->d_push, 0.0);
    }
}

TEST(PushStrategy, ClosedLoopConvergesFromRandomStarts)
{
    int reached = 0;
    std::vector<int> counts;
    Tolerances tol;
    tol.max_pushes_per_waypoint = 60;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        Pose2 start, goal;
        do {
            start = Pose2(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-kPi, kPi));
            goal = Pose2(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-kPi, kPi));
        } while (distance(start.position(), goal.position()) < 0.05);
        const auto r = execute_trajectory(cubes({start}), 0, {goal}, NoiseModel{}, SimParams{}, kWs, tol);
        const Pose2& end = r.arrangement.pose(0);
        if (r.report.skipped.empty() && distance(end.position(), goal.position()) <= tol.eps_p_final &&
            std::abs(angle_diff(goal.theta(), end.theta())) <= tol.eps_theta_final) {
            ++reached;
            counts.push_back(r.report.pushes_executed);
        }
    }
    EXPECT_GE(reached, 190);
}

TEST(Occluded, Examples)
{
    const auto arr = cubes({Pose2(0, 0, 0), Pose2(0.05, 0, 0)});
    EXPECT_FALSE(occluded({-0.05, 0.05}, arr, 0, kWs, 0.005));
    EXPECT_TRUE(occluded({0.05, 0.0}, arr, 0, kWs, 0.005));
    EXPECT_FALSE(occluded({0.0, 0.0}, arr, 0, kWs, 0.005)); // the activated object itself does not count
    EXPECT_TRUE(occluded({0.2, 0.0}, arr, 0, kWs, 0.005));
    EXPECT_FALSE(occluded({0.2, 0.0}, arr, 0, kWs, 0.005, false));
    // disc overlapping a face without covering the center
    EXPECT_TRUE(occluded({0.05 - 0.0127 - 0.004, 0.0}, arr, 0, kWs, 0.005));
    EXPECT_FALSE(occluded({0.05 - 0.0127 - 0.006, 0.0}, arr, 0, kWs, 0.005));
}

TEST(Execute, AlreadyAtWaypointNeedsNoPush)
{
    const auto arr = cubes({Pose2(0.01, 0.02, 0.1)});
    const auto r = execute_trajectory(arr, 0, {Pose2(0.012, 0.02, 0.12)}, NoiseModel{}, SimParams{}, kWs, Tolerances{});
    EXPECT_EQ(r.report.pushes_executed, 0);
    EXPECT_TRUE(r.report.skipped.empty());
    EXPECT_TRUE(r.arrangement.same_poses(arr));
}

TEST(Execute, OccludedFirstStartSkips)
{
    // a neighbor sits exactly where the pusher must start
    const auto arr = cubes({Pose2(0, 0, 0), Pose2(-0.0254, 0, 0)});
    const auto r = execute_trajectory(arr, 0, {Pose2(0.05, 0, 0)}, NoiseModel{}, SimParams{}, kWs, Tolerances{});
    EXPECT_EQ(r.report.pushes_executed, 0);
    ASSERT_EQ(r.report.skipped.size(), 1u);
    EXPECT_EQ(r.report.skipped[0].reason, "start occluded");
    EXPECT_TRUE(r.arrangement.same_poses(arr));
}

TEST(Execute, StraightLinePushCountNearIdeal)
{
    const auto arr = cubes({Pose2(-0.05, 0, 0)});
    const auto r = execute_trajectory(arr, 0, {Pose2(0.05, 0, 0)}, NoiseModel{}, SimParams{}, kWs, Tolerances{});
    const double ideal = 0.10 / PushParams{}.d_push;
    EXPECT_GE(r.report.pushes_executed, ideal / 2);
    EXPECT_LE(r.report.pushes_executed, ideal * 2);
    EXPECT_LE(distance(r.arrangement.position(0), {0.05, 0}), Tolerances{}.eps_p_final);
}

TEST(Execute, ZeroNoiseDeterministicAndWithinTolerance)
{
    Rng rng(21);
    for (int k = 0; k < 30; ++k) {
        const Pose2 s(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), rng.uniform(-kPi, kPi));
        Trajectory traj;
        for (int w = 0; w < 3; ++w)
            traj.emplace_back(rng.uniform(-0.09, 0.09), rng.uniform(-0.09, 0.09), rng.uniform(-kPi, kPi));
        const auto a = execute_trajectory(cubes({s}), 0, traj, NoiseModel{}, SimParams{}, kWs, Tolerances{});
        const auto b = execute_trajectory(cubes({s}), 0, traj, NoiseModel{}, SimParams{}, kWs, Tolerances{});
        EXPECT_TRUE(a.arrangement.same_poses(b.arrangement));
        EXPECT_EQ(a.report.pushes_executed, b.report.pushes_executed);
        if (a.report.objects_completed == 1) {
            const Pose2& end = a.arrangement.pose(0);
            EXPECT_LE(distance(end.position(), traj.back().position()), Tolerances{}.eps_p_final);
            EXPECT_LE(std::abs(angle_diff(traj.back().theta(), end.theta())), Tolerances{}.eps_theta_final);
        }
    }
}

TEST(Execute, PushCapRecordedNotFatal)
{
    Tolerances tol;
    tol.max_pushes_per_waypoint = 2;
    const auto r = execute_trajectory(cubes({Pose2(-0.08, 0, 0)}), 0, {Pose2(0.08, 0, 0)}, NoiseModel{}, SimParams{},
                                      kWs, tol);
    EXPECT_EQ(r.report.pushes_executed, 2);
    ASSERT_EQ(r.report.skipped.size(), 1u);
    EXPECT_EQ(r.report.skipped[0].reason, "push cap reached");
}

TEST(Guard, TargetLiesInsideBandTowardCenter)
{
    const double clearance = 0.005;
    Rng rng(5);
    for (int k = 0; k < 500; ++k) {
        const Vec2 p{rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)};
        const Vec2 t = guard_target(p, kWs, clearance);
        if (!kWs.in_guard_band(p)) continue;
        EXPECT_GE(kWs.edge_distance(t), kWs.boundary_margin + clearance - 1e-12);
        EXPECT_NEAR(cross(t - p, kWs.center() - p), 0.0, 1e-12); // on the segment to the center
        EXPECT_GE(dot(t - p, kWs.center() - p), 0.0);
    }
}

TEST(Guard, PushesEdgeObjectBackInside)
{
    const auto arr = cubes({Pose2(0.14, 0.0, 0.0)});
    ExecutorParams params;
    Executor ex(kWs, SimParams{}, params, NoiseModel{});
    Arrangement truth = arr, sensed = arr;
    int budget = 100;
    const int actions = ex.boundary_guard(truth, sensed, budget);
    EXPECT_EQ(actions, 1);
    EXPECT_FALSE(kWs.in_guard_band(truth.position(0)));
    EXPECT_LT(budget, 100);
}

TEST(Loop, StartAtGoalSucceedsWithoutActions)
{
    const auto arr = cubes({Pose2(0.07, 0.06, 0)});
    const auto r = rearrange_loop(arr, single_object_setup(0));
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.num_actions, 0);
    EXPECT_EQ(r.execution_steps, 0);
    EXPECT_EQ(r.plan_cycles, 0);
}

TEST(Loop, SingleObjectAlwaysSucceedsAndNoiseCostsLittle)
{
    int clean = 0, noisy = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const auto arr = cubes({Pose2(rng.uniform(-0.1, 0.0), rng.uniform(-0.1, 0.0), rng.uniform(-kPi, kPi))});
        clean += rearrange_loop(arr, single_object_setup(seed)).success;
        noisy += rearrange_loop(arr, single_object_setup(seed, 0.1)).success;
    }
    EXPECT_EQ(clean, 50);
    EXPECT_GE(noisy, clean - 7); // within 15 points of 50 trials
}

TEST(Loop, AuditedRunsKeepInvariants)
{
    std::vector<Pose2> poses;
    std::vector<int> cls;
    for (int k = 0; k < 6; ++k) {
        poses.emplace_back((k % 3 - 1) * 0.05, (k / 3) * 0.06 - 0.03, 0.0);
        cls.push_back(k % 2 + 1);
    }
    const auto arr = cubes(poses, cls);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        LoopSetup s;
        s.workspace = {{-0.165, -0.15}, {0.165, 0.15}, 0.02};
        GoalRegions g;
        for (int c : cls) g.regions.push_back({{c == 1 ? -0.09 : 0.09, 0.0}, 0.05});
        s.task = TaskSpec{g};
        s.planner = PlannerConfig::defaults_for(s.workspace, arr);
        s.planner.rng_seed = seed;
        s.noise.rng_seed = seed;
        PushAuditor audit(s.workspace);
        const auto r = rearrange_loop(arr, s, &audit);
        EXPECT_EQ(audit.occluded_starts, 0);
        EXPECT_EQ(audit.pushes, r.execution_steps);
        EXPECT_EQ(audit.done_step, r.execution_steps);
        EXPECT_LE(r.planning_time_s, r.wall_time_s);
        EXPECT_LE(r.num_actions, r.execution_steps);
        if (r.success) {
            for (std::size_t k = 0; k < arr.size(); ++k)
                EXPECT_FALSE(s.workspace.in_guard_band(r.final_arrangement.position(k))) << "seed " << seed;
        }

        PushAuditor again(s.workspace);
        const auto r2 = rearrange_loop(arr, s, &again);
        EXPECT_EQ(r2.success, r.success);
        EXPECT_EQ(r2.num_actions, r.num_actions);
        EXPECT_EQ(r2.execution_steps, r.execution_steps);
        EXPECT_TRUE(r2.final_arrangement.same_poses(r.final_arrangement));
    }
}

TEST(Loop, PushBudgetIsRespected)
{
    const auto arr = cubes({Pose2(-0.09, -0.09, 0.0)});
    LoopSetup s = single_object_setup(3);
    s.budgets.max_pushes = 4;
    const auto r = rearrange_loop(arr, s);
    EXPECT_FALSE(r.success);
    EXPECT_LE(r.execution_steps, 4);
    EXPECT_EQ(r.termination, "push budget exhausted");
}

TEST(Noise, SensingIsZeroMeanWithRequestedSpread)
{
    NoiseModel n;
    n.sensing_sigma_pos = 0.002;
    n.sensing_sigma_theta = 0.01;
    n.rng_seed = 9;
    Executor ex(kWs, SimParams{}, ExecutorParams{}, n);
    const auto arr = cubes({Pose2(0.01, 0.02, 0.3)});
    double sx = 0, sxx = 0;
    const int m = 20000;
    for (int k = 0; k < m; ++k) {
        const double dx = ex.sense(arr).pose(0).x() - 0.01;
        sx += dx;
        sxx += dx * dx;
    }
    const double mean = sx / m, sd = std::sqrt(sxx / m - mean * mean);
    EXPECT_NEAR(mean, 0.0, 4 * 0.002 / std::sqrt(m));
    EXPECT_NEAR(sd, 0.002, 0.002 * 0.03);
}
