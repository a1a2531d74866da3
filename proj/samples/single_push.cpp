// Drives one cube to a target pose with the closed-loop push law and prints
// every push.

#include <cstdio>

#include "ocp/executor.hpp"

using namespace ocp;

int main()
{
    const Workspace ws{{-0.15, -0.15}, {0.15, 0.15}, 0.02};
    const Arrangement arr({Pose2(-0.05, -0.03, 0.0)}, {Shape::box(0.0254, 0.0254)}, {1});
    const Trajectory target{Pose2(0.06, 0.04, 0.6)};

    SimParams sim;
    PushParams push;
    Arrangement truth = arr;
    int pushes = 0;
    for (; pushes < 80; ++pushes) {
        const Pose2& s = truth.pose(0);
        if (distance(s.position(), target[0].position()) <= 0.005 && std::abs(angle_diff(target[0].theta(), s.theta())) <= 0.1)
            break;
        const auto a = push_strategy(s, target[0], truth.shape(0), push);
        if (!a) break;
        truth = pusher_step(truth, a->start, a->direction, a->travel(), ws, sim).arrangement;
        const Pose2& p = truth.pose(0);
        std::printf("push %2d  d=%.4f  object at (%.4f, %.4f, %.3f)\n", pushes + 1, a->d_push, p.x(), p.y(), p.theta());
    }
    std::printf("%d pushes\n", pushes);

    // the same motion through the library's executor
    const auto r = execute_trajectory(arr, 0, target, NoiseModel{}, sim, ws, Tolerances{});
    std::printf("executor: %d pushes, skipped %zu\n", r.report.pushes_executed, r.report.skipped.size());
}
