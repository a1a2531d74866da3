// Plans once on a builtin scene, then runs the full sense-plan-execute loop.

#include <cstdio>
#include <string>

#include "ocp/scene.hpp"

using namespace ocp;

int main(int argc, char** argv)
{
    const std::string name = argc > 1 ? argv[1] : "scene1-goals";
    const Scene scene = load_scene(name);
    const LoopSetup setup = make_setup(scene, json::object(), 1);
    const Arrangement start = scene.arrangement();

    const PlanResult plan = ocp_plan(start, setup.task, setup.planner, setup.workspace, setup.sim);
    std::printf("%s: packing %.3f, h %.4f -> %.4f over %zu step(s), tree %zu nodes%s\n", name.c_str(),
                packing_factor(scene), plan.start_h, plan.final_h, plan.steps.size(), plan.tree_size,
                plan.goal_reached ? ", goal" : "");
    for (const auto& s : plan.steps) {
        const Pose2& end = s.trajectory.back();
        std::printf("  object %zu: %zu waypoint(s) to (%.3f, %.3f)\n", s.object, s.trajectory.size(), end.x(), end.y());
    }

    const LoopResult r = rearrange_loop(start, setup);
    std::printf("loop: %s after %d actions, %d pushes, %d planning cycles (%s)\n", r.success ? "success" : "failure",
                r.num_actions, r.execution_steps, r.plan_cycles, r.termination.c_str());
}
