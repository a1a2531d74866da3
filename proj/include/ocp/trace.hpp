#pragma once

// JSON-lines event log for one rearrangement run. Every record carries a
// "type" tag and the executed-push counter "step", which never decreases.

#include <ostream>
#include <string>

#include <json.hpp>

#include "ocp/executor.hpp"
#include "ocp/scene.hpp"

namespace ocp {

inline json poses_to_json(std::span<const Pose2> poses)
{
    json out = json::array();
    for (const auto& p : poses) out.push_back({p.x(), p.y(), p.theta()});
    return out;
}

inline json result_to_json(const LoopResult& r)
{
    return {{"success", r.success},
            {"num_actions", r.num_actions},
            {"execution_steps", r.execution_steps},
            {"plan_cycles", r.plan_cycles},
            {"planning_time_s", r.planning_time_s},
            {"planning_time_per_action_s", r.planning_time_per_action_s()},
            {"wall_time_s", r.wall_time_s},
            {"termination", r.termination}};
}

class TraceWriter : public LoopObserver {
public:
    /// The scene is embedded in the first observe record so a trace renders on its own.
    TraceWriter(std::ostream& out, const Scene& scene) : out_(out), scene_(scene) {}

    void on_observe(int step, const Arrangement& sensed) override
    {
        json j = {{"type", "observe"}, {"step", step}, {"poses", poses_to_json(sensed.poses())}};
        if (!scene_written_) {
            j["scene"] = scene_to_json(scene_);
            scene_written_ = true;
        }
        emit(j);
    }

    void on_plan_start(int step, int cycle) override { emit({{"type", "plan_start"}, {"step", step}, {"cycle", cycle}}); }

    void on_plan_end(int step, int cycle, const PlanResult& plan, double seconds) override
    {
        json steps = json::array();
        for (const auto& s : plan.steps) steps.push_back({{"object", s.object}, {"trajectory", poses_to_json(s.trajectory)}});
        emit({{"type", "plan_end"},
              {"step", step},
              {"cycle", cycle},
              {"seconds", seconds},
              {"goal_reached", plan.goal_reached},
              {"start_h", plan.start_h},
              {"final_h", plan.final_h},
              {"tree_size", plan.tree_size},
              {"plan", std::move(steps)}});
    }

    void on_push(int step, std::size_t object, int plan_step, const PushAction& action, Vec2 start, Vec2 direction,
                 double travel, const Arrangement& after) override
    {
        emit({{"type", "push"},
              {"step", step},
              {"object", object},
              {"plan_step", plan_step},
              {"alpha", action.alpha},
              {"beta", action.beta},
              {"d_push", action.d_push},
              {"start", {start.x, start.y}},
              {"direction", {direction.x, direction.y}},
              {"travel", travel},
              {"poses", poses_to_json(after.poses())}});
    }

    void on_skip(int step, std::size_t object, const std::string& reason) override
    {
        emit({{"type", "skip"}, {"step", step}, {"object", object}, {"reason", reason}});
    }

    void on_boundary_guard(int step, std::size_t object, Vec2 target) override
    {
        emit({{"type", "boundary_guard"}, {"step", step}, {"object", object}, {"target", {target.x, target.y}}});
    }

    void on_done(int step, const LoopResult& result) override
    {
        json j = result_to_json(result);
        j["type"] = "done";
        j["step"] = step;
        j["final_poses"] = poses_to_json(result.final_arrangement.poses());
        emit(j);
    }

private:
    void emit(const json& j) { out_ << j.dump() << '\n'; }

    std::ostream& out_;
    const Scene& scene_;
    bool scene_written_ = false;
};

} // namespace ocp
