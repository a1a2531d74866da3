#pragma once

// Static SVG frames from a JSON-lines trace: the initial state, the state
// after every `stride`-th push, and the final state.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocp/scene.hpp"

namespace ocp {

struct RenderResult {
    int frames = 0;
    int pushes = 0;
    int skipped_lines = 0;
};

namespace detail {

inline const char* class_color(int cls)
{
    static const char* palette[] = {"#3cba54", "#f4c20d", "#db3236", "#4885ed",
                                    "#8e44ad", "#e67e22", "#16a085", "#7f8c8d"};
    return palette[(cls - 1) % 8];
}

class SvgCanvas {
public:
    SvgCanvas(const Workspace& ws, double px_per_m = 1500.0, double pad = 20.0)
        : ws_(ws), scale_(px_per_m), pad_(pad)
    {
        out_ << std::fixed << std::setprecision(2);
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ws.width() * scale_ + 2 * pad_
             << "\" height=\"" << ws.height() * scale_ + 2 * pad_ << "\">\n";
    }

    double x(double wx) const { return pad_ + (wx - ws_.min.x) * scale_; }
    double y(double wy) const { return pad_ + (ws_.max.y - wy) * scale_; }

    void rect(Vec2 lo, Vec2 hi, const std::string& style)
    {
        out_ << "<rect x=\"" << x(lo.x) << "\" y=\"" << y(hi.y) << "\" width=\"" << (hi.x - lo.x) * scale_
             << "\" height=\"" << (hi.y - lo.y) * scale_ << "\" style=\"" << style << "\"/>\n";
    }

    void circle(Vec2 c, double r, const std::string& style)
    {
        out_ << "<circle cx=\"" << x(c.x) << "\" cy=\"" << y(c.y) << "\" r=\"" << r * scale_ << "\" style=\"" << style
             << "\"/>\n";
    }

    void polygon(const std::vector<Vec2>& pts, const std::string& style)
    {
        out_ << "<polygon points=\"";
        for (const Vec2& p : pts) out_ << x(p.x) << ',' << y(p.y) << ' ';
        out_ << "\" style=\"" << style << "\"/>\n";
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& style)
    {
        out_ << "<polyline points=\"";
        for (const Vec2& p : pts) out_ << x(p.x) << ',' << y(p.y) << ' ';
        out_ << "\" style=\"fill:none;" << style << "\"/>\n";
    }

    void text(double px, double py, const std::string& s)
    {
        out_ << "<text x=\"" << px << "\" y=\"" << py << "\" font-family=\"monospace\" font-size=\"12\">" << s
             << "</text>\n";
    }

    std::string finish()
    {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    Workspace ws_;
    double scale_;
    double pad_;
    std::ostringstream out_;
};

struct FrameState {
    std::vector<Pose2> poses;
    std::optional<std::vector<Pose2>> trajectory;
    std::optional<std::pair<Vec2, Vec2>> pusher; ///< start, direction
    int step = 0;
};

inline std::vector<Pose2> poses_from_json(const json& j)
{
    std::vector<Pose2> out;
    for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    return out;
}

inline std::string draw_frame(const Scene& scene, const FrameState& f, double pusher_radius)
{
    SvgCanvas svg(scene.workspace);
    const Workspace& ws = scene.workspace;
    svg.rect(ws.min, ws.max, "fill:#f3f3f3;stroke:#555;stroke-width:1");
    const Vec2 band{ws.boundary_margin, ws.boundary_margin};
    svg.rect(ws.min + band, ws.max - band, "fill:#ffffff;stroke:#bbb;stroke-dasharray:4,3");
    if (const auto* g = std::get_if<GoalRegions>(&scene.task.variant)) {
        std::vector<std::pair<GoalRegion, int>> drawn;
        for (std::size_t k = 0; k < g->regions.size(); ++k) {
            const auto& r = g->regions[k];
            const bool dup = std::any_of(drawn.begin(), drawn.end(), [&](const auto& d) {
                return d.first.center == r.center && d.first.radius == r.radius;
            });
            if (dup) continue;
            drawn.push_back({r, scene.objects[k].cls});
            svg.circle(r.center, r.radius, std::string("fill:") + class_color(scene.objects[k].cls) +
                                               ";fill-opacity:0.15;stroke:" + class_color(scene.objects[k].cls));
        }
    }
    for (std::size_t k = 0; k < f.poses.size() && k < scene.objects.size(); ++k) {
        const auto& obj = scene.objects[k];
        const std::string style = std::string("fill:") + class_color(obj.cls) + ";stroke:#222;stroke-width:0.8";
        for (const auto& part : obj.shape.parts()) {
            if (const auto* c = std::get_if<Circle>(&part))
                svg.circle(f.poses[k].transform(c->center), c->radius, style);
            else {
                std::vector<Vec2> pts;
                for (const Vec2& v : std::get<ConvexPolygon>(part).vertices) pts.push_back(f.poses[k].transform(v));
                svg.polygon(pts, style);
            }
        }
    }
    if (f.trajectory && !f.trajectory->empty()) {
        std::vector<Vec2> pts;
        for (const auto& p : *f.trajectory) pts.push_back(p.position());
        svg.polyline(pts, "stroke:#000;stroke-width:1.5;stroke-dasharray:5,3");
        svg.circle(pts.back(), 0.003, "fill:#000");
    }
    if (f.pusher) {
        const auto [start, dir] = *f.pusher;
        svg.circle(start, pusher_radius, "fill:#999;stroke:#333");
        svg.polyline({start, start + dir * 0.02}, "stroke:#333;stroke-width:1.5");
    }
    svg.text(8, 14, "step " + std::to_string(f.step));
    return svg.finish();
}

} // namespace detail

/// Writes frame_NNNN.svg files into `out_dir`. Frame count is
/// floor(pushes / stride) + 2 for a trace with records, 0 for an empty one.
/// Unparseable lines are skipped with a message on `warn`.
inline RenderResult render_trace(const std::filesystem::path& trace_path, const std::filesystem::path& out_dir,
                                 int stride, std::ostream& warn)
{
    if (stride < 1) throw std::invalid_argument("render: stride must be >= 1");
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open " + trace_path.string());

    RenderResult res;
    std::vector<json> records;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j["type"].is_string()) {
            warn << "warning: " << trace_path.string() << ":" << lineno << ": skipping corrupt line\n";
            ++res.skipped_lines;
            continue;
        }
        records.push_back(std::move(j));
    }
    if (records.empty()) return res;

    std::optional<Scene> scene;
    double pusher_radius = SimParams{}.pusher_radius;
    for (const auto& r : records)
        if (r["type"] == "observe" && r.contains("scene")) {
            scene = scene_from_json(r["scene"]);
            try {
                pusher_radius = make_setup(*scene, json::object(), 0).sim.pusher_radius;
            } catch (const std::exception&) {
            }
            break;
        }
    if (!scene) throw std::runtime_error("trace has no observe record with an embedded scene");

    std::filesystem::create_directories(out_dir);
    auto write = [&](const detail::FrameState& f) {
        std::ostringstream name;
        name << "frame_" << std::setw(4) << std::setfill('0') << res.frames << ".svg";
        std::ofstream out(out_dir / name.str());
        out << detail::draw_frame(*scene, f, pusher_radius);
        ++res.frames;
    };

    detail::FrameState state;
    {
        const auto start = scene->arrangement().poses();
        state.poses.assign(start.begin(), start.end());
    }
    json plan = json::array();
    bool first = true;
    for (const auto& r : records) {
        try {
            const std::string type = r["type"];
            if (type == "observe" && first) {
                state.poses = detail::poses_from_json(r.at("poses"));
                first = false;
                write(state);
            } else if (type == "plan_end") {
                plan = r.value("plan", json::array());
            } else if (type == "push") {
                if (first) {
                    first = false;
                    write(state);
                }
                state.poses = detail::poses_from_json(r.at("poses"));
                state.step = r.value("step", state.step);
                const int ps = r.value("plan_step", -1);
                state.trajectory.reset();
                if (ps >= 0 && ps < static_cast<int>(plan.size()))
                    state.trajectory = detail::poses_from_json(plan[static_cast<std::size_t>(ps)].at("trajectory"));
                const auto& s = r.at("start");
                const auto& d = r.at("direction");
                state.pusher = {{s.at(0).get<double>(), s.at(1).get<double>()},
                                {d.at(0).get<double>(), d.at(1).get<double>()}};
                ++res.pushes;
                if (res.pushes % stride == 0) write(state);
            } else if (type == "done" && r.contains("final_poses")) {
                state.poses = detail::poses_from_json(r["final_poses"]);
                state.step = r.value("step", state.step);
            }
        } catch (const json::exception& e) {
            warn << "warning: skipping malformed " << r["type"].get<std::string>() << " record: " << e.what() << '\n';
            ++res.skipped_lines;
        }
    }
    if (first) write(state);
    state.trajectory.reset();
    state.pusher.reset();
    write(state);
    return res;
}

} // namespace ocp
