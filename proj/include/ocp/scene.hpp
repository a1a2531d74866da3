#pragma once

// Scene files: workspace, objects, task and default run configuration, stored
// as JSON. Also the builtin benchmark scenes and the mapping from a scene
// plus overrides to a ready-to-run LoopSetup.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocp/arrangement.hpp"
#include "ocp/executor.hpp"
#include "ocp/geometry.hpp"
#include "ocp/planner.hpp"
#include "ocp/rng.hpp"
#include "ocp/sim.hpp"
#include "ocp/tasks.hpp"

namespace ocp {

using json = nlohmann::json;

/// Load or validation failure; `path` names the offending field (e.g. "objects[3].pose").
class SceneError : public std::runtime_error {
public:
    SceneError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path))
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct SceneObject {
    Shape shape;
    json shape_json; ///< source description, kept for saving
    int cls = 1;
    Pose2 pose;
};

struct Scene {
    std::string name;
    Workspace workspace;
    std::vector<SceneObject> objects;
    TaskSpec task;
    json defaults = json::object(); ///< run configuration, same layout as overrides

    Arrangement arrangement() const
    {
        std::vector<Pose2> poses;
        std::vector<Shape> shapes;
        std::vector<int> classes;
        for (const auto& o : objects) {
            poses.push_back(o.pose);
            shapes.push_back(o.shape);
            classes.push_back(o.cls);
        }
        return Arrangement(std::move(poses), std::move(shapes), std::move(classes));
    }
};

/// Total object footprint over the usable (inside the guard band) workspace area.
inline double packing_factor(const Scene& s)
{
    double a = 0.0;
    for (const auto& o : s.objects) a += o.shape.area();
    return a / s.workspace.inner_area();
}

namespace detail {

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline std::string at_index(const std::string& path, std::size_t k)
{
    return path + "[" + std::to_string(k) + "]";
}

inline const json& require(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) throw SceneError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw SceneError(join(path, key), "missing field");
    return *it;
}

inline double number(const json& j, const std::string& path)
{
    if (!j.is_number()) throw SceneError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SceneError(path, "expected a finite number");
    return v;
}

inline int integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) throw SceneError(path, "expected an integer");
    return j.get<int>();
}

inline bool boolean(const json& j, const std::string& path)
{
    if (!j.is_boolean()) throw SceneError(path, "expected true or false");
    return j.get<bool>();
}

inline Vec2 point(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) throw SceneError(path, "expected [x, y]");
    return {number(j[0], at_index(path, 0)), number(j[1], at_index(path, 1))};
}

inline Pose2 pose(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) throw SceneError(path, "expected [x, y, theta]");
    return {number(j[0], at_index(path, 0)), number(j[1], at_index(path, 1)), number(j[2], at_index(path, 2))};
}

inline const json& array(const json& j, const std::string& path)
{
    if (!j.is_array()) throw SceneError(path, "expected an array");
    return j;
}

inline void known_keys(const json& j, std::initializer_list<const char*> keys, const std::string& path)
{
    if (!j.is_object()) throw SceneError(path, "expected an object");
    for (const auto& [k, v] : j.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; }))
            throw SceneError(join(path, k), "unknown field");
}

inline ConvexPart convex_part(const json& j, const std::string& path)
{
    const std::string type = require(j, "type", path).is_string() ? j["type"].get<std::string>() : "";
    if (type == "circle") {
        known_keys(j, {"type", "radius", "center"}, path);
        Circle c{number(require(j, "radius", path), join(path, "radius")), {}};
        if (j.contains("center")) c.center = point(j["center"], join(path, "center"));
        if (!(c.radius > 0.0)) throw SceneError(join(path, "radius"), "must be positive");
        return c;
    }
    if (type == "polygon") {
        known_keys(j, {"type", "vertices"}, path);
        const std::string vp = join(path, "vertices");
        ConvexPolygon poly;
        for (std::size_t k = 0; k < array(require(j, "vertices", path), vp).size(); ++k)
            poly.vertices.push_back(point(j["vertices"][k], at_index(vp, k)));
        try {
            validate_polygon(poly);
        } catch (const std::invalid_argument& e) {
            throw SceneError(vp, e.what());
        }
        return poly;
    }
    if (type == "box") {
        known_keys(j, {"type", "width", "height"}, path);
        const double w = number(require(j, "width", path), join(path, "width"));
        const double h = number(require(j, "height", path), join(path, "height"));
        if (!(w > 0.0 && h > 0.0)) throw SceneError(path, "box sides must be positive");
        const double hx = 0.5 * w, hy = 0.5 * h;
        return ConvexPolygon{{{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}};
    }
    throw SceneError(join(path, "type"), "expected circle, polygon or box");
}

inline Shape shape_from_json(const json& j, const std::string& path)
{
    if (j.is_object() && j.contains("type") && j["type"] == "compound") {
        known_keys(j, {"type", "parts"}, path);
        const std::string pp = join(path, "parts");
        std::vector<ConvexPart> parts;
        for (std::size_t k = 0; k < array(require(j, "parts", path), pp).size(); ++k)
            parts.push_back(convex_part(j["parts"][k], at_index(pp, k)));
        if (parts.empty()) throw SceneError(pp, "needs at least one part");
        return Shape::compound(std::move(parts));
    }
    return Shape::compound({convex_part(j, path)});
}

inline GoalRegion region_from_json(const json& j, const std::string& path)
{
    known_keys(j, {"center", "radius"}, path);
    GoalRegion r{point(require(j, "center", path), join(path, "center")),
                 number(require(j, "radius", path), join(path, "radius"))};
    if (!(r.radius > 0.0)) throw SceneError(join(path, "radius"), "must be positive");
    return r;
}

inline json region_to_json(const GoalRegion& r)
{
    return {{"center", {r.center.x, r.center.y}}, {"radius", r.radius}};
}

inline TaskSpec task_from_json(const json& j, const std::vector<SceneObject>& objects, const Workspace& ws,
                               const std::string& path)
{
    if (!require(j, "type", path).is_string()) throw SceneError(join(path, "type"), "expected a string");
    const std::string type = j["type"];
    int num_classes = 0;
    for (const auto& o : objects) num_classes = std::max(num_classes, o.cls);

    if (type == "sort_no_goals") {
        known_keys(j, {"type", "separation_threshold", "cluster_weight", "repel_scale"}, path);
        SortNoGoals s = SortNoGoals::with_defaults(num_classes, ws);
        if (j.contains("separation_threshold"))
            s.separation_threshold = number(j["separation_threshold"], join(path, "separation_threshold"));
        if (j.contains("cluster_weight")) s.cluster_weight = number(j["cluster_weight"], join(path, "cluster_weight"));
        if (j.contains("repel_scale")) s.repel_scale = number(j["repel_scale"], join(path, "repel_scale"));
        return TaskSpec{s};
    }
    if (type != "goal_regions") throw SceneError(join(path, "type"), "expected sort_no_goals or goal_regions");

    known_keys(j, {"type", "regions", "class_regions", "interchange_groups"}, path);
    GoalRegions g;
    if (j.contains("regions") == j.contains("class_regions"))
        throw SceneError(path, "give exactly one of regions or class_regions");
    if (j.contains("regions")) {
        const std::string rp = join(path, "regions");
        for (std::size_t k = 0; k < array(j["regions"], rp).size(); ++k)
            g.regions.push_back(region_from_json(j["regions"][k], at_index(rp, k)));
        if (g.regions.size() != objects.size())
            throw SceneError(rp, "expected one region per object (" + std::to_string(objects.size()) + ")");
    } else {
        // shorthand: entry c-1 is the region for every object of class c
        const std::string cp = join(path, "class_regions");
        std::vector<GoalRegion> per_class;
        for (std::size_t k = 0; k < array(j["class_regions"], cp).size(); ++k)
            per_class.push_back(region_from_json(j["class_regions"][k], at_index(cp, k)));
        if (per_class.size() < static_cast<std::size_t>(num_classes))
            throw SceneError(cp, "expected a region for each of " + std::to_string(num_classes) + " classes");
        for (const auto& o : objects) g.regions.push_back(per_class[o.cls - 1]);
    }
    if (j.contains("interchange_groups")) {
        const std::string gp = join(path, "interchange_groups");
        for (std::size_t k = 0; k < array(j["interchange_groups"], gp).size(); ++k) {
            const json& e = j["interchange_groups"][k];
            const std::string ep = at_index(gp, k);
            known_keys(e, {"objects", "regions"}, ep);
            InterchangeGroup grp;
            const std::string op = join(ep, "objects"), rp = join(ep, "regions");
            for (std::size_t m = 0; m < array(require(e, "objects", ep), op).size(); ++m) {
                const int idx = integer(e["objects"][m], at_index(op, m));
                if (idx < 0 || static_cast<std::size_t>(idx) >= objects.size())
                    throw SceneError(at_index(op, m), "object index out of range");
                grp.objects.push_back(static_cast<std::size_t>(idx));
            }
            for (std::size_t m = 0; m < array(require(e, "regions", ep), rp).size(); ++m)
                grp.regions.push_back(region_from_json(e["regions"][m], at_index(rp, m)));
            g.interchange_groups.push_back(std::move(grp));
        }
    }
    TaskSpec spec{g};
    try {
        spec.validate(objects.size());
    } catch (const std::invalid_argument& e) {
        throw SceneError(path, e.what());
    }
    return spec;
}

inline json task_to_json(const TaskSpec& spec)
{
    if (const auto* s = std::get_if<SortNoGoals>(&spec.variant))
        return {{"type", "sort_no_goals"},
                {"separation_threshold", s->separation_threshold},
                {"cluster_weight", s->cluster_weight},
                {"repel_scale", s->repel_scale}};
    const auto& g = std::get<GoalRegions>(spec.variant);
    json j = {{"type", "goal_regions"}, {"regions", json::array()}};
    for (const auto& r : g.regions) j["regions"].push_back(region_to_json(r));
    if (!g.interchange_groups.empty()) {
        j["interchange_groups"] = json::array();
        for (const auto& grp : g.interchange_groups) {
            json e = {{"objects", grp.objects}, {"regions", json::array()}};
            for (const auto& r : grp.regions) e["regions"].push_back(region_to_json(r));
            j["interchange_groups"].push_back(std::move(e));
        }
    }
    return j;
}

} // namespace detail

/// Workspace containment and initial overlap checks.
inline void validate_scene(const Scene& s, double penetration_tol = SimParams{}.penetration_tol)
{
    if (s.objects.empty()) throw SceneError("objects", "scene needs at least one object");
    for (std::size_t k = 0; k < s.objects.size(); ++k) {
        const std::string p = detail::at_index("objects", k);
        if (s.objects[k].cls < 1) throw SceneError(p + ".class", "class labels start at 1");
        if (!s.workspace.contains(s.objects[k].pose.position()))
            throw SceneError(p + ".pose", "position lies outside the workspace");
        for (std::size_t m = 0; m < k; ++m) {
            const auto pen =
                penetration(s.objects[k].shape, s.objects[k].pose, s.objects[m].shape, s.objects[m].pose);
            if (pen && pen->depth > penetration_tol)
                throw SceneError(p + ".pose", "overlaps objects[" + std::to_string(m) + "] by " +
                                                  std::to_string(pen->depth) + " m");
        }
    }
}

inline Scene scene_from_json(const json& j)
{
    using namespace detail;
    known_keys(j, {"name", "workspace", "objects", "task", "defaults"}, "");
    Scene s;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw SceneError("name", "expected a string");
        s.name = j["name"];
    }
    const json& w = require(j, "workspace", "");
    known_keys(w, {"min", "max", "boundary_margin"}, "workspace");
    s.workspace.min = point(require(w, "min", "workspace"), "workspace.min");
    s.workspace.max = point(require(w, "max", "workspace"), "workspace.max");
    s.workspace.boundary_margin =
        w.contains("boundary_margin") ? number(w["boundary_margin"], "workspace.boundary_margin") : 0.02;
    try {
        s.workspace.validate();
    } catch (const std::invalid_argument& e) {
        throw SceneError("workspace", e.what());
    }

    const json& objs = array(require(j, "objects", ""), "objects");
    for (std::size_t k = 0; k < objs.size(); ++k) {
        const std::string p = at_index("objects", k);
        known_keys(objs[k], {"shape", "class", "pose"}, p);
        SceneObject o;
        o.shape_json = require(objs[k], "shape", p);
        o.shape = shape_from_json(o.shape_json, p + ".shape");
        o.cls = integer(require(objs[k], "class", p), p + ".class");
        o.pose = pose(require(objs[k], "pose", p), p + ".pose");
        s.objects.push_back(std::move(o));
    }
    validate_scene(s);
    s.task = task_from_json(require(j, "task", ""), s.objects, s.workspace, "task");
    if (j.contains("defaults")) {
        if (!j["defaults"].is_object()) throw SceneError("defaults", "expected an object");
        s.defaults = j["defaults"];
    }
    return s;
}

inline json scene_to_json(const Scene& s)
{
    json j;
    j["name"] = s.name;
    j["workspace"] = {{"min", {s.workspace.min.x, s.workspace.min.y}},
                      {"max", {s.workspace.max.x, s.workspace.max.y}},
                      {"boundary_margin", s.workspace.boundary_margin}};
    j["objects"] = json::array();
    for (const auto& o : s.objects)
        j["objects"].push_back({{"shape", o.shape_json}, {"class", o.cls}, {"pose", {o.pose.x(), o.pose.y(), o.pose.theta()}}});
    j["task"] = detail::task_to_json(s.task);
    j["defaults"] = s.defaults;
    return j;
}

inline Scene load_scene_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw SceneError("", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SceneError("", path.string() + ": " + e.what());
    }
    return scene_from_json(j);
}

inline void save_scene_file(const Scene& s, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << scene_to_json(s).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Builtin scenes

inline constexpr double kCubeSide = 0.0254;

namespace detail {

inline json box_json(double side) { return {{"type", "box"}, {"width", side}, {"height", side}}; }

inline SceneObject cube(int cls, double x, double y, double side = kCubeSide)
{
    return {Shape::box(side, side), box_json(side), cls, Pose2(x, y, 0.0)};
}

inline Workspace centered_workspace(double w, double h, double margin = 0.02)
{
    return {{-w / 2, -h / 2}, {w / 2, h / 2}, margin};
}

/// Row-major grid positions centered on the origin.
inline std::vector<Vec2> grid_positions(int cols, int rows, double spacing_x, double spacing_y)
{
    std::vector<Vec2> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.push_back({(c - (cols - 1) / 2.0) * spacing_x, ((rows - 1) / 2.0 - r) * spacing_y});
    return out;
}

inline json budget_minutes(double minutes)
{
    return {{"budget", {{"minutes", minutes}, {"seconds_per_push", 2.5}}}};
}

inline Scene sorting_scene(std::string name, int cols, int rows, double sx, double sy, int classes)
{
    Scene s;
    s.name = std::move(name);
    s.workspace = centered_workspace(0.33, 0.30);
    const auto pts = grid_positions(cols, rows, sx, sy);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const Vec2 p = pts[static_cast<std::size_t>(r * cols + c)];
            s.objects.push_back(cube((r + c) % classes + 1, p.x, p.y));
        }
    s.task = TaskSpec{SortNoGoals::with_defaults(classes, s.workspace)};
    s.defaults = budget_minutes(10);
    return s;
}

inline std::vector<std::size_t> objects_of_class(const Scene& s, int cls)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.objects.size(); ++k)
        if (s.objects[k].cls == cls) out.push_back(k);
    return out;
}

/// Every object gets its class region.
inline TaskSpec class_goal_task(const Scene& s, const std::vector<GoalRegion>& per_class)
{
    GoalRegions g;
    for (const auto& o : s.objects) g.regions.push_back(per_class.at(static_cast<std::size_t>(o.cls - 1)));
    return TaskSpec{g};
}

/// Class members share the listed regions interchangeably.
inline TaskSpec interchange_task(const Scene& s, const std::vector<std::vector<GoalRegion>>& per_class)
{
    GoalRegions g;
    g.regions.resize(s.objects.size());
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        InterchangeGroup grp{objects_of_class(s, static_cast<int>(c) + 1), per_class[c]};
        for (std::size_t k = 0; k < grp.objects.size(); ++k) g.regions[grp.objects[k]] = grp.regions[k];
        g.interchange_groups.push_back(std::move(grp));
    }
    return TaskSpec{g};
}

/// Classes spread over `count` slots with a fixed shuffle.
inline std::vector<int> shuffled_classes(int classes, int per_class, std::uint64_t seed)
{
    std::vector<int> out;
    for (int c = 1; c <= classes; ++c) out.insert(out.end(), static_cast<std::size_t>(per_class), c);
    Rng rng(seed);
    for (std::size_t k = out.size(); k > 1; --k) std::swap(out[k - 1], out[rng.index(k)]);
    return out;
}

} // namespace detail

inline Scene builtin_scene(const std::string& name)
{
    using namespace detail;
    if (name == "scene1") return sorting_scene("scene1", 4, 3, 0.06, 0.06, 2);
    if (name == "scene2") return sorting_scene("scene2", 5, 3, 0.05, 0.06, 3);

    if (name == "scene3") {
        Scene s;
        s.name = name;
        s.workspace = centered_workspace(0.394, 0.330);
        const auto pts = grid_positions(8, 4, 0.04, 0.04);
        const auto cls = shuffled_classes(4, 8, 3);
        for (std::size_t k = 0; k < pts.size(); ++k) s.objects.push_back(cube(cls[k], pts[k].x, pts[k].y));
        s.task = class_goal_task(s, {{{-0.105, 0.08}, 0.06},
                                     {{0.105, 0.08}, 0.06},
                                     {{-0.105, -0.08}, 0.06},
                                     {{0.105, -0.08}, 0.06}});
        s.defaults = budget_minutes(30);
        return s;
    }

    if (name == "scene4") {
        Scene s;
        s.name = name;
        s.workspace = centered_workspace(0.30, 0.30);
        const std::vector<Vec2> goals{{0.09, 0.09}, {0.03, 0.09}, {-0.03, 0.09}, {0.09, 0.03}, {0.09, -0.03}};
        // the two groups start on each other's goals
        for (const Vec2& g : goals) s.objects.push_back(cube(1, -g.x, -g.y));
        for (const Vec2& g : goals) s.objects.push_back(cube(2, g.x, g.y));
        std::vector<std::vector<GoalRegion>> regions(2);
        for (const Vec2& g : goals) {
            regions[0].push_back({g, 0.02});
            regions[1].push_back({g * -1.0, 0.02});
        }
        s.task = interchange_task(s, regions);
        s.defaults = budget_minutes(15);
        return s;
    }

    if (name == "scene5") {
        Scene s;
        s.name = name;
        s.workspace = centered_workspace(0.30, 0.30);
        const auto pts = grid_positions(4, 4, 0.03, 0.03);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                const Vec2 p = pts[static_cast<std::size_t>(r * 4 + c)];
                s.objects.push_back(cube((r + 2 * c) % 4 + 1, p.x, p.y));
            }
        std::vector<std::vector<GoalRegion>> regions(4);
        for (int k = 0; k < 16; ++k)
            regions[static_cast<std::size_t>(k / 4)].push_back({unit_vector(kTwoPi * k / 16.0) * 0.10, 0.02});
        s.task = interchange_task(s, regions);
        s.defaults = budget_minutes(15);
        return s;
    }

    if (name == "scene1-goals") {
        Scene s;
        s.name = name;
        s.workspace = centered_workspace(0.33, 0.30);
        const auto pts = grid_positions(3, 2, 0.05, 0.06);
        for (std::size_t k = 0; k < pts.size(); ++k) s.objects.push_back(cube(static_cast<int>(k % 2) + 1, pts[k].x, pts[k].y));
        s.task = class_goal_task(s, {{{-0.09, 0.0}, 0.05}, {{0.09, 0.0}, 0.05}});
        s.defaults = {{"budget", {{"max_pushes", 500}}}};
        return s;
    }

    if (name == "sorting-sim") {
        Scene s;
        s.name = name;
        s.workspace = centered_workspace(0.6, 0.6);
        const double side = 0.04;
        const auto pts = grid_positions(8, 4, 0.06, 0.06);
        const auto cls = shuffled_classes(4, 8, 7);
        for (std::size_t k = 0; k < pts.size(); ++k) s.objects.push_back(cube(cls[k], pts[k].x, pts[k].y, side));
        s.task = class_goal_task(s, {{{0.135, 0.135}, 0.135},
                                     {{-0.135, 0.135}, 0.135},
                                     {{-0.135, -0.135}, 0.135},
                                     {{0.135, -0.135}, 0.135}});
        s.defaults = budget_minutes(15);
        return s;
    }
    throw SceneError("", "unknown builtin scene '" + name + "'");
}

inline std::vector<std::string> builtin_scene_names()
{
    return {"scene1", "scene2", "scene3", "scene4", "scene5", "scene1-goals", "sorting-sim"};
}

inline bool is_builtin_scene(const std::string& name)
{
    const auto names = builtin_scene_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

/// Builtin name or path to a scene file.
inline Scene load_scene(const std::string& name_or_path)
{
    if (is_builtin_scene(name_or_path) && !std::filesystem::exists(name_or_path)) {
        Scene s = builtin_scene(name_or_path);
        validate_scene(s);
        return s;
    }
    return load_scene_file(name_or_path);
}

// ---------------------------------------------------------------------------
// Run configuration

/// Parses `key.path=value` and stores value (JSON if it parses, else a
/// string) at the dotted path inside `config`.
inline void apply_override(json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw SceneError(assignment, "expected key=value");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &config;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw SceneError(key, "empty key component");
        parts.push_back(part);
    }
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        json& next = (*node)[parts[k]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw SceneError(key, "'" + parts[k] + "' is not a section");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

/// Recursive object merge; `patch` wins.
inline json merge_config(json base, const json& patch)
{
    if (!base.is_object() || !patch.is_object()) return patch;
    for (const auto& [k, v] : patch.items()) base[k] = base.contains(k) ? merge_config(base[k], v) : v;
    return base;
}

namespace detail {

template <class F>
void each_field(const json& section, const std::string& path, F&& f)
{
    if (!section.is_object()) throw SceneError(path, "expected an object");
    for (const auto& [k, v] : section.items()) {
        if (!f(k, v, join(path, k))) throw SceneError(join(path, k), "unknown setting");
    }
}

inline void read(double& dst, const json& v, const std::string& p) { dst = number(v, p); }
inline void read(int& dst, const json& v, const std::string& p) { dst = integer(v, p); }
inline void read(bool& dst, const json& v, const std::string& p) { dst = boolean(v, p); }

} // namespace detail

/// Pushes allowed by a wall-clock budget at a fixed time per push.
inline int pushes_for_minutes(double minutes, double seconds_per_push)
{
    if (!(minutes > 0.0) || !(seconds_per_push > 0.0))
        throw SceneError("budget", "minutes and seconds_per_push must be positive");
    return static_cast<int>(std::floor(minutes * 60.0 / seconds_per_push + 1e-9));
}

/// Scene defaults merged with `overrides`, applied on top of the
/// size-derived defaults. `seed` drives the planner and noise streams.
inline LoopSetup make_setup(const Scene& scene, const json& overrides, std::uint64_t seed)
{
    using namespace detail;
    const json cfg = merge_config(scene.defaults, overrides);
    const Arrangement arr = scene.arrangement();

    LoopSetup s;
    s.workspace = scene.workspace;
    s.task = scene.task;
    s.planner = PlannerConfig::defaults_for(scene.workspace, arr);

    std::optional<double> minutes;
    double seconds_per_push = 2.5;
    bool explicit_pushes = false;
    std::optional<SoftAStarParams> astar;

    each_field(cfg.is_null() ? json::object() : cfg, "", [&](const std::string& section, const json& body,
                                                            const std::string& sp) {
        if (section == "planner") {
            each_field(body, sp, [&](const std::string& k, const json& v, const std::string& p) {
                auto& c = s.planner;
                if (k == "s_max") read(c.s_max, v, p);
                else if (k == "d_max") read(c.d_max, v, p);
                else if (k == "p_astar") read(c.p_astar, v, p);
                else if (k == "epsilon") read(c.epsilon, v, p);
                else if (k == "l_min") read(c.l_min, v, p);
                else if (k == "l_max") read(c.l_max, v, p);
                else if (k == "sigma") read(c.sigma, v, p);
                else if (k == "stretch_k") read(c.stretch_k, v, p);
                else if (k == "mode1_fallback") read(c.mode1_fallback, v, p);
                else if (k == "max_expansion_attempts") read(c.max_expansion_attempts, v, p);
                else if (k == "fd_step") read(c.gradient.fd_step, v, p);
                else if (k == "fd_step_theta") read(c.gradient.fd_step_theta, v, p);
                else if (k == "astar_mode") {
                    if (v == "soft") c.astar_mode = CollisionMode::soft;
                    else if (v == "hard") c.astar_mode = CollisionMode::hard;
                    else throw SceneError(p, "expected \"soft\" or \"hard\"");
                } else if (k == "c_min" || k == "c_max" || k == "cell_size") {
                    if (!astar) astar = SoftAStarParams::defaults_for(arr, 0);
                    read(k == "c_min" ? astar->c_min : k == "c_max" ? astar->c_max : astar->cell_size, v, p);
                } else return false;
                return true;
            });
        } else if (section == "executor") {
            each_field(body, sp, [&](const std::string& k, const json& v, const std::string& p) {
                auto& e = s.executor;
                if (k == "k_align") read(e.push.k_align, v, p);
                else if (k == "contact_gap") read(e.push.contact_gap, v, p);
                else if (k == "d_push") read(e.push.d_push, v, p);
                else if (k == "min_push") read(e.push.min_push, v, p);
                else if (k == "eps_p_final") read(e.tolerances.eps_p_final, v, p);
                else if (k == "eps_p_intermediate") read(e.tolerances.eps_p_intermediate, v, p);
                else if (k == "eps_theta_final") read(e.tolerances.eps_theta_final, v, p);
                else if (k == "max_pushes_per_waypoint") read(e.tolerances.max_pushes_per_waypoint, v, p);
                else if (k == "guard_clearance") read(e.guard_clearance, v, p);
                else if (k == "guard_rounds") read(e.guard_rounds, v, p);
                else return false;
                return true;
            });
        } else if (section == "sim") {
            each_field(body, sp, [&](const std::string& k, const json& v, const std::string& p) {
                if (k == "step_length") read(s.sim.step_length, v, p);
                else if (k == "max_resolve_iters") read(s.sim.max_resolve_iters, v, p);
                else if (k == "penetration_tol") read(s.sim.penetration_tol, v, p);
                else if (k == "pusher_radius") read(s.sim.pusher_radius, v, p);
                else if (k == "k_rot") read(s.sim.k_rot, v, p);
                else return false;
                return true;
            });
        } else if (section == "noise") {
            each_field(body, sp, [&](const std::string& k, const json& v, const std::string& p) {
                if (k == "actuation_sigma") read(s.noise.actuation_sigma, v, p);
                else if (k == "sensing_sigma_pos") read(s.noise.sensing_sigma_pos, v, p);
                else if (k == "sensing_sigma_theta") read(s.noise.sensing_sigma_theta, v, p);
                else return false;
                return true;
            });
        } else if (section == "budget") {
            each_field(body, sp, [&](const std::string& k, const json& v, const std::string& p) {
                if (k == "max_pushes") {
                    read(s.budgets.max_pushes, v, p);
                    explicit_pushes = true;
                } else if (k == "minutes") minutes = number(v, p);
                else if (k == "seconds_per_push") read(seconds_per_push, v, p);
                else if (k == "max_plan_cycles") read(s.budgets.max_plan_cycles, v, p);
                else if (k == "max_wall_seconds") read(s.budgets.max_wall_seconds, v, p);
                else return false;
                return true;
            });
        } else return false;
        return true;
    });

    if (minutes && !explicit_pushes) s.budgets.max_pushes = pushes_for_minutes(*minutes, seconds_per_push);
    s.planner.astar = astar;
    s.planner.rng_seed = derive_seed(seed, 0);
    s.noise.rng_seed = derive_seed(seed, 1);
    try {
        s.planner.validate();
        s.sim.validate();
        s.executor.validate();
        s.noise.validate();
        s.budgets.validate();
    } catch (const std::invalid_argument& e) {
        throw SceneError("config", e.what());
    }
    return s;
}

} // namespace ocp
