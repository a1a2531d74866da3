// Command-line front end: run one trial, run a benchmark suite, render a
// trace, or export the builtin scenes.
//
// Exit codes: 0 success, 1 task failure, 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocp/bench.hpp"
#include "ocp/render.hpp"
#include "ocp/scene.hpp"
#include "ocp/trace.hpp"

namespace fs = std::filesystem;
using namespace ocp;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// defaults.json from $OCP_CONFIG_DIR, or an empty object.
json config_dir_defaults()
{
    const char* dir = std::getenv("OCP_CONFIG_DIR");
    if (!dir || !*dir) return json::object();
    const fs::path p = fs::path(dir) / "defaults.json";
    if (!fs::exists(p)) return json::object();
    std::ifstream in(p);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SceneError("", p.string() + ": expected a JSON object");
    return j;
}

Scene load_with_defaults(const std::string& name)
{
    Scene s = load_scene(name);
    s.defaults = merge_config(config_dir_defaults(), s.defaults);
    return s;
}

json parse_overrides(const std::vector<std::string>& sets)
{
    json ov = json::object();
    for (const auto& s : sets) apply_override(ov, s);
    return ov;
}

int cmd_run(const std::string& scene_name, std::uint64_t seed, const std::string& trace_path,
            const std::vector<std::string>& sets)
{
    const Scene scene = load_with_defaults(scene_name);
    const json ov = parse_overrides(sets);
    make_setup(scene, ov, seed); // report config errors before opening the trace

    std::ofstream trace;
    std::optional<TraceWriter> writer;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw std::runtime_error("cannot write " + trace_path);
        writer.emplace(trace, scene);
    }
    const TrialRecord r = run_trial(scene, ov, seed, writer ? &*writer : nullptr);
    json out = record_to_json(r);
    out["scene"] = scene.name;
    std::cout << out.dump() << '\n';
    return r.success ? 0 : kExitFailure;
}

int cmd_bench(const std::string& suite_dir, int trials, int jobs, const std::string& out_path, std::uint64_t seed,
              const std::vector<std::string>& sets)
{
    std::vector<fs::path> files;
    if (!fs::is_directory(suite_dir)) throw SceneError("", "suite directory not found: " + suite_dir);
    for (const auto& e : fs::directory_iterator(suite_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw SceneError("", "no .json scenes in " + suite_dir);

    std::vector<SuiteEntry> entries;
    for (const auto& f : files) {
        Scene s = load_with_defaults(f.string());
        std::string name = s.name.empty() ? f.stem().string() : s.name;
        entries.push_back({std::move(name), std::move(s)});
    }
    const json ov = parse_overrides(sets);
    for (const auto& e : entries) make_setup(e.scene, ov, seed);

    const auto suite = run_suite(entries, trials, jobs, ov, seed);
    std::cout << format_table(suite);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << suite_to_json(suite).dump(2) << '\n';
    }
    return 0;
}

int cmd_render(const std::string& trace_path, const std::string& out_dir, int stride)
{
    const RenderResult r = render_trace(trace_path, out_dir, stride, std::cerr);
    std::cout << "wrote " << r.frames << " frame(s) for " << r.pushes << " push(es) to " << out_dir << '\n';
    return 0;
}

int cmd_export(const std::string& out_dir)
{
    fs::create_directories(out_dir);
    for (const auto& name : builtin_scene_names()) {
        const fs::path p = fs::path(out_dir) / (name + ".json");
        save_scene_file(builtin_scene(name), p);
        std::cout << p.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Object-centric planar pushing rearrangement"};
    app.require_subcommand(1);

    std::string scene, trace, suite, out, trace_in, render_out, export_out;
    std::uint64_t seed = 0, bench_seed = 0;
    int trials = 10, jobs = 1, stride = 1;
    std::vector<std::string> sets, bench_sets;

    auto* run = app.add_subcommand("run", "Run one trial on a scene");
    run->add_option("--scene", scene, "Scene file or builtin name (" + [] {
        std::string s;
        for (const auto& n : builtin_scene_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }() + ")")->required();
    run->add_option("--seed", seed, "Trial seed");
    run->add_option("--trace", trace, "Write a JSON-lines event trace");
    run->add_option("--set", sets, "Override a setting, e.g. planner.s_max=100");

    auto* bench = app.add_subcommand("bench", "Run every scene in a directory");
    bench->add_option("--suite", suite, "Directory of scene files")->required();
    bench->add_option("--trials", trials, "Trials per scene")->check(CLI::PositiveNumber);
    bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--out", out, "Write aggregates and records as JSON");
    bench->add_option("--seed", bench_seed, "Master seed");
    bench->add_option("--set", bench_sets, "Override a setting for every scene");

    auto* render = app.add_subcommand("render", "Draw SVG frames from a trace");
    render->add_option("--trace", trace_in, "Trace file")->required();
    render->add_option("--out", render_out, "Output directory")->required();
    render->add_option("--stride", stride, "Pushes between frames")->check(CLI::PositiveNumber);

    auto* exp = app.add_subcommand("export", "Write the builtin scenes as JSON files");
    exp->add_option("--out", export_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) return cmd_run(scene, seed, trace, sets);
        if (*bench) return cmd_bench(suite, trials, jobs, out, bench_seed, bench_sets);
        if (*render) return cmd_render(trace_in, render_out, stride);
        if (*exp) return cmd_export(export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
