// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and printed with each result.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ocp/bench.hpp"
#include "ocp/planner.hpp"
#include "ocp/scene.hpp"
#include "ocp/sim.hpp"
#include "ocp/soft_astar.hpp"
#include "ocp/tasks.hpp"

using namespace ocp;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;
int g_run = 0;
std::vector<int> g_only; // empty runs every criterion

void report(int id, const std::string& name, const std::function<Outcome()>& check)
{
    if (!g_only.empty() && std::find(g_only.begin(), g_only.end(), id) == g_only.end()) return;
    ++g_run;
    const auto t0 = clock_type::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++g_failures;
    std::printf("%s  [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Arrangement cubes(const std::vector<Pose2>& poses, std::vector<int> classes = {}, double side = 0.0254)
{
    if (classes.empty()) classes.assign(poses.size(), 1);
    return Arrangement(poses, std::vector<Shape>(poses.size(), Shape::box(side, side)), classes);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q)
{
    double tv = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
    return 0.5 * tv;
}

// --- 1 ---------------------------------------------------------------------

std::vector<double> dijkstra(const GridMap& g, Cell start)
{
    const std::size_t n = g.values.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<bool> done(n, false);
    dist[g.index(start)] = 0.0;
    for (;;) {
        std::size_t best = n;
        for (std::size_t k = 0; k < n; ++k)
            if (!done[k] && std::isfinite(dist[k]) && (best == n || dist[k] < dist[best])) best = k;
        if (best == n) return dist;
        done[best] = true;
        const int r = static_cast<int>(best) / g.width, c = static_cast<int>(best) % g.width;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) {
                const Cell nb{r + a, c + b};
                if ((a == 0 && b == 0) || !g.in_bounds(nb) || g.value(nb) >= 1.0) continue;
                const double step = g.cell_size * std::hypot(a, b) + g.cell_size * g.value(nb);
                dist[g.index(nb)] = std::min(dist[g.index(nb)], dist[best] + step);
            }
    }
}

Outcome soft_astar_optimality()
{
    Rng rng(101);
    const auto t0 = clock_type::now();
    double worst = 0.0;
    int mismatches = 0, reachable = 0;
    for (int t = 0; t < 200; ++t) {
        const int w = 1 + static_cast<int>(rng.index(30)), h = 1 + static_cast<int>(rng.index(30));
        GridMap g(w, h, 0.03, {0, 0});
        for (double& v : g.values) v = 0.25 * static_cast<double>(rng.index(5));
        const Cell s{static_cast<int>(rng.index(h)), static_cast<int>(rng.index(w))};
        const Cell e{static_cast<int>(rng.index(h)), static_cast<int>(rng.index(w))};
        const double oracle = dijkstra(g, s)[g.index(e)];
        const auto path = soft_astar(g, s, e);
        const bool goal_blocked = g.value(e) >= 1.0;
        if (!std::isfinite(oracle) || goal_blocked) {
            mismatches += path.has_value();
            continue;
        }
        ++reachable;
        if (!path) {
            ++mismatches;
            continue;
        }
        worst = std::max(worst, std::abs(path->total_cost - oracle));
    }
    const double elapsed = seconds_since(t0);
    return {mismatches == 0 && worst <= 1e-9 && elapsed < 10.0,
            fmt("200 grids (%d reachable), max |cost - Dijkstra| = %.2e (tol 1e-9), %d reachability mismatches, "
                "%.2f s (limit 10 s)",
                reachable, worst, mismatches, elapsed)};
}

// --- 2 ---------------------------------------------------------------------

Outcome sampling_fidelity()
{
    const int draws = 100000;
    double worst_node = 0.0, worst_act = 0.0;
    Rng build(202);
    const Arrangement dummy = cubes({Pose2()});
    for (int t = 0; t < 5; ++t) {
        const int d_max = 2 + t % 3;
        PlanTree tree;
        tree.add_root(dummy, 0.0);
        for (int k = 0; k < 6 + 3 * t; ++k) {
            const std::size_t parent = build.index(tree.size());
            if (tree.node(parent).depth < d_max) tree.add_child(parent, dummy, PlanStep{0, {Pose2()}}, 0.0);
        }
        std::vector<double> p(tree.size());
        for (std::size_t k = 0; k < tree.size(); ++k) {
            int children = 0;
            for (const auto& n : tree.nodes()) children += n.parent == k;
            p[k] = tree.node(k).depth < d_max ? 1.0 / (children + 1) : 0.0;
        }
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        for (double& v : p) v /= total;
        Rng rng(300 + t);
        std::vector<double> freq(tree.size(), 0.0);
        for (int k = 0; k < draws; ++k) freq[*sample_node(tree, d_max, rng)] += 1.0 / draws;
        worst_node = std::max(worst_node, total_variation(freq, p));

        const int n = 3 + t;
        std::vector<Pose2> poses;
        std::vector<PoseGradient> grad;
        for (int k = 0; k < n; ++k) {
            poses.emplace_back(build.uniform(-0.1, 0.1), build.uniform(-0.1, 0.1), 0.0);
            grad.push_back({build.uniform(-2, 2), build.uniform(-2, 2), build.uniform(-0.05, 0.05)});
        }
        const Arrangement arr = cubes(poses);
        PlannerConfig cfg;
        cfg.sigma = 0.04;
        cfg.stretch_k = 2.0;
        std::vector<double> q(n);
        const double r = arr.shape(0).circumradius();
        for (int i = 0; i < n; ++i) {
            auto f = [&](int j) {
                const double th = grad[j].theta / r;
                return grad[j].x * grad[j].x + grad[j].y * grad[j].y + th * th;
            };
            q[i] = f(i);
            for (int j = 0; j < n; ++j)
                if (j != i)
                    q[i] += f(j) * std::exp(-(poses[i].position() - poses[j].position()).squared_norm() /
                                            (2 * cfg.sigma * cfg.sigma));
        }
        const double qt = std::accumulate(q.begin(), q.end(), 0.0);
        for (double& v : q) v /= qt;
        TreeNode node;
        node.arrangement = arr;
        node.gradient = grad;
        std::vector<double> afreq(n, 0.0);
        for (int k = 0; k < draws; ++k) afreq[activate_object(node, TaskSpec{}, cfg, rng)] += 1.0 / draws;
        worst_act = std::max(worst_act, total_variation(afreq, q));
    }
    return {worst_node <= 0.01 && worst_act <= 0.01,
            fmt("5 trees: max TV %.4f; 5 arrangements: max TV %.4f (tol 0.01, 1e5 draws each)", worst_node,
                worst_act)};
}

// --- 3 ---------------------------------------------------------------------

Outcome gradient_check()
{
    Rng rng(303);
    double worst_region = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(rng.index(6));
        std::vector<Pose2> poses;
        GoalRegions g;
        for (int k = 0; k < n; ++k) {
            poses.emplace_back(rng.uniform(-0.12, 0.12), rng.uniform(-0.12, 0.12), rng.uniform(-kPi, kPi));
            g.regions.push_back({{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)}, rng.uniform(0.01, 0.05)});
        }
        const Arrangement arr = cubes(poses);
        const auto grad = heuristic_gradient(TaskSpec{g}, arr);
        for (int k = 0; k < n; ++k) {
            const Vec2 e = arr.position(k) - g.regions[k].center;
            const double r = g.regions[k].radius;
            if (std::abs(e.norm() - r) < 2e-3) continue; // stencil straddles the region boundary
            const Vec2 an = e.norm() > r ? e * (2.0 / (r * r)) : Vec2{};
            for (auto [fd, a] : {std::pair{grad[k].x, an.x}, std::pair{grad[k].y, an.y}}) {
                const double rel = std::abs(fd - a) / std::max(std::abs(a), 1.0);
                worst_region = std::max(worst_region, rel);
            }
            worst_region = std::max(worst_region, std::abs(grad[k].theta));
        }
    }

    // second-order consistency: the gap between the step-d estimate and its
    // Richardson extrapolant must be small and shrink ~4x per halving
    double worst_sort = 0.0, worst_coarse = 0.0;
    const Workspace ws{{-0.15, -0.15}, {0.15, 0.15}, 0.02};
    const double step = 1.25e-4;
    auto gap = [](const std::vector<PoseGradient>& g1, const std::vector<PoseGradient>& g2) {
        double scale = 0.0, worst = 0.0;
        for (const auto& c : g1) scale = std::max({scale, std::abs(c.x), std::abs(c.y)});
        for (std::size_t k = 0; k < g1.size(); ++k) {
            const double rx = (4 * g2[k].x - g1[k].x) / 3, ry = (4 * g2[k].y - g1[k].y) / 3;
            worst = std::max({worst, std::abs(g1[k].x - rx) / scale, std::abs(g1[k].y - ry) / scale});
        }
        return worst;
    };
    for (int t = 0; t < 100; ++t) {
        const int n = 4 + static_cast<int>(rng.index(8)), L = 2 + static_cast<int>(rng.index(3));
        std::vector<Pose2> poses;
        std::vector<int> cls;
        for (int k = 0; k < n; ++k) {
            poses.emplace_back(rng.uniform(-0.12, 0.12), rng.uniform(-0.12, 0.12), 0.0);
            cls.push_back(k % L + 1);
        }
        const Arrangement arr = cubes(poses, cls);
        const TaskSpec spec{SortNoGoals::with_defaults(L, ws)};
        const auto g2d = heuristic_gradient(spec, arr, {2 * step, 0.02 * step / 1e-3});
        const auto gd = heuristic_gradient(spec, arr, {step, 0.01 * step / 1e-3});
        const auto gh = heuristic_gradient(spec, arr, {step / 2, 0.005 * step / 1e-3});
        worst_sort = std::max(worst_sort, gap(gd, gh));
        worst_coarse = std::max(worst_coarse, gap(g2d, gd));
    }
    const double order = std::log2(worst_coarse / worst_sort);
    return {worst_region <= 1e-4 && worst_sort <= 1e-5 && order > 1.8 && order < 2.2,
            fmt("goal-region max rel err %.2e (tol 1e-4, 100 states); sorting Richardson max rel gap %.2e "
                "(tol 1e-5, 100 states, step %.3g mm), observed order %.2f (need 1.8..2.2)",
                worst_region, worst_sort, step * 1e3, order)};
}

// --- 4 ---------------------------------------------------------------------

Outcome assignment_optimality()
{
    Rng rng(404);
    int wrong = 0;
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng.index(7);
        std::vector<Pose2> poses;
        std::vector<GoalRegion> regions;
        for (std::size_t k = 0; k < n; ++k) {
            poses.emplace_back(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), 0.0);
            regions.push_back({{rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)}, 0.02});
        }
        const Arrangement arr = cubes(poses);
        std::vector<std::size_t> objs(n);
        std::iota(objs.begin(), objs.end(), 0);
        const auto a = assign_goals(objs, regions, arr);
        auto cost = [&](const std::vector<std::size_t>& perm) {
            double c = 0.0;
            for (std::size_t k = 0; k < n; ++k) c += distance(arr.position(k), regions[perm[k]].center);
            return c;
        };
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do best = std::min(best, cost(perm));
        while (std::next_permutation(perm.begin(), perm.end()));
        const double gap = cost(a) - best;
        worst = std::max(worst, gap);
        wrong += gap > 1e-12;
    }
    return {wrong == 0, fmt("500 instances, |D| <= 7: %d suboptimal, max excess %.1e m (summation rounding 1e-12)",
                            wrong, worst)};
}

// --- 5 ---------------------------------------------------------------------

Outcome physics_invariants()
{
    Rng rng(505);
    const Workspace wide{{-1, -1}, {1, 1}, 0.0};
    const SimParams sim;
    double worst_pen = 0.0;
    int moved_unreachable = 0, nondeterministic = 0, untouched = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 4 + rng.index(9);
        std::vector<Pose2> poses;
        while (poses.size() < n) {
            const Pose2 c(rng.uniform(-0.14, 0.14), rng.uniform(-0.14, 0.14), rng.uniform(-kPi, kPi));
            bool ok = true;
            for (const auto& q : poses) ok = ok && distance(q.position(), c.position()) > 0.037;
            if (ok) poses.push_back(c);
        }
        const Arrangement arr = cubes(poses);
        const std::size_t i = rng.index(n);
        Trajectory traj;
        Vec2 p = arr.position(i);
        const int waypoints = 1 + static_cast<int>(rng.index(3));
        double len = 0.0;
        for (int w = 0; w < waypoints; ++w) {
            const double l = rng.uniform(0.01, 0.06);
            const Vec2 q = p + unit_vector(rng.uniform(-kPi, kPi)) * l;
            len += l;
            traj.emplace_back(q, rng.uniform(-kPi, kPi));
            p = q;
        }
        const auto a = simulate_trajectory(arr, i, traj, wide, sim);
        const auto b = simulate_trajectory(arr, i, traj, wide, sim);
        nondeterministic += !a.arrangement.same_poses(b.arrangement);
        worst_pen = std::max(worst_pen, max_penetration(a.arrangement));

        // conservative reach set: bodies near the swept path, grown through
        // neighbors that a displaced body could touch
        std::vector<Vec2> path{arr.position(i)};
        for (const auto& w : traj) path.push_back(w.position());
        std::vector<bool> reach(n, false);
        reach[i] = true;
        const double slack = 1.5 * len;
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[j]) continue;
                const double rj = arr.shape(j).circumradius();
                bool hit = false;
                for (std::size_t s = 0; s + 1 < path.size() && !hit; ++s)
                    hit = point_segment_distance(arr.position(j), path[s], path[s + 1]) <=
                          rj + arr.shape(i).circumradius();
                for (std::size_t k = 0; k < n && !hit; ++k)
                    hit = reach[k] && k != i &&
                          distance(arr.position(j), arr.position(k)) <= rj + arr.shape(k).circumradius() + slack;
                if (hit) reach[j] = grew = true;
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!reach[j]) {
                ++untouched;
                moved_unreachable += !(a.arrangement.pose(j) == arr.pose(j));
            }
    }
    return {worst_pen <= 1e-4 && moved_unreachable == 0 && nondeterministic == 0 && untouched > 0,
            fmt("1000 calls: max residual penetration %.2e m (tol 1e-4); %d of %d out-of-reach bodies moved; "
                "%d nondeterministic reruns",
                worst_pen, moved_unreachable, untouched, nondeterministic)};
}

// --- 6 ---------------------------------------------------------------------

Outcome end_to_end()
{
    const auto t0 = clock_type::now();
    const Scene scene = builtin_scene("scene1-goals");
    json base = json::object();
    apply_override(base, "budget.max_pushes=500");
    apply_override(base, "planner.s_max=50");
    apply_override(base, "planner.p_astar=0.5");
    json noisy = base;
    apply_override(noisy, "noise.actuation_sigma=0.1");
    apply_override(noisy, "noise.sensing_sigma_pos=0.002");
    const auto clean = run_suite({{"clean", scene}}, 50, jobs(), base, 6);
    const auto dirty = run_suite({{"noisy", scene}}, 50, jobs(), noisy, 6);
    const double c = clean[0].success_rate(), d = dirty[0].success_rate();
    const double elapsed = seconds_since(t0);
    return {c >= 0.9 && c - d <= 0.15 && elapsed < 600.0,
            fmt("2 classes x 3 cubes, 50 seeds, 500-push budget: success %.0f%% zero-noise (need >= 90%%), "
                "%.0f%% noisy (drop %.0f points, limit 15); %.1f s (limit 600 s)",
                100 * c, 100 * d, 100 * (c - d), elapsed)};
}

// --- 7 / 8 -------------------------------------------------------------------

struct ConfigStats {
    double actions = 0, actions_half_ci = 0, ptpa = 0, ptpa_half_ci = 0, success = 0;
};

ConfigStats run_config(const Scene& scene, json overrides, int trials, std::uint64_t seed)
{
    const auto a = run_suite({{scene.name, scene}}, trials, jobs(), overrides, seed)[0];
    ConfigStats s;
    const auto& act = a.metric("num_actions");
    const auto& pt = a.metric("planning_time_per_action_s");
    s.actions = act.mean;
    s.actions_half_ci = act.n > 1 ? 1.96 * act.std / std::sqrt(act.n) : 0.0;
    s.ptpa = pt.mean;
    s.ptpa_half_ci = pt.n > 1 ? 1.96 * pt.std / std::sqrt(pt.n) : 0.0;
    s.success = a.success_rate();
    return s;
}

/// Monotone on means, allowing one adjacent violation whose 95% intervals overlap.
bool monotone(const std::vector<double>& mean, const std::vector<double>& half_ci, bool increasing, bool strict)
{
    int violations = 0;
    bool excusable = true;
    for (std::size_t k = 0; k + 1 < mean.size(); ++k) {
        const double d = increasing ? mean[k + 1] - mean[k] : mean[k] - mean[k + 1];
        if (strict ? d > 0 : d >= 0) continue;
        ++violations;
        excusable = excusable && std::abs(mean[k + 1] - mean[k]) <= half_ci[k] + half_ci[k + 1];
    }
    return violations == 0 || (violations == 1 && excusable);
}

std::string list(const std::vector<double>& v, const char* f)
{
    std::string out;
    for (double x : v) out += (out.empty() ? "" : ", ") + fmt(f, x);
    return out;
}

Outcome parameter_trends()
{
    const Scene scene = builtin_scene("sorting-sim");
    json base = json::object();
    apply_override(base, "budget.max_pushes=8000");
    apply_override(base, "budget.max_plan_cycles=2000");
    const int trials = 30;
    std::vector<double> a, aci, p, pci;
    for (int s_max : {20, 50, 100, 200}) {
        json o = base;
        apply_override(o, "planner.s_max=" + std::to_string(s_max));
        const auto st = run_config(scene, o, trials, 7);
        a.push_back(st.actions);
        aci.push_back(st.actions_half_ci);
        p.push_back(st.ptpa);
        pci.push_back(st.ptpa_half_ci);
    }
    std::vector<double> pa, paci;
    for (const char* pa_str : {"0", "0.5", "1.0"}) {
        json o = base;
        apply_override(o, std::string("planner.p_astar=") + pa_str);
        const auto st = run_config(scene, o, trials, 7);
        pa.push_back(st.actions);
        paci.push_back(st.actions_half_ci);
    }
    const bool ok1 = monotone(a, aci, false, false);
    const bool ok2 = monotone(p, pci, true, true);
    const bool ok3 = monotone(pa, paci, false, false);
    return {ok1 && ok2 && ok3,
            fmt("sorting-sim, 30 trials each. S_max 20/50/100/200: mean actions [%s] %s, planning s/action [%s] %s; "
                "p_astar 0/0.5/1: mean actions [%s] %s",
                list(a, "%.1f").c_str(), ok1 ? "non-increasing" : "NOT non-increasing", list(p, "%.4f").c_str(),
                ok2 ? "increasing" : "NOT increasing", list(pa, "%.1f").c_str(),
                ok3 ? "non-increasing" : "NOT non-increasing")};
}

Outcome ablation()
{
    const Scene scene = builtin_scene("scene3");
    json base = json::object();
    apply_override(base, "budget.max_pushes=4000");
    apply_override(base, "budget.max_plan_cycles=400");
    const int trials = 30;
    const auto full = run_config(scene, base, trials, 8);
    json m2 = base;
    apply_override(m2, "planner.p_astar=1");
    apply_override(m2, "planner.mode1_fallback=false");
    const auto only2 = run_config(scene, m2, trials, 8);
    json hard = base;
    apply_override(hard, "planner.astar_mode=hard");
    const auto hard_st = run_config(scene, hard, trials, 8);
    const bool ok1 = only2.success < full.success;
    const bool ok2 = hard_st.actions >= full.actions;
    return {ok1 && ok2,
            fmt("scene3 (packing %.3f), 30 seeds: success full %.0f%% vs Mode-II-only %.0f%% (need strictly lower); "
                "mean actions full %.1f vs hard A* %.1f (need >=)",
                packing_factor(scene), 100 * full.success, 100 * only2.success, full.actions, hard_st.actions)};
}

// --- 9 ---------------------------------------------------------------------

Outcome benchmark_protocol()
{
    const std::vector<std::pair<std::string, double>> paper{
        {"scene1", 0.10}, {"scene2", 0.13}, {"scene3", 0.20}, {"scene4", 0.095}, {"scene5", 0.15}};
    std::vector<SuiteEntry> entries;
    std::string pf_text;
    bool pf_ok = true;
    for (const auto& [name, pf] : paper) {
        const Scene s = load_scene(name);
        const double got = packing_factor(s);
        pf_ok = pf_ok && std::abs(got - pf) <= 0.01;
        pf_text += fmt("%s%s %.3f/%.3f", pf_text.empty() ? "" : ", ", name.c_str(), got, pf);
        entries.push_back({name, s});
    }
    const auto suite = run_suite(entries, 1, jobs(), json::object(), 9);
    bool metrics_ok = true;
    std::string runs;
    for (const auto& a : suite) {
        const json j = record_to_json(a.records[0]);
        for (const auto& m : {"num_actions", "execution_steps", "planning_time_s", "planning_time_per_action_s",
                              "wall_time_s", "success"})
            metrics_ok = metrics_ok && j.contains(m);
        for (const auto& m : metric_names()) metrics_ok = metrics_ok && std::isfinite(metric_value(a.records[0], m));
        runs += fmt("%s%s %s in %d pushes", runs.empty() ? "" : "; ", a.scene.c_str(),
                    a.records[0].success ? "solved" : "unsolved", a.records[0].execution_steps);
    }
    return {pf_ok && metrics_ok,
            fmt("packing measured/paper: %s (tol 0.01); all metrics emitted: %s; default budgets: %s", pf_text.c_str(),
                metrics_ok ? "yes" : "no", runs.c_str())};
}

} // namespace

/// Optional arguments select criteria by number, e.g. `acceptance 1 3`.
int main(int argc, char** argv)
{
    for (int k = 1; k < argc; ++k) g_only.push_back(std::atoi(argv[k]));
    report(1, "Soft-A* optimality", soft_astar_optimality);
    report(2, "Sampling fidelity", sampling_fidelity);
    report(3, "Gradient check", gradient_check);
    report(4, "Assignment optimality", assignment_optimality);
    report(5, "Physics invariants", physics_invariants);
    report(6, "End-to-end desk-scale success", end_to_end);
    report(7, "Parameter trend reproduction", parameter_trends);
    report(8, "Ablation reproduction", ablation);
    report(9, "Benchmark protocol", benchmark_protocol);
    std::printf("%d of %d criteria failed\n", g_failures, g_run);
    return g_failures == 0 ? 0 : 1;
}
