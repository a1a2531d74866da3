#pragma once

// Trial orchestration and metric aggregation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ocp/executor.hpp"
#include "ocp/scene.hpp"

namespace ocp {

struct TrialRecord {
    std::uint64_t seed = 0;
    bool success = false;
    int execution_steps = 0;
    int num_actions = 0;
    double planning_time_s = 0.0;
    double planning_time_per_action_s = 0.0;
    double wall_time_s = 0.0;
    std::string termination;

    /// Equality on everything that does not depend on the machine's speed.
    bool same_outcome(const TrialRecord& o) const
    {
        return seed == o.seed && success == o.success && execution_steps == o.execution_steps &&
               num_actions == o.num_actions && termination == o.termination;
    }
};

inline json record_to_json(const TrialRecord& r)
{
    return {{"seed", r.seed},
            {"success", r.success},
            {"execution_steps", r.execution_steps},
            {"num_actions", r.num_actions},
            {"planning_time_s", r.planning_time_s},
            {"planning_time_per_action_s", r.planning_time_per_action_s},
            {"wall_time_s", r.wall_time_s},
            {"termination", r.termination}};
}

inline TrialRecord run_trial(const Scene& scene, const json& overrides, std::uint64_t seed,
                             LoopObserver* observer = nullptr)
{
    const LoopSetup setup = make_setup(scene, overrides, seed);
    const LoopResult r = rearrange_loop(scene.arrangement(), setup, observer);
    TrialRecord t;
    t.seed = seed;
    t.success = r.success;
    t.execution_steps = r.execution_steps;
    t.num_actions = r.num_actions;
    t.planning_time_s = r.planning_time_s;
    t.planning_time_per_action_s = r.planning_time_per_action_s();
    t.wall_time_s = r.wall_time_s;
    t.termination = r.termination;
    return t;
}

struct Stat {
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation; 0 for a single value
    int n = 0;
};

inline Stat summarize(const std::vector<double>& v)
{
    Stat s;
    s.n = static_cast<int>(v.size());
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

/// Metric names in report order.
inline const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names{"execution_steps", "num_actions", "planning_time_s",
                                                "planning_time_per_action_s", "wall_time_s"};
    return names;
}

inline double metric_value(const TrialRecord& r, const std::string& name)
{
    if (name == "execution_steps") return r.execution_steps;
    if (name == "num_actions") return r.num_actions;
    if (name == "planning_time_s") return r.planning_time_s;
    if (name == "planning_time_per_action_s") return r.planning_time_per_action_s;
    if (name == "wall_time_s") return r.wall_time_s;
    throw std::invalid_argument("unknown metric " + name);
}

/// Per-scene aggregate. Metric statistics cover successful trials only.
struct SceneAggregate {
    std::string scene;
    int trials = 0;
    int successes = 0;
    std::vector<std::pair<std::string, Stat>> metrics;
    std::vector<TrialRecord> records; ///< in seed order

    double success_rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }

    const Stat& metric(const std::string& name) const
    {
        for (const auto& [k, s] : metrics)
            if (k == name) return s;
        throw std::invalid_argument("unknown metric " + name);
    }
};

inline SceneAggregate aggregate(std::string scene, std::vector<TrialRecord> records)
{
    SceneAggregate a;
    a.scene = std::move(scene);
    a.trials = static_cast<int>(records.size());
    std::sort(records.begin(), records.end(), [](const auto& x, const auto& y) { return x.seed < y.seed; });
    for (const auto& r : records) a.successes += r.success;
    for (const auto& name : metric_names()) {
        std::vector<double> v;
        for (const auto& r : records)
            if (r.success) v.push_back(metric_value(r, name));
        a.metrics.emplace_back(name, summarize(v));
    }
    a.records = std::move(records);
    return a;
}

struct SuiteEntry {
    std::string name;
    Scene scene;
};

/// Seed of trial `k`, shared across scenes so paired comparisons line up.
inline std::uint64_t trial_seed(std::uint64_t master, int k) { return derive_seed(master, static_cast<std::uint64_t>(k)); }

/// Runs `trials` trials per scene on `jobs` worker threads. Results do not
/// depend on the number of workers or the completion order.
inline std::vector<SceneAggregate> run_suite(const std::vector<SuiteEntry>& scenes, int trials, int jobs,
                                             const json& overrides = json::object(), std::uint64_t master_seed = 0)
{
    if (trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
    jobs = std::max(1, jobs);
    const std::size_t total = scenes.size() * static_cast<std::size_t>(trials);
    std::vector<TrialRecord> out(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                const auto& e = scenes[k / trials];
                out[k] = run_trial(e.scene, overrides, trial_seed(master_seed, static_cast<int>(k % trials)));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::vector<SceneAggregate> result;
    for (std::size_t s = 0; s < scenes.size(); ++s)
        result.push_back(aggregate(scenes[s].name, std::vector<TrialRecord>(out.begin() + s * trials,
                                                                            out.begin() + (s + 1) * trials)));
    return result;
}

inline json suite_to_json(const std::vector<SceneAggregate>& suite)
{
    json j = json::array();
    for (const auto& a : suite) {
        json metrics = json::object();
        for (const auto& [name, s] : a.metrics) metrics[name] = {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
        json records = json::array();
        for (const auto& r : a.records) records.push_back(record_to_json(r));
        j.push_back({{"scene", a.scene},
                     {"trials", a.trials},
                     {"successes", a.successes},
                     {"success_rate", a.success_rate()},
                     {"metrics", std::move(metrics)},
                     {"records", std::move(records)}});
    }
    return j;
}

/// Aligned text table, one row per scene, "mean ± std" per metric.
inline std::string format_table(const std::vector<SceneAggregate>& suite)
{
    std::vector<std::string> header{"scene", "success"};
    for (const auto& m : metric_names()) header.push_back(m);
    std::vector<std::vector<std::string>> rows{header};
    auto fmt = [](const Stat& s, int prec) {
        if (s.n == 0) return std::string("-");
        std::ostringstream o;
        o << std::fixed << std::setprecision(prec) << s.mean << " ± " << s.std;
        return o.str();
    };
    for (const auto& a : suite) {
        std::vector<std::string> row{a.scene, std::to_string(a.successes) + "/" + std::to_string(a.trials)};
        for (const auto& [name, s] : a.metrics) row.push_back(fmt(s, name.find("time") != std::string::npos ? 3 : 1));
        rows.push_back(std::move(row));
    }
    // "±" is two bytes but one column wide
    auto width = [](const std::string& s) {
        std::size_t w = 0;
        for (unsigned char c : s) w += (c & 0xC0) != 0x80;
        return w;
    };
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], width(r[c]));
    std::ostringstream out;
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out << r[c];
            if (c + 1 < r.size()) out << std::string(widths[c] - width(r[c]) + 2, ' ');
        }
        out << '\n';
    }
    return out.str();
}

} // namespace ocp
