#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "iopea/baselines.hpp"
#include "iopea/config.hpp"
#include "iopea/core.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

struct GainEstimate {
    double mean = 0;
    double se = 0;
};

struct GridOptimum {
    PolicyParam theta;
    double gain = 0;
    double se = 0;
};

struct ResultRow {
    int replicate = 0;
    int epoch = 0;
    std::int64_t timestep = 0;
    double cum_true_cost = 0;
    double cum_regret = 0;
    std::size_t active_set_size = 0;
    std::string policy_coords;
    double gain_estimate = 0;   // average true cost since the previous row
};

inline constexpr const char* kCsvHeader =
    "replicate,epoch,timestep,cum_true_cost,cum_regret,active_set_size,policy_coords,gain_estimate";

std::string format_row(const ResultRow& r);
std::string format_double(double x);

// Least-squares slope of log regret against log t over the second half of
// the horizon. Rows with nonpositive regret are skipped.
double regret_slope(std::span<const ResultRow> rows);

std::vector<std::uint64_t> oracle_seeds(std::uint64_t base, int count);

// Mean true cost per step of theta from s_1. Each seed gets its own stream,
// shared by every policy evaluated with that seed (common random numbers).
template <Environment Env>
GainEstimate oracle_gain(const Env& env, const PolicyParam& theta, std::int64_t eval_horizon,
                         std::span<const std::uint64_t> seeds) {
    if (eval_horizon < 1) throw Error("bad-horizon", "eval_horizon must be positive");
    std::vector<double> per_seed;
    for (auto seed : seeds) {
        RandomStream rng(StreamKey{seed, 0, kOracleEpoch, 0});
        auto s = env.initial_state();
        double sum = 0;
        for (std::int64_t t = 0; t < eval_horizon; ++t) {
            auto tr = env.step(s, env.policy_action(theta, s), env.draw_exogenous(rng));
            sum += tr.reported_cost;
            s = tr.state_after;
        }
        per_seed.push_back(sum / static_cast<double>(eval_horizon));
    }
    GainEstimate g;
    const double n = static_cast<double>(per_seed.size());
    for (double x : per_seed) g.mean += x / n;
    if (per_seed.size() > 1) {
        double ss = 0;
        for (double x : per_seed) ss += (x - g.mean) * (x - g.mean);
        g.se = std::sqrt(ss / (n - 1) / n);
    }
    return g;
}

inline unsigned worker_count(int requested, std::size_t jobs) {
    unsigned n = requested > 0 ? static_cast<unsigned>(requested) : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, n) on a small pool; results must be written to
// per-index slots by the caller.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const unsigned workers = worker_count(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n && !failed;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

template <Environment Env>
std::vector<GainEstimate> oracle_gains(const Env& env, const std::vector<PolicyParam>& grid, std::int64_t eval_horizon,
                                       std::span<const std::uint64_t> seeds, int threads = 0) {
    std::vector<GainEstimate> out(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = oracle_gain(env, grid[i], eval_horizon, seeds); });
    return out;
}

template <Environment Env>
GridOptimum grid_optimum(const Env& env, std::vector<PolicyParam> grid, std::int64_t eval_horizon,
                         std::span<const std::uint64_t> seeds, int threads = 0) {
    if (grid.empty()) throw Error("empty-active-set", "policy grid is empty");
    std::sort(grid.begin(), grid.end());
    const auto gains = oracle_gains(env, grid, eval_horizon, seeds, threads);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (gains[i].mean < gains[best].mean) best = i;
    return {grid[best], gains[best].mean, gains[best].se};
}

// Fills span / alpha / t_h from the environment.
template <Environment Env>
IopeaConfig resolve_iopea_config(const Env& env, IopeaConfig cfg) {
    const auto info = env.info();
    cfg.span = info.span;
    cfg.alpha = info.alpha;
    cfg.t_h = info.t_h;
    return cfg;
}

template <Environment Env>
InformationOrder<Env> make_information_order(const Env& env, std::vector<PolicyParam> grid, RadiusRule rule) {
    if constexpr (requires { env.information_order(std::move(grid), rule); })
        return env.information_order(std::move(grid), rule);
    else
        return env.information_order(std::move(grid));
}

struct ReplicateOutput {
    int replicate = 0;
    std::vector<ResultRow> rows;
    RegretLedger ledger;
    PolicyParam final_policy;
    double trailing_gain = 0;     // training average over the last 10% of steps
    int epochs = 0;
    bool degenerate = false;
    std::vector<EpochState> history;  // IOPEA only
};

// Builds downsampled rows from step events.
class RowRecorder {
public:
    RowRecorder(int replicate, std::int64_t horizon, double g_star, double factor)
        : replicate_(replicate), horizon_(horizon), g_star_(g_star), factor_(factor) {}

    void operator()(const StepEvent& e);

    std::vector<ResultRow> rows;
    double tail_cost = 0;   // cost accumulated over the trailing window

private:
    int replicate_;
    std::int64_t horizon_;
    double g_star_;
    double factor_;
    double cum_ = 0;
    double last_cum_ = 0;
    std::int64_t last_t_ = 0;
    double next_emit_ = 1;
};

template <Environment Env>
ReplicateOutput run_replicate(const Env& env, const ExperimentConfig& cfg, int replicate, double g_star,
                              const InformationOrder<Env>* io, std::optional<std::size_t> known_width,
                              const std::vector<PolicyParam>& baseline_grid) {
    ReplicateOutput out;
    out.replicate = replicate;
    const StreamKey key{cfg.seed, static_cast<std::uint64_t>(replicate), 0, 0};
    const IopeaConfig icfg = resolve_iopea_config(env, cfg.iopea);
    RowRecorder rec(replicate, icfg.horizon, g_star, cfg.downsample);
    StepObserver obs = [&rec](const StepEvent& e) { rec(e); };

    switch (cfg.algorithm) {
    case Algorithm::iopea: {
        auto r = run(env, *io, icfg, key, obs, known_width);
        out.ledger = r.ledger;
        out.final_policy = r.committed;
        out.epochs = static_cast<int>(r.history.size());
        out.degenerate = r.degenerate;
        out.history = std::move(r.history);
        break;
    }
    case Algorithm::random: {
        auto r = run_random(env, baseline_grid, icfg, key, obs);
        out.ledger = r.ledger;
        out.final_policy = r.final_policy;
        break;
    }
    case Algorithm::trivial: {
        auto r = run_trivial_elimination(env, baseline_grid, icfg, key, obs);
        out.ledger = r.ledger;
        out.final_policy = r.final_policy;
        break;
    }
    case Algorithm::erm: {
        auto r = run_full_feedback_erm(env, baseline_grid, icfg, key, obs);
        out.ledger = r.ledger;
        out.final_policy = r.final_policy;
        break;
    }
    }
    out.ledger.g_star = g_star;
    out.rows = std::move(rec.rows);
    const std::int64_t window = std::max<std::int64_t>(1, icfg.horizon / 10);
    out.trailing_gain = rec.tail_cost / static_cast<double>(window);
    return out;
}

struct ReplicateSummary {
    int replicate = 0;
    PolicyParam final_policy;
    GainEstimate final_gain;
    double trailing_gain = 0;
    double regret_T = 0;
    std::optional<double> regret_slope;
    int epochs = 0;
    bool degenerate = false;
    bool ever_eliminated_optimum = false;
};

struct ExperimentSummary {
    std::string name;
    std::string algorithm;
    std::string env;
    std::int64_t horizon = 0;
    std::uint64_t base_seed = 0;
    GridOptimum optimum;
    std::size_t grid_size = 0;
    std::size_t width = 0;
    double mean_final_gain = 0;
    double final_gain_se = 0;
    double relative_gap = 0;
    double mean_regret_T = 0;
    std::optional<double> median_regret_slope;
    std::vector<ReplicateSummary> replicates;
};

struct ExperimentOutput {
    ExperimentSummary summary;
    std::vector<ReplicateOutput> replicates;
};

// Runs everything in memory (no files).
ExperimentOutput run_experiment_in_memory(const ExperimentConfig& cfg,
                                          const std::optional<GridOptimum>& known_optimum = std::nullopt);

// Runs and writes <out>.csv and <out>.json.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

GridOptimum compute_grid_optimum(const ExperimentConfig& cfg);

std::string summary_json(const ExperimentSummary& s);
void write_csv(const std::string& path, const std::vector<ReplicateOutput>& reps);

} // namespace iopea
