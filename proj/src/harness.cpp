#include "iopea/harness.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace iopea {

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, p);
}

std::string format_row(const ResultRow& r) {
    std::string s;
    s += std::to_string(r.replicate);
    s += ',';
    s += std::to_string(r.epoch);
    s += ',';
    s += std::to_string(r.timestep);
    s += ',';
    s += format_double(r.cum_true_cost);
    s += ',';
    s += format_double(r.cum_regret);
    s += ',';
    s += std::to_string(r.active_set_size);
    s += ',';
    s += r.policy_coords;
    s += ',';
    s += format_double(r.gain_estimate);
    return s;
}

double regret_slope(std::span<const ResultRow> rows) {
    if (rows.size() < 10) throw Error("degenerate-regret", "need at least 10 sampled rows");
    const double T = static_cast<double>(rows.back().timestep);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (static_cast<double>(r.timestep) < T / 2 || !(r.cum_regret > 0)) continue;
        const double x = std::log(static_cast<double>(r.timestep)), y = std::log(r.cum_regret);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw Error("degenerate-regret", "fewer than two positive-regret rows in the second half");
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0)) throw Error("degenerate-regret", "all rows at one timestep");
    return (n * sxy - sx * sy) / denom;
}

std::vector<std::uint64_t> oracle_seeds(std::uint64_t base, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(base + static_cast<std::uint64_t>(i));
    return out;
}

void RowRecorder::operator()(const StepEvent& e) {
    cum_ += e.reported_cost;
    const std::int64_t window = std::max<std::int64_t>(1, horizon_ / 10);
    if (e.t > horizon_ - window) tail_cost += e.reported_cost;
    if (static_cast<double>(e.t) < next_emit_ && e.t != horizon_) return;
    ResultRow r;
    r.replicate = replicate_;
    r.epoch = e.epoch;
    r.timestep = e.t;
    r.cum_true_cost = cum_;
    r.cum_regret = cum_ - static_cast<double>(e.t) * g_star_;
    r.active_set_size = e.active_size;
    r.policy_coords = format_coords(e.policy);
    r.gain_estimate = (cum_ - last_cum_) / static_cast<double>(e.t - last_t_);
    rows.push_back(std::move(r));
    last_cum_ = cum_;
    last_t_ = e.t;
    next_emit_ = std::max(next_emit_ + 1.0, next_emit_ * factor_);
}

namespace {

template <Environment Env>
ExperimentOutput run_with_env(const Env& env, const ExperimentConfig& cfg, const std::optional<GridOptimum>& known) {
    ExperimentOutput out;
    auto& sum = out.summary;
    sum.name = cfg.name;
    sum.algorithm = to_string(cfg.algorithm);
    sum.env = to_string(cfg.env);
    sum.horizon = cfg.iopea.horizon;
    sum.base_seed = cfg.seed;

    const auto seeds = oracle_seeds(cfg.seed, cfg.eval_seeds);
    sum.optimum = known ? *known : grid_optimum(env, env.policy_grid(cfg.oracle_radius), cfg.eval_horizon, seeds, cfg.threads);

    const IopeaConfig icfg = resolve_iopea_config(env, cfg.iopea);
    std::optional<InformationOrder<Env>> io;
    std::optional<std::size_t> w;
    std::vector<PolicyParam> baseline_grid;
    if (cfg.algorithm == Algorithm::iopea) {
        io = make_information_order(env, env.policy_grid(icfg.grid_radius()), cfg.iopea.radius_rule);
        w = width(io->order);
        sum.grid_size = io->order.size();
        sum.width = *w;
    } else {
        baseline_grid = env.policy_grid(cfg.baseline_radius);
        sum.grid_size = baseline_grid.size();
        sum.width = cfg.algorithm == Algorithm::trivial ? baseline_grid.size() : 1;
    }

    out.replicates.resize(static_cast<std::size_t>(cfg.replicates));
    sum.replicates.resize(out.replicates.size());
    parallel_for(out.replicates.size(), cfg.threads, [&](std::size_t i) {
        auto rep = run_replicate(env, cfg, static_cast<int>(i), sum.optimum.gain, io ? &*io : nullptr, w, baseline_grid);
        ReplicateSummary rs;
        rs.replicate = rep.replicate;
        rs.final_policy = rep.final_policy;
        rs.final_gain = oracle_gain(env, rep.final_policy, cfg.eval_horizon, seeds);
        rs.trailing_gain = rep.trailing_gain;
        rs.regret_T = regret(rep.ledger);
        try {
            rs.regret_slope = regret_slope(rep.rows);
        } catch (const Error&) {
        }
        rs.epochs = rep.epochs;
        rs.degenerate = rep.degenerate;
        sum.replicates[i] = std::move(rs);
        out.replicates[i] = std::move(rep);
    });

    const double n = static_cast<double>(sum.replicates.size());
    std::vector<double> slopes;
    for (const auto& r : sum.replicates) {
        sum.mean_final_gain += r.final_gain.mean / n;
        sum.mean_regret_T += r.regret_T / n;
        if (r.regret_slope) slopes.push_back(*r.regret_slope);
    }
    if (sum.replicates.size() > 1) {
        double ss = 0;
        for (const auto& r : sum.replicates) ss += (r.final_gain.mean - sum.mean_final_gain) * (r.final_gain.mean - sum.mean_final_gain);
        sum.final_gain_se = std::sqrt(ss / (n - 1) / n);
    }
    sum.relative_gap = (sum.mean_final_gain - sum.optimum.gain) / sum.optimum.gain;
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        const std::size_t m = slopes.size();
        sum.median_regret_slope = m % 2 ? slopes[m / 2] : 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]);
    }
    return out;
}

nlohmann::ordered_json coords_json(const PolicyParam& p) { return nlohmann::ordered_json(p.coords); }

void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw Error("io", "cannot create directory '" + parent.string() + "': " + ec.message());
}

} // namespace

ExperimentOutput run_experiment_in_memory(const ExperimentConfig& cfg, const std::optional<GridOptimum>& known) {
    cfg.validate();
    const auto env = make_env(cfg);
    return std::visit([&](const auto& e) { return run_with_env(e, cfg, known); }, env);
}

GridOptimum compute_grid_optimum(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto env = make_env(cfg);
    const auto seeds = oracle_seeds(cfg.seed, cfg.eval_seeds);
    return std::visit(
        [&](const auto& e) { return grid_optimum(e, e.policy_grid(cfg.oracle_radius), cfg.eval_horizon, seeds, cfg.threads); },
        env);
}

std::string summary_json(const ExperimentSummary& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["algorithm"] = s.algorithm;
    j["env"] = s.env;
    j["horizon"] = s.horizon;
    j["grid_size"] = s.grid_size;
    j["width"] = s.width;
    j["g_star"] = s.optimum.gain;
    j["g_star_se"] = s.optimum.se;
    j["theta_star"] = coords_json(s.optimum.theta);
    j["mean_final_gain"] = s.mean_final_gain;
    j["final_gain_se"] = s.final_gain_se;
    j["relative_gap"] = s.relative_gap;
    j["mean_regret_T"] = s.mean_regret_T;
    j["regret_slope_median"] = s.median_regret_slope ? nlohmann::ordered_json(*s.median_regret_slope) : nullptr;
    j["base_seed"] = s.base_seed;
    auto seeds = nlohmann::ordered_json::array();
    auto reps = nlohmann::ordered_json::array();
    for (const auto& r : s.replicates) {
        seeds.push_back(r.replicate);
        nlohmann::ordered_json o;
        o["replicate"] = r.replicate;
        o["final_policy"] = coords_json(r.final_policy);
        o["final_gain"] = r.final_gain.mean;
        o["final_gain_se"] = r.final_gain.se;
        o["trailing_gain"] = r.trailing_gain;
        o["regret_T"] = r.regret_T;
        o["regret_slope"] = r.regret_slope ? nlohmann::ordered_json(*r.regret_slope) : nullptr;
        o["epochs"] = r.epochs;
        o["degenerate"] = r.degenerate;
        reps.push_back(std::move(o));
    }
    // replicate r uses stream key (base_seed, r, ...)
    j["seeds"] = seeds;
    j["replicates"] = reps;
    return j.dump(2) + "\n";
}

void write_csv(const std::string& path, const std::vector<ReplicateOutput>& reps) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io", "cannot write '" + path + "'");
    f << kCsvHeader << '\n';
    for (const auto& rep : reps)
        for (const auto& row : rep.rows) f << format_row(row) << '\n';
    if (!f) throw Error("io", "write failed for '" + path + "'");
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    auto out = run_experiment_in_memory(cfg);
    write_csv(cfg.out + ".csv", out.replicates);
    const std::string jpath = cfg.out + ".json";
    ensure_parent(jpath);
    std::ofstream f(jpath, std::ios::binary);
    if (!f) throw Error("io", "cannot write '" + jpath + "'");
    f << summary_json(out.summary);
    if (!f) throw Error("io", "write failed for '" + jpath + "'");
    return out.summary;
}

} // namespace iopea
