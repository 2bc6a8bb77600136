#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/order.hpp"

namespace iopea {

struct IopeaConfig {
    std::int64_t horizon = 1000;
    double delta = 0.1;
    double radius = 0;            // grid spacing r; 0 means T^{-1/2}
    double span = 1;              // H (normalized cost units)
    double alpha = 1;
    int t_h = 1;
    double beta_scale = 1;        // c_beta
    RadiusRule radius_rule = RadiusRule::union_bound;
    double restart_cap_factor = 10;  // restart phase capped at factor * N_1 steps

    double grid_radius() const { return radius > 0 ? radius : 1.0 / std::sqrt(static_cast<double>(horizon)); }
};

// Axis-aligned grid over [0, upper[i]] with spacing r, endpoints included.
std::vector<PolicyParam> epsilon_net(std::span<const double> upper, double r);
std::vector<double> axis_points(double upper, double r);

// ceil(4^k t_h ln(T) / alpha)
std::int64_t epoch_length(int k, int t_h, double alpha, double log_horizon);
std::int64_t schedule_n_k(int k, const IopeaConfig& cfg);

double beta_k(int k, std::int64_t n_k, std::size_t grid_size, int K, const IopeaConfig& cfg);

// Largest k with sum_{j<=k} w * N_j <= T (at least 1).
int epoch_count(const IopeaConfig& cfg, std::size_t w);

// Survivors of one elimination round; estimates aligned with active.
std::vector<std::size_t> eliminate(std::span<const std::size_t> active, std::span<const double> estimates,
                                   double beta);

// Order plus the estimator that turns a maximal policy's trajectory into
// gain estimates for the policies it covers.
template <class Env>
struct InformationOrder {
    using Estimator =
        std::function<std::vector<double>(std::span<const PolicyParam> targets, const TrajectoryOf<Env>& traj)>;
    using Radius = std::function<double(int k, std::int64_t n_k, std::size_t grid_size, int K, const IopeaConfig&)>;

    PolicyOrder order;
    Estimator estimate;
    Radius radius;  // empty -> beta_k
};

// Discrete order: every policy is estimated from its own observed costs.
template <Environment Env>
InformationOrder<Env> trivial_order(std::vector<PolicyParam> grid) {
    return {discrete_order(std::move(grid)),
            [](std::span<const PolicyParam> targets, const TrajectoryOf<Env>& traj) {
                for (const auto& t : targets)
                    if (t != traj.policy) throw Error("not-dominated", "discrete order only estimates itself");
                return std::vector<double>(targets.size(), empirical_gain(traj, CostChannel::observed));
            },
            {}};
}

struct EpochState {
    int epoch = 1;
    std::vector<std::size_t> survivors;   // Theta_k (grid indices, canonical order)
    std::vector<std::size_t> maxima;
    std::vector<double> estimates;        // aligned with survivors; empty if not estimated
    double beta = 0;
    std::int64_t n_k = 0;
    std::int64_t steps_used = 0;          // cumulative, at the end of this epoch
    bool truncated = false;
};

struct StepEvent {
    std::int64_t t;                       // steps recorded so far, including this one
    int epoch;
    double reported_cost;
    std::size_t active_size;
    const PolicyParam& policy;            // the policy being played (restart policy during restarts)
};

using StepObserver = std::function<void(const StepEvent&)>;

struct RunResult {
    RegretLedger ledger;
    std::vector<EpochState> history;
    PolicyParam committed;
    std::size_t width = 1;
    int planned_epochs = 1;
    bool degenerate = false;
};

namespace detail {

template <Environment Env>
class Driver {
public:
    Driver(const Env& env, const StepObserver& obs, std::int64_t horizon, RegretLedger& ledger)
        : env_(env), obs_(obs), horizon_(horizon), ledger_(ledger), state_(env.initial_state()) {}

    std::int64_t remaining() const { return horizon_ - ledger_.timesteps; }
    const typename Env::State& state() const { return state_; }

    // Plays p for up to n steps; returns the trajectory of what was played.
    TrajectoryOf<Env> play(const PolicyParam& p, std::int64_t n, RandomStream rng, int epoch, std::size_t active) {
        n = std::min(n, remaining());
        TrajectoryOf<Env> traj;
        traj.start_state = state_;
        traj.policy = p;
        traj.steps.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
        for (std::int64_t i = 0; i < n; ++i) {
            traj.steps.push_back(one_step(p, rng, epoch, active));
        }
        return traj;
    }

    // Same as play() but discards transitions.
    void run_for(const PolicyParam& p, std::int64_t n, RandomStream rng, int epoch, std::size_t active) {
        n = std::min(n, remaining());
        for (std::int64_t i = 0; i < n; ++i) one_step(p, rng, epoch, active);
    }

    // Plays p until the initial state is reached, the budget ends, or the cap
    // triggers. Returns true if s_1 was reached.
    bool restart(const PolicyParam& p, std::int64_t cap, RandomStream rng, int epoch, std::size_t active) {
        std::int64_t used = 0;
        while (!env_.is_initial(state_)) {
            if (remaining() <= 0) return false;
            if (used >= cap) throw Error("restart-cap", "restart policy did not reach the initial state");
            one_step(p, rng, epoch, active);
            ++used;
        }
        return true;
    }

private:
    typename Env::Transition one_step(const PolicyParam& p, RandomStream& rng, int epoch, std::size_t active) {
        auto tr = env_.step(state_, env_.policy_action(p, state_), env_.draw_exogenous(rng));
        state_ = tr.state_after;
        ledger_.record(tr.reported_cost);
        if (obs_) obs_(StepEvent{ledger_.timesteps, epoch, tr.reported_cost, active, p});
        return tr;
    }

    const Env& env_;
    const StepObserver& obs_;
    std::int64_t horizon_;
    RegretLedger& ledger_;
    typename Env::State state_;
};

inline StreamKey with_block(StreamKey key, std::uint64_t epoch, std::uint64_t slot) {
    key.epoch = epoch;
    key.slot = slot;
    return key;
}

} // namespace detail

// One elimination epoch starting from s_1. Survivors and estimates are only
// updated when every maximal policy got its full N_k steps.
template <Environment Env>
EpochState run_epoch(const EpochState& in, detail::Driver<Env>& drv, const Env& env, const InformationOrder<Env>& io,
                     const IopeaConfig& cfg, int K, const StreamKey& key) {
    const auto& order = io.order;
    EpochState st;
    st.epoch = in.epoch;
    st.survivors = in.survivors;
    st.n_k = schedule_n_k(st.epoch, cfg);
    st.maxima = maximal_set(order, st.survivors);
    const PolicyParam restart_p = env.restart_policy();
    const std::int64_t cap = static_cast<std::int64_t>(cfg.restart_cap_factor * schedule_n_k(1, cfg));
    const std::size_t active = st.survivors.size();

    std::vector<TrajectoryOf<Env>> trajs;
    for (std::size_t j = 0; j < st.maxima.size(); ++j) {
        const auto& p = order.at(st.maxima[j]);
        trajs.push_back(drv.play(p, st.n_k, RandomStream(detail::with_block(key, st.epoch, 2 * j)), st.epoch, active));
        if (static_cast<std::int64_t>(trajs.back().size()) < st.n_k) {
            st.truncated = true;
            break;
        }
        drv.restart(restart_p, cap, RandomStream(detail::with_block(key, st.epoch, 2 * j + 1)), st.epoch, active);
    }
    st.beta = io.radius ? io.radius(st.epoch, st.n_k, order.size(), K, cfg)
                        : beta_k(st.epoch, st.n_k, order.size(), K, cfg);

    if (!st.truncated) {
        auto assign = assign_estimators(order, st.survivors, st.maxima);
        std::vector<double> est(st.survivors.size(), 0.0);
        bool ok = true;
        for (std::size_t j = 0; j < st.maxima.size() && ok; ++j) {
            std::vector<PolicyParam> targets;
            std::vector<std::size_t> where;
            for (std::size_t i = 0; i < assign.active.size(); ++i)
                if (assign.owner[i] == st.maxima[j]) {
                    targets.push_back(order.at(assign.active[i]));
                    where.push_back(i);
                }
            try {
                auto vals = io.estimate(targets, trajs[j]);
                for (std::size_t i = 0; i < where.size(); ++i) est[where[i]] = vals[i];
            } catch (const Error& e) {
                if (e.code() != "insufficient-coverage") throw;
                ok = false;  // keep the set as is; the next, longer epoch retries
            }
        }
        if (ok) {
            st.estimates = est;
            st.survivors = eliminate(st.survivors, est, st.beta);
            // estimates are re-aligned with the new survivor list
            std::vector<double> kept;
            for (std::size_t i = 0, j = 0; i < est.size() && j < st.survivors.size(); ++i)
                if (in.survivors[i] == st.survivors[j]) {
                    kept.push_back(est[i]);
                    ++j;
                }
            st.estimates = std::move(kept);
        }
    }
    st.steps_used = drv.remaining() >= 0 ? cfg.horizon - drv.remaining() : cfg.horizon;
    return st;
}

template <Environment Env>
RunResult run(const Env& env, const InformationOrder<Env>& io, const IopeaConfig& cfg, const StreamKey& key,
              const StepObserver& obs = {}, std::optional<std::size_t> known_width = {}) {
    const auto& order = io.order;
    if (order.size() == 0) throw Error("empty-active-set", "policy grid is empty");
    RunResult res;
    res.width = known_width ? *known_width : width(order);
    res.planned_epochs = epoch_count(cfg, res.width);
    detail::Driver<Env> drv(env, obs, cfg.horizon, res.ledger);

    std::vector<std::size_t> survivors(order.size());
    for (std::size_t i = 0; i < survivors.size(); ++i) survivors[i] = i;

    const auto first_max = maximal_set(order, survivors);
    if (cfg.horizon < static_cast<std::int64_t>(first_max.size()) * schedule_n_k(1, cfg)) {
        std::clog << "warning: horizon " << cfg.horizon << " is shorter than one epoch; playing the first grid policy\n";
        res.degenerate = true;
        res.committed = order.at(0);
        drv.run_for(res.committed, cfg.horizon, RandomStream(detail::with_block(key, kCommitEpoch, 0)), 0,
                    survivors.size());
        return res;
    }

    std::vector<double> best_est;  // aligned with survivors, from the latest completed epoch
    for (int k = 1;; ++k) {
        EpochState in;
        in.epoch = k;
        in.survivors = survivors;
        auto st = run_epoch(in, drv, env, io, cfg, res.planned_epochs, key);
        if (st.estimates.size() == st.survivors.size() && !st.estimates.empty()) best_est = st.estimates;
        else if (st.survivors.size() != survivors.size()) best_est.clear();
        survivors = st.survivors;
        res.history.push_back(std::move(st));
        if (drv.remaining() <= 0) break;
    }

    // The budget normally ends inside the last epoch, so this commit phase is
    // empty; `committed` is what the run reports as its learned policy.
    std::size_t pick = survivors.front();
    if (best_est.size() == survivors.size()) {
        auto it = std::min_element(best_est.begin(), best_est.end());
        pick = survivors[static_cast<std::size_t>(it - best_est.begin())];
    }
    res.committed = order.at(pick);
    int commit_epoch = res.history.empty() ? 1 : res.history.back().epoch + 1;
    drv.run_for(res.committed, drv.remaining(), RandomStream(detail::with_block(key, kCommitEpoch, 0)), commit_epoch,
                survivors.size());
    return res;
}

} // namespace iopea
