#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

struct BaselineResult {
    RegretLedger ledger;
    PolicyParam final_policy;
};

namespace hindsight {

// Access to the exogenous stream behind a block of play. This is what the
// full-feedback oracle gets and nothing else in the library touches it.
template <Environment Env>
constexpr bool has_view() {
    if constexpr (requires { Env::exposes_exogenous; }) return Env::exposes_exogenous;
    else return true;
}

// Average true cost of p from s_1 driven by the given exogenous inputs.
template <Environment Env>
double true_gain_on(const Env& env, const PolicyParam& p, std::span<const typename Env::Exogenous> exo) {
    if (exo.empty()) throw Error("empty-trajectory", "no exogenous inputs");
    auto s = env.initial_state();
    double sum = 0;
    for (const auto& x : exo) {
        auto tr = env.step(s, env.policy_action(p, s), x);
        sum += tr.reported_cost;
        s = tr.state_after;
    }
    return sum / static_cast<double>(exo.size());
}

} // namespace hindsight

// Uniformly random policy at every epoch boundary (IOPEA's N_k schedule).
template <Environment Env>
BaselineResult run_random(const Env& env, const std::vector<PolicyParam>& grid, const IopeaConfig& cfg,
                          const StreamKey& key, const StepObserver& obs = {}) {
    if (grid.empty()) throw Error("empty-active-set", "policy grid is empty");
    BaselineResult res;
    detail::Driver<Env> drv(env, obs, cfg.horizon, res.ledger);
    RandomStream picker(detail::with_block(key, kBaselineEpoch, 0));
    for (int k = 1; drv.remaining() > 0; ++k) {
        res.final_policy = grid[picker.index(grid.size())];
        drv.run_for(res.final_policy, schedule_n_k(k, cfg), RandomStream(detail::with_block(key, k, 0)), k, grid.size());
    }
    return res;
}

// IOPEA with the discrete order: nothing is shared between policies.
template <Environment Env>
BaselineResult run_trivial_elimination(const Env& env, const std::vector<PolicyParam>& grid, const IopeaConfig& cfg,
                                       const StreamKey& key, const StepObserver& obs = {}) {
    auto io = trivial_order<Env>(grid);
    auto r = run(env, io, cfg, key, obs, io.order.size());
    return BaselineResult{r.ledger, r.committed};
}

// Full-feedback ERM: plays the current empirical argmin; at the end of each
// epoch every grid policy is re-simulated on that epoch's exogenous inputs.
template <Environment Env>
BaselineResult run_full_feedback_erm(const Env& env, const std::vector<PolicyParam>& grid, const IopeaConfig& cfg,
                                     const StreamKey& key, const StepObserver& obs = {}) {
    if constexpr (!hindsight::has_view<Env>()) {
        throw Error("no-full-feedback", "environment does not expose its exogenous inputs");
    } else {
        if (grid.empty()) throw Error("empty-active-set", "policy grid is empty");
        std::vector<PolicyParam> sorted = grid;
        std::sort(sorted.begin(), sorted.end());
        BaselineResult res;
        res.final_policy = sorted.front();
        auto state = env.initial_state();
        for (int k = 1; res.ledger.timesteps < cfg.horizon; ++k) {
            const std::int64_t n = std::min(schedule_n_k(k, cfg), cfg.horizon - res.ledger.timesteps);
            RandomStream rng(detail::with_block(key, k, 0));
            std::vector<typename Env::Exogenous> exo;
            exo.reserve(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) {
                exo.push_back(env.draw_exogenous(rng));
                auto tr = env.step(state, env.policy_action(res.final_policy, state), exo.back());
                state = tr.state_after;
                res.ledger.record(tr.reported_cost);
                if (obs) obs(StepEvent{res.ledger.timesteps, k, tr.reported_cost, sorted.size(), res.final_policy});
            }
            if (res.ledger.timesteps >= cfg.horizon) break;
            std::size_t best = 0;
            double best_gain = 0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                const double g = hindsight::true_gain_on(env, sorted[i], std::span<const typename Env::Exogenous>(exo));
                if (i == 0 || g < best_gain) {
                    best = i;
                    best_gain = g;
                }
            }
            res.final_policy = sorted[best];
        }
        return res;
    }
}

} // namespace iopea
