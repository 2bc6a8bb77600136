#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iopea/error.hpp"
#include "iopea/random.hpp"

namespace iopea {

// A point in the policy box. Ordering is lexicographic on coords, which is
// the canonical order used everywhere for tie-breaking.
struct PolicyParam {
    std::vector<double> coords;

    PolicyParam() = default;
    PolicyParam(std::initializer_list<double> c) : coords(c) {}
    explicit PolicyParam(std::vector<double> c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }

    auto operator<=>(const PolicyParam&) const = default;
    bool operator==(const PolicyParam&) const = default;
};

// "1.5;2.3" -- compact, locale-free, used in CSV and logs.
std::string format_coords(const PolicyParam& p);

template <class State, class Action, class Observation>
struct Transition {
    State state_before{};
    Action action{};
    double observed_cost = 0;   // training channel (pseudo-cost, normalized)
    double reported_cost = 0;   // true cost, for regret
    Observation observation{};
    State state_after{};
};

template <class Tr>
struct Trajectory {
    using TransitionType = Tr;
    decltype(Tr::state_before) start_state{};
    std::vector<Tr> steps;
    PolicyParam policy;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

enum class CostChannel { observed, reported };

double mean_cost(std::span<const double> costs);

template <class Tr>
double empirical_gain(const Trajectory<Tr>& traj, CostChannel channel) {
    if (traj.steps.empty()) throw Error("empty-trajectory", "empirical gain of an empty trajectory");
    double sum = 0;
    for (const auto& s : traj.steps) sum += channel == CostChannel::observed ? s.observed_cost : s.reported_cost;
    return sum / static_cast<double>(traj.steps.size());
}

struct RegretLedger {
    double total_true_cost = 0;
    std::int64_t timesteps = 0;
    double g_star = 0;

    void record(double reported_cost) {
        total_true_cost += reported_cost;
        ++timesteps;
    }
};

inline RegretLedger record_step(RegretLedger ledger, double reported_cost) {
    ledger.record(reported_cost);
    return ledger;
}

template <class Tr>
RegretLedger record_step(RegretLedger ledger, const Tr& tr) {
    ledger.record(tr.reported_cost);
    return ledger;
}

inline double regret(const RegretLedger& ledger) {
    return ledger.total_true_cost - static_cast<double>(ledger.timesteps) * ledger.g_star;
}

// Affine map raw -> [0,1] applied to training costs.
struct CostNormalizer {
    double offset = 0;
    double scale = 1;
    double operator()(double raw) const { return (raw + offset) * scale; }
};

enum class RadiusRule { union_bound, plugin };

struct EnvironmentInfo {
    double span = 1;          // H, in normalized cost units
    double alpha = 1;
    int t_h = 1;
    CostNormalizer normalizer;
    // Only appear in regret constants; kept for reporting.
    double restart_bound = 0;
    double lipschitz = 0;
};

template <class E>
concept Environment = requires(const E& env, const typename E::State& s, const typename E::Action& a,
                               const typename E::Exogenous& x, const PolicyParam& p, RandomStream& rng) {
    typename E::Observation;
    typename E::Transition;
    { env.initial_state() } -> std::same_as<typename E::State>;
    { env.policy_action(p, s) } -> std::same_as<typename E::Action>;
    { env.draw_exogenous(rng) } -> std::same_as<typename E::Exogenous>;
    { env.step(s, a, x) } -> std::same_as<typename E::Transition>;
    { env.restart_policy() } -> std::same_as<PolicyParam>;
    { env.is_initial(s) } -> std::convertible_to<bool>;
    { env.info() } -> std::same_as<EnvironmentInfo>;
    { env.policy_grid(1.0) } -> std::same_as<std::vector<PolicyParam>>;
};

template <class E>
using TrajectoryOf = Trajectory<typename E::Transition>;

// Rolls policy p forward n steps from `start`, drawing fresh exogenous input
// from rng. The exogenous draws themselves are not kept.
template <Environment Env>
TrajectoryOf<Env> rollout(const Env& env, const PolicyParam& p, const typename Env::State& start, std::int64_t n,
                          RandomStream& rng) {
    TrajectoryOf<Env> traj;
    traj.start_state = start;
    traj.policy = p;
    traj.steps.reserve(static_cast<std::size_t>(n));
    auto s = start;
    for (std::int64_t t = 0; t < n; ++t) {
        traj.steps.push_back(env.step(s, env.policy_action(p, s), env.draw_exogenous(rng)));
        s = traj.steps.back().state_after;
    }
    return traj;
}

} // namespace iopea
