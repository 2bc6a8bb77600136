#pragma once

// Tiny environments with known answers for driver-level tests.

#include <cmath>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/iopea.hpp"

namespace toy {

using iopea::PolicyParam;

// Every step costs |theta[0] - center| plus optional noise; state never moves.
struct ConstantEnv {
    using State = int;
    using Action = double;
    using Exogenous = double;
    struct Observation {};
    using Transition = iopea::Transition<int, double, Observation>;

    double noise = 0;
    double center = 0;

    State initial_state() const { return 0; }
    Action policy_action(const PolicyParam& p, const State&) const { return p[0]; }
    Exogenous draw_exogenous(iopea::RandomStream& rng) const { return noise * (rng.uniform() - 0.5); }
    Transition step(const State& s, Action a, Exogenous x) const {
        const double c = std::abs(a - center) + x;
        return Transition{s, a, c, c, {}, s};
    }
    PolicyParam restart_policy() const { return PolicyParam{0.0}; }
    bool is_initial(const State&) const { return true; }
    iopea::EnvironmentInfo info() const { return {}; }
    std::vector<PolicyParam> policy_grid(double r) const {
        const double ub[] = {1.0};
        return iopea::epsilon_net(ub, r);
    }
    // every policy is fully described by its coordinate, so any trajectory
    // estimates any other policy exactly
    iopea::InformationOrder<ConstantEnv> information_order(std::vector<PolicyParam> grid) const {
        return {iopea::chain_order(std::move(grid)),
                [c = center](std::span<const PolicyParam> targets, const iopea::Trajectory<Transition>&) {
                    std::vector<double> out;
                    for (const auto& t : targets) out.push_back(std::abs(t[0] - c));
                    return out;
                },
                {}};
    }
};

// Same as ConstantEnv but declares that its randomness is hidden.
struct OpaqueEnv : ConstantEnv {
    static constexpr bool exposes_exogenous = false;
};

} // namespace toy
