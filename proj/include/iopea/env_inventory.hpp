#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/demand.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

inline constexpr int kMaxLead = 12;

// Shared by the single- and dual-sourcing models.
struct SaleObservation {
    double sale = 0;
    bool censored = false;
    double available = 0;   // post-arrival stock the sale was taken from
};

struct InvState {
    double on_hand = 0;
    int lead = 0;
    std::array<double, kMaxLead> pipeline{};   // pipeline[0] arrives this period (Q_{t-L})

    double pipeline_sum() const {
        double s = 0;
        for (int i = 0; i < lead; ++i) s += pipeline[i];
        return s;
    }
    bool operator==(const InvState& o) const {
        if (on_hand != o.on_hand || lead != o.lead) return false;
        for (int i = 0; i < lead; ++i)
            if (pipeline[i] != o.pipeline[i]) return false;
        return true;
    }
};

struct InvParams {
    int lead_time = 2;
    double holding = 1;
    double lost_sales = 10;
    DemandModel demand;
    double policy_bound = 3;   // U for the base-stock level
    double span = -1;          // normalized H override; negative = 36 max(h,p) L U_d, normalized

    void validate() const;
};

struct InvStepResult {
    InvState next;
    double true_cost = 0;
    double pseudo_cost = 0;
    SaleObservation obs;
};

InvStepResult inv_step(const InvState& s, double order_qty, double demand, const InvParams& params);

double base_stock_action(double theta, const InvState& s);

CostNormalizer inventory_normalizer(const InvParams& params);

using InvTransition = Transition<InvState, double, SaleObservation>;
using InvTrajectory = Trajectory<InvTransition>;

// Rebuilds the theta' run from the recorded sales alone and returns its
// average pseudo-cost (through `norm`).
double replay_counterfactual(double theta_prime, const InvTrajectory& traj, const InvParams& params,
                             const CostNormalizer& norm = {});

// Plays theta = 0 until the state is all zeros; demand comes from `next_demand()`.
// Returns the number of steps used.
template <class DemandSource>
std::int64_t inv_restart(InvState s, DemandSource&& next_demand, const InvParams& params,
                         std::int64_t cap = 1'000'000) {
    const InvState zero{0.0, s.lead, {}};
    std::int64_t steps = 0;
    while (!(s == zero)) {
        if (steps >= cap) throw Error("restart-cap", "inventory did not drain");
        s = inv_step(s, 0.0, next_demand(), params).next;
        ++steps;
    }
    return steps;
}

class InventoryEnv {
public:
    using State = InvState;
    using Action = double;
    using Exogenous = double;   // demand
    using Observation = SaleObservation;
    using Transition = InvTransition;

    explicit InventoryEnv(InvParams params);

    const InvParams& params() const { return params_; }

    State initial_state() const { return InvState{0.0, params_.lead_time, {}}; }
    Action policy_action(const PolicyParam& p, const State& s) const { return base_stock_action(p[0], s); }
    Exogenous draw_exogenous(RandomStream& rng) const { return params_.demand.draw(rng); }
    Transition step(const State& s, Action a, Exogenous demand) const;
    PolicyParam restart_policy() const { return PolicyParam{0.0}; }
    bool is_initial(const State& s) const { return s == initial_state(); }
    EnvironmentInfo info() const;
    std::vector<PolicyParam> policy_grid(double r) const;
    InformationOrder<InventoryEnv> information_order(std::vector<PolicyParam> grid) const;

private:
    InvParams params_;
    CostNormalizer norm_;
};

} // namespace iopea
