#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/demand.hpp"
#include "iopea/env_inventory.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

struct DsState {
    double on_hand = 0;
    int regular_lead = 1;
    int expedited_lead = 0;
    std::array<double, kMaxLead> regular{};     // regular[0] arrives this period
    std::array<double, kMaxLead> expedited{};   // unused when expedited_lead == 0

    double regular_sum() const {
        double s = 0;
        for (int i = 0; i < regular_lead; ++i) s += regular[i];
        return s;
    }
    double expedited_sum() const {
        double s = 0;
        for (int i = 0; i < expedited_lead; ++i) s += expedited[i];
        return s;
    }
    bool operator==(const DsState& o) const {
        if (on_hand != o.on_hand || regular_lead != o.regular_lead || expedited_lead != o.expedited_lead) return false;
        for (int i = 0; i < regular_lead; ++i)
            if (regular[i] != o.regular[i]) return false;
        for (int i = 0; i < expedited_lead; ++i)
            if (expedited[i] != o.expedited[i]) return false;
        return true;
    }
};

struct DsParams {
    int regular_lead = 1;
    int expedited_lead = 0;
    double holding = 1;
    double lost_sales = 10;
    double regular_cost = 0;
    double expedited_cost = 0.5;
    DemandModel demand;
    double policy_bound = 3;
    double span = -1;     // normalized H override; negative = 2 / ((1-gamma) gamma^{L_r})
    int t_h = 50;

    void validate() const;
};

struct DsAction {
    double expedited = 0;   // q_e
    double regular = 0;     // q_r
    bool operator==(const DsAction&) const = default;
};

struct DsStepResult {
    DsState next;
    double true_cost = 0;
    double pseudo_cost = 0;
    SaleObservation obs;
};

DsStepResult ds_step(const DsState& s, double q_r, double q_e, double demand, const DsParams& params);

// theta = (z_e, z_r).
DsAction dual_index_action(const PolicyParam& theta, const DsState& s);

double ds_alpha(double gamma, int regular_lead);

CostNormalizer ds_normalizer(const DsParams& params);

using DsTransition = Transition<DsState, DsAction, SaleObservation>;
using DsTrajectory = Trajectory<DsTransition>;

// 0-based indices where post-arrival stock equals z_r.
std::vector<std::size_t> hitting_indices(const DsTrajectory& traj, double z_r);

// Hitting-time estimator: the sales at the first ceil(alpha T) hits drive a
// theta' simulation from s_1; 0 when there are too few hits.
double ds_counterfactual(const PolicyParam& theta_prime, const DsTrajectory& traj, double alpha,
                         const DsParams& params, const CostNormalizer& norm = {});

// Sales at the first ceil(alpha T) hitting times (empty if there are fewer).
std::vector<double> hitting_sales(const DsTrajectory& traj, double alpha);

// Average normalized pseudo-cost of theta from s_1 on the given demands.
double ds_pseudo_gain(const PolicyParam& theta, std::span<const double> demands, const DsParams& params,
                      const CostNormalizer& norm = {});

// Dual-index information order: z_r first, ties by z_e.
bool dual_index_leq(const PolicyParam& a, const PolicyParam& b);

class DualSourcingEnv {
public:
    using State = DsState;
    using Action = DsAction;
    using Exogenous = double;
    using Observation = SaleObservation;
    using Transition = DsTransition;

    explicit DualSourcingEnv(DsParams params);

    const DsParams& params() const { return params_; }

    State initial_state() const;
    Action policy_action(const PolicyParam& p, const State& s) const { return dual_index_action(p, s); }
    Exogenous draw_exogenous(RandomStream& rng) const { return params_.demand.draw(rng); }
    Transition step(const State& s, Action a, Exogenous demand) const;
    PolicyParam restart_policy() const { return PolicyParam{0.0, 0.0}; }
    bool is_initial(const State& s) const { return s == initial_state(); }
    EnvironmentInfo info() const;
    // Only z_e <= z_r: above the diagonal the expedited level alone decides
    // every order, so those points duplicate (z_e, z_e).
    std::vector<PolicyParam> policy_grid(double r) const;
    InformationOrder<DualSourcingEnv> information_order(std::vector<PolicyParam> grid) const;

private:
    DsParams params_;
    CostNormalizer norm_;
};

} // namespace iopea
