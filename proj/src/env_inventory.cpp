#include "iopea/env_inventory.hpp"

#include <algorithm>
#include <cmath>

namespace iopea {

void InvParams::validate() const {
    if (lead_time < 0 || lead_time > kMaxLead) throw ConfigError("lead_time must lie in [0, 12]");
    if (!(holding > 0) || !(lost_sales > 0)) throw ConfigError("holding and lost-sales costs must be positive");
    if (!(policy_bound >= 0)) throw ConfigError("policy bound must be nonnegative");
    demand.validate();
}

InvStepResult inv_step(const InvState& s, double order_qty, double demand, const InvParams& params) {
    if (order_qty < 0 || demand < 0) throw Error("negative-input", "order quantity and demand must be nonnegative");
    const int L = s.lead;
    const double arriving = L > 0 ? s.pipeline[0] : order_qty;
    const double available = s.on_hand + arriving;
    const double sale = std::min(available, demand);

    InvStepResult r;
    r.next.lead = L;
    r.next.on_hand = available - sale;
    for (int i = 0; i + 1 < L; ++i) r.next.pipeline[i] = s.pipeline[i + 1];
    if (L > 0) r.next.pipeline[L - 1] = order_qty;

    const double h = params.holding, p = params.lost_sales;
    r.true_cost = h * std::max(available - demand, 0.0) + p * std::max(demand - available, 0.0);
    r.pseudo_cost = h * (available - sale) - p * sale;
    r.obs = SaleObservation{sale, sale == available, available};
    return r;
}

double base_stock_action(double theta, const InvState& s) {
    return std::max(theta - s.on_hand - s.pipeline_sum(), 0.0);
}

CostNormalizer inventory_normalizer(const InvParams& params) {
    const double lo = params.lost_sales * params.demand.support;
    return CostNormalizer{lo, 1.0 / (lo + params.holding * params.policy_bound)};
}

double replay_counterfactual(double theta_prime, const InvTrajectory& traj, const InvParams& params,
                             const CostNormalizer& norm) {
    if (traj.steps.empty()) throw Error("empty-trajectory", "nothing to replay");
    if (theta_prime > traj.policy[0])
        throw Error("not-dominated", "replay needs theta' <= theta");
    const InvState zero{0.0, traj.start_state.lead, {}};
    if (!(traj.start_state == zero)) throw Error("bad-trajectory", "replay needs a trajectory started at s_1");

    // An uncensored sale is the demand itself. A censored one is at least
    // theta's stock, which is at least theta' stock, so min(stock', sale)
    // is theta' sale in both cases.
    InvState s = zero;
    double sum = 0;
    for (const auto& tr : traj.steps) {
        auto r = inv_step(s, base_stock_action(theta_prime, s), tr.observation.sale, params);
        sum += norm(r.pseudo_cost);
        s = r.next;
    }
    return sum / static_cast<double>(traj.steps.size());
}

InventoryEnv::InventoryEnv(InvParams params) : params_(std::move(params)) {
    params_.validate();
    norm_ = inventory_normalizer(params_);
}

InventoryEnv::Transition InventoryEnv::step(const State& s, Action a, Exogenous demand) const {
    auto r = inv_step(s, a, demand, params_);
    return Transition{s, a, norm_(r.pseudo_cost), r.true_cost, r.obs, r.next};
}

EnvironmentInfo InventoryEnv::info() const {
    EnvironmentInfo info;
    info.normalizer = norm_;
    info.alpha = 1;
    info.t_h = 1;
    const double raw = 36.0 * std::max(params_.holding, params_.lost_sales) * params_.lead_time * params_.demand.support;
    info.span = params_.span >= 0 ? params_.span : raw * norm_.scale;
    return info;
}

std::vector<PolicyParam> InventoryEnv::policy_grid(double r) const {
    const double ub[] = {params_.policy_bound};
    return epsilon_net(ub, r);
}

InformationOrder<InventoryEnv> InventoryEnv::information_order(std::vector<PolicyParam> grid) const {
    PolicyOrder order(std::move(grid), [](const PolicyParam& a, const PolicyParam& b) { return a[0] <= b[0]; });
    auto params = params_;
    auto norm = norm_;
    return {std::move(order),
            [params, norm](std::span<const PolicyParam> targets, const InvTrajectory& traj) {
                std::vector<double> out;
                out.reserve(targets.size());
                for (const auto& t : targets) out.push_back(replay_counterfactual(t[0], traj, params, norm));
                return out;
            },
            {}};
}

} // namespace iopea
