#include "iopea/env_dualsource.hpp"

#include <algorithm>
#include <cmath>

namespace iopea {

void DsParams::validate() const {
    if (expedited_lead < 0 || regular_lead <= expedited_lead || regular_lead > kMaxLead)
        throw ConfigError("dual sourcing needs 0 <= L_e < L_r <= 12");
    if (!(holding > 0) || !(lost_sales > 0)) throw ConfigError("holding and lost-sales costs must be positive");
    if (regular_cost < 0 || expedited_cost < 0) throw ConfigError("purchase costs must be nonnegative");
    if (!(policy_bound >= 0)) throw ConfigError("policy bound must be nonnegative");
    if (t_h < 1) throw ConfigError("t_h must be at least 1");
    demand.validate();
}

DsStepResult ds_step(const DsState& s, double q_r, double q_e, double demand, const DsParams& params) {
    if (q_r < 0 || q_e < 0 || demand < 0) throw Error("negative-input", "orders and demand must be nonnegative");
    const int Lr = s.regular_lead, Le = s.expedited_lead;
    const double exp_arrival = Le > 0 ? s.expedited[0] : q_e;
    const double available = s.on_hand + s.regular[0] + exp_arrival;
    const double sale = std::min(available, demand);

    DsStepResult r;
    r.next.regular_lead = Lr;
    r.next.expedited_lead = Le;
    r.next.on_hand = available - sale;
    for (int i = 0; i + 1 < Lr; ++i) r.next.regular[i] = s.regular[i + 1];
    r.next.regular[Lr - 1] = q_r;
    for (int i = 0; i + 1 < Le; ++i) r.next.expedited[i] = s.expedited[i + 1];
    if (Le > 0) r.next.expedited[Le - 1] = q_e;

    const double h = params.holding, p = params.lost_sales;
    const double purchase = params.regular_cost * q_r + params.expedited_cost * q_e;
    r.true_cost = h * std::max(available - demand, 0.0) + p * std::max(demand - available, 0.0) + purchase;
    // equals true_cost - p * demand, written in terms of the sale only
    r.pseudo_cost = h * (available - sale) - p * sale + purchase;
    r.obs = SaleObservation{sale, sale == available, available};
    return r;
}

DsAction dual_index_action(const PolicyParam& theta, const DsState& s) {
    const double z_e = theta[0], z_r = theta[1];
    // regular orders landing within the expedited lead time
    double near = 0;
    for (int j = 0; j <= s.expedited_lead && j < s.regular_lead; ++j) near += s.regular[j];
    const double exp_pos = s.on_hand + s.expedited_sum() + near;
    const double q_e = std::max(z_e - exp_pos, 0.0);
    const double q_r = std::max(z_r - s.on_hand - s.expedited_sum() - s.regular_sum() - q_e, 0.0);
    return DsAction{q_e, q_r};
}

double ds_alpha(double gamma, int regular_lead) {
    return (1.0 - gamma) / 2.0 * std::pow(gamma, regular_lead);
}

CostNormalizer ds_normalizer(const DsParams& params) {
    const double lo = params.lost_sales * params.demand.support;
    const double hi = (params.holding + params.regular_cost + params.expedited_cost) * params.policy_bound;
    return CostNormalizer{lo, 1.0 / (lo + hi)};
}

std::vector<std::size_t> hitting_indices(const DsTrajectory& traj, double z_r) {
    std::vector<std::size_t> out;
    const double tol = 1e-9 * std::max(1.0, std::abs(z_r));
    for (std::size_t t = 0; t < traj.steps.size(); ++t)
        if (std::abs(traj.steps[t].observation.available - z_r) <= tol) out.push_back(t);
    return out;
}

std::vector<double> hitting_sales(const DsTrajectory& traj, double alpha) {
    const auto T = static_cast<double>(traj.steps.size());
    const auto m = static_cast<std::size_t>(std::ceil(alpha * T - 1e-9));
    const auto hits = hitting_indices(traj, traj.policy[1]);
    std::vector<double> out;
    if (m == 0 || hits.size() < m) return out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(traj.steps[hits[i]].observation.sale);
    return out;
}

double ds_pseudo_gain(const PolicyParam& theta, std::span<const double> demands, const DsParams& params,
                      const CostNormalizer& norm) {
    if (demands.empty()) return 0.0;
    DsState s;
    s.regular_lead = params.regular_lead;
    s.expedited_lead = params.expedited_lead;
    double sum = 0;
    for (double d : demands) {
        const auto a = dual_index_action(theta, s);
        auto r = ds_step(s, a.regular, a.expedited, d, params);
        sum += norm(r.pseudo_cost);
        s = r.next;
    }
    return sum / static_cast<double>(demands.size());
}

double ds_counterfactual(const PolicyParam& theta_prime, const DsTrajectory& traj, double alpha,
                         const DsParams& params, const CostNormalizer& norm) {
    if (theta_prime[1] > traj.policy[1]) throw Error("not-dominated", "estimator needs z_r' <= z_r");
    return ds_pseudo_gain(theta_prime, hitting_sales(traj, alpha), params, norm);
}

bool dual_index_leq(const PolicyParam& a, const PolicyParam& b) {
    if (a[1] != b[1]) return a[1] < b[1];
    return a[0] <= b[0];
}

DualSourcingEnv::DualSourcingEnv(DsParams params) : params_(std::move(params)) {
    params_.validate();
    norm_ = ds_normalizer(params_);
}

DsState DualSourcingEnv::initial_state() const {
    DsState s;
    s.regular_lead = params_.regular_lead;
    s.expedited_lead = params_.expedited_lead;
    return s;
}

DualSourcingEnv::Transition DualSourcingEnv::step(const State& s, Action a, Exogenous demand) const {
    auto r = ds_step(s, a.regular, a.expedited, demand, params_);
    return Transition{s, a, norm_(r.pseudo_cost), r.true_cost, r.obs, r.next};
}

EnvironmentInfo DualSourcingEnv::info() const {
    EnvironmentInfo info;
    info.normalizer = norm_;
    const double g = params_.demand.zero_prob;
    info.alpha = ds_alpha(g, params_.regular_lead);
    info.t_h = params_.t_h;
    info.span = params_.span >= 0 ? params_.span : 2.0 / ((1.0 - g) * std::pow(g, params_.regular_lead));
    return info;
}

std::vector<PolicyParam> DualSourcingEnv::policy_grid(double r) const {
    const auto axis = axis_points(params_.policy_bound, r);
    std::vector<PolicyParam> out;
    for (double ze : axis)
        for (double zr : axis)
            if (ze <= zr) out.push_back(PolicyParam{ze, zr});
    return out;
}

InformationOrder<DualSourcingEnv> DualSourcingEnv::information_order(std::vector<PolicyParam> grid) const {
    const double alpha = info().alpha;
    const int th = params_.t_h;
    PolicyOrder order(std::move(grid), dual_index_leq, OrderKind::distributional, alpha,
                      [th](double) { return th; });
    auto params = params_;
    auto norm = norm_;
    return {std::move(order),
            [params, norm, alpha](std::span<const PolicyParam> targets, const DsTrajectory& traj) {
                const auto sales = hitting_sales(traj, alpha);
                std::vector<double> out;
                out.reserve(targets.size());
                for (const auto& t : targets) {
                    if (t[1] > traj.policy[1]) throw Error("not-dominated", "estimator needs z_r' <= z_r");
                    out.push_back(ds_pseudo_gain(t, sales, params, norm));
                }
                return out;
            },
            {}};
}

} // namespace iopea
