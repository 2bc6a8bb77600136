#include "iopea/env_queue.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace iopea {

void QueueParams::validate() const {
    if (buffer < 1) throw ConfigError("queue buffer must be at least 1");
    if (a_max < 0) throw ConfigError("a_max must be nonnegative");
    if (static_cast<int>(power_cost.size()) != a_max + 1) throw ConfigError("power cost table needs a_max + 1 entries");
    if (!(lambda >= 0 && lambda <= lambda_max)) throw ConfigError("need 0 <= lambda <= lambda_max");
    if (!(mu >= 0 && mu <= mu_max)) throw ConfigError("need 0 <= mu <= mu_max");
    if (deadline_penalty < 0) throw ConfigError("deadline penalty must be nonnegative");
    for (double w : power_cost)
        if (!std::isfinite(w)) throw ConfigError("power costs must be finite");
    if (uniformization != 0) {
        QueueParams tight = *this;
        tight.uniformization = 0;
        if (uniformization < uniformization_constant(tight) - 1e-12)
            throw ConfigError("uniformization constant below the largest total event rate");
    }
}

double arrival_rate(int s, double lambda, const QueueParams& params) {
    if (s >= params.buffer) return 0.0;
    if (params.mode == ArrivalMode::decaying) return lambda * (1.0 - static_cast<double>(s) / params.buffer);
    return lambda;
}

double uniformization_constant(const QueueParams& params) {
    if (params.uniformization > 0) return params.uniformization;
    double U = 0;
    for (int s = 0; s <= params.buffer; ++s)
        U = std::max(U, arrival_rate(s, params.lambda_max, params) + s * params.mu_max + params.a_max);
    return U;
}

int service_rate(const PolicyParam& theta, int s) {
    return static_cast<int>(std::lround(theta[static_cast<std::size_t>(s)]));
}

JumpRecord queue_jump(int s, const PolicyParam& theta, const QueueParams& params, RandomStream& rng) {
    if (s < 0 || s > params.buffer) throw Error("bad-state", "queue state out of range");
    const double up = arrival_rate(s, params.lambda, params);
    const double miss = s * params.mu;
    const int a = service_rate(theta, s);
    const double serve = s > 0 ? a : 0.0;
    const double total = up + miss + serve;
    if (!(total > 0)) throw Error("absorbing-state", "no event can leave this state");

    JumpRecord j;
    j.state = s;
    j.holding_time = rng.exponential(1.0 / total);
    const double v = rng.uniform() * total;
    if (v < up) j.event = QueueEvent::arrival;
    else if (v < up + miss) j.event = QueueEvent::deadline_miss;
    else j.event = QueueEvent::service_completion;
    j.accrued_cost = params.power_cost[a] * j.holding_time +
                     (j.event == QueueEvent::deadline_miss ? params.deadline_penalty : 0.0);
    return j;
}

std::pair<double, double> estimate_rates(const std::vector<JumpRecord>& jumps, const PolicyParam& theta,
                                         const QueueParams& params) {
    const int L = params.buffer;
    double t0 = 0, tL = 0;
    std::int64_t n0 = 0, nL = 0;
    for (const auto& j : jumps) {
        if (j.state == 0) {
            t0 += j.holding_time;
            ++n0;
        } else if (j.state == L) {
            tL += j.holding_time;
            ++nL;
        }
    }
    if (n0 == 0 || nL == 0 || !(t0 > 0) || !(tL > 0))
        throw Error("insufficient-coverage", "need completed visits to both 0 and L");
    const double lam = std::clamp(n0 / t0, 0.0, params.lambda_max);
    const double mu = std::clamp((nL / tL - service_rate(theta, L)) / L, 0.0, params.mu_max);
    return {lam, mu};
}

std::vector<double> stationary_dist(double lambda, double mu, const PolicyParam& theta, const QueueParams& params) {
    const int L = params.buffer;
    std::vector<double> m(L + 1, 0.0);
    m[0] = 1.0;
    for (int s = 0; s < L; ++s) {
        const double num = arrival_rate(s, lambda, params);
        const double den = (s + 1) * mu + service_rate(theta, s + 1);
        if (num == 0) {
            m[s + 1] = 0;
        } else {
            if (!(den > 0)) throw Error("non-ergodic", "state " + std::to_string(s + 1) + " cannot be left");
            m[s + 1] = m[s] * num / den;
        }
    }
    double z = 0;
    for (double x : m) z += x;
    for (double& x : m) x /= z;
    return m;
}

std::vector<double> stationary_dist_generator(double lambda, double mu, const PolicyParam& theta,
                                              const QueueParams& params) {
    const int n = params.buffer + 1;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        if (s + 1 < n) Q(s, s + 1) = arrival_rate(s, lambda, params);
        if (s > 0) Q(s, s - 1) = s * mu + service_rate(theta, s);
        Q(s, s) = -Q.row(s).sum();
    }
    // m Q = 0 with sum(m) = 1: replace one balance equation by normalization
    Eigen::MatrixXd A = Q.transpose();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    A.row(n - 1).setOnes();
    b(n - 1) = 1.0;
    Eigen::VectorXd m = A.fullPivLu().solve(b);
    return std::vector<double>(m.data(), m.data() + n);
}

std::vector<double> limiting_dist(double lambda, double mu, const PolicyParam& theta, const QueueParams& params) {
    const int L = params.buffer;
    std::vector<double> m(L + 1, 0.0);
    m[0] = 1.0;
    for (int s = 0; s < L; ++s) {
        const double num = arrival_rate(s, lambda, params);
        const double den = (s + 1) * mu + service_rate(theta, s + 1);
        if (num == 0) break;
        if (den > 0) {
            m[s + 1] = m[s] * num / den;
        } else {
            // s + 1 cannot be left downwards: everything below is transient
            std::fill(m.begin(), m.begin() + s + 1, 0.0);
            m[s + 1] = 1.0;
        }
    }
    double z = 0;
    for (double x : m) z += x;
    for (double& x : m) x /= z;
    return m;
}

double expected_step_cost(int s, int a, double mu, const QueueParams& params) {
    const double U = uniformization_constant(params);
    return params.power_cost[a] / U + params.deadline_penalty * (s * mu) / U;
}

double plugin_gain(double lambda_hat, double mu_hat, const PolicyParam& theta_prime, const QueueParams& params) {
    const auto m = limiting_dist(lambda_hat, mu_hat, theta_prime, params);
    double g = 0;
    for (int s = 0; s <= params.buffer; ++s) g += m[s] * expected_step_cost(s, service_rate(theta_prime, s), mu_hat, params);
    return g;
}

double queue_radius(std::int64_t n_k, const QueueParams& params, const IopeaConfig& cfg) {
    const double L = params.buffer;
    return cfg.beta_scale * L * L * L * std::sqrt(std::log(1.0 / cfg.delta) / (cfg.alpha * static_cast<double>(n_k)));
}

std::vector<JumpRecord> jumps_from_trajectory(const QueueTrajectory& traj, const QueueParams& params) {
    std::vector<JumpRecord> out;
    double acc = 0;
    for (const auto& tr : traj.steps) {
        acc += tr.observation.dt;
        if (tr.observation.event == QueueEvent::none) continue;
        JumpRecord j;
        j.state = tr.state_before;
        j.holding_time = acc;
        j.event = tr.observation.event;
        j.accrued_cost = params.power_cost[tr.action] * acc +
                         (j.event == QueueEvent::deadline_miss ? params.deadline_penalty : 0.0);
        out.push_back(j);
        acc = 0;
    }
    return out;
}

QueueEnv::QueueEnv(QueueParams params) : params_(std::move(params)) {
    params_.validate();
    U_ = uniformization_constant(params_);
    const double w_max = *std::max_element(params_.power_cost.begin(), params_.power_cost.end());
    cost_scale_ = params_.deadline_penalty + w_max / U_;
    if (!(cost_scale_ > 0)) cost_scale_ = 1;
}

QueueEnv::Transition QueueEnv::step(const State& s, Action a, const Exogenous& x) const {
    const double up = arrival_rate(s, params_.lambda, params_);
    const double miss = s * params_.mu;
    const double serve = s > 0 ? a : 0.0;
    const double v = x.u * U_;
    QueueEvent ev = QueueEvent::none;
    int next = s;
    if (v < up) {
        ev = QueueEvent::arrival;
        next = s + 1;
    } else if (v < up + miss) {
        ev = QueueEvent::deadline_miss;
        next = s - 1;
    } else if (v < up + miss + serve) {
        ev = QueueEvent::service_completion;
        next = s - 1;
    }
    const double cost = params_.power_cost[a] / U_ + (ev == QueueEvent::deadline_miss ? params_.deadline_penalty : 0.0);
    return Transition{s, a, cost / cost_scale_, cost, QueueObservation{x.e / U_, ev}, next};
}

PolicyParam QueueEnv::restart_policy() const {
    return PolicyParam(std::vector<double>(params_.buffer + 1, static_cast<double>(params_.a_max)));
}

EnvironmentInfo QueueEnv::info() const {
    EnvironmentInfo info;
    info.normalizer = CostNormalizer{0.0, 1.0 / cost_scale_};
    info.alpha = 1;
    info.t_h = 1;
    const double L = params_.buffer;
    info.span = params_.span >= 0 ? params_.span : L * std::log(L) + 1.0;
    return info;
}

std::vector<PolicyParam> QueueEnv::policy_grid(double) const {
    std::vector<double> ub(params_.buffer + 1, static_cast<double>(params_.a_max));
    return epsilon_net(ub, 1.0);
}

InformationOrder<QueueEnv> QueueEnv::information_order(std::vector<PolicyParam> grid, RadiusRule rule) const {
    PolicyOrder order(std::move(grid), [](const PolicyParam& a, const PolicyParam& b) { return a <= b; },
                      OrderKind::distributional, 1.0, [](double) { return 1; });
    auto params = params_;
    const double scale = 1.0 / cost_scale_;
    InformationOrder<QueueEnv> io{std::move(order),
                                  [params, scale](std::span<const PolicyParam> targets, const QueueTrajectory& traj) {
                                      const auto jumps = jumps_from_trajectory(traj, params);
                                      const auto [lam, mu] = estimate_rates(jumps, traj.policy, params);
                                      std::vector<double> out;
                                      out.reserve(targets.size());
                                      for (const auto& t : targets) out.push_back(plugin_gain(lam, mu, t, params) * scale);
                                      return out;
                                  },
                                  {}};
    if (rule == RadiusRule::plugin) {
        io.radius = [params](int, std::int64_t n_k, std::size_t, int, const IopeaConfig& cfg) {
            return queue_radius(n_k, params, cfg);
        };
    }
    return io;
}

} // namespace iopea
