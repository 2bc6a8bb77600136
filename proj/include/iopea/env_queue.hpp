#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iopea/core.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

enum class ArrivalMode { decaying, fixed };

enum class QueueEvent { arrival, deadline_miss, service_completion, none };

struct QueueParams {
    int buffer = 2;                 // L
    double lambda = 6;
    double mu = 3;
    double lambda_max = 10;
    double mu_max = 10;
    int a_max = 3;
    std::vector<double> power_cost{0, 1, 4, 9};   // w(a), a = 0..a_max
    double deadline_penalty = 100;  // C
    ArrivalMode mode = ArrivalMode::decaying;
    double uniformization = 0;      // U; 0 = smallest valid constant
    double span = -1;               // negative = L ln L + 1

    void validate() const;
};

// Arrival rate in state s for base rate `lambda` (no arrivals when full).
double arrival_rate(int s, double lambda, const QueueParams& params);

// max_s of the total event rate at the bound rates.
double uniformization_constant(const QueueParams& params);

struct JumpRecord {
    int state = 0;
    double holding_time = 0;
    QueueEvent event = QueueEvent::arrival;
    double accrued_cost = 0;
};

// Service rate theta_s as an integer.
int service_rate(const PolicyParam& theta, int s);

// One exact CTMC jump out of s (competing exponential clocks).
JumpRecord queue_jump(int s, const PolicyParam& theta, const QueueParams& params, RandomStream& rng);

std::pair<double, double> estimate_rates(const std::vector<JumpRecord>& jumps, const PolicyParam& theta,
                                         const QueueParams& params);

std::vector<double> stationary_dist(double lambda, double mu, const PolicyParam& theta, const QueueParams& params);

// Same distribution from a dense generator solve (used as a cross-check).
std::vector<double> stationary_dist_generator(double lambda, double mu, const PolicyParam& theta,
                                              const QueueParams& params);

// Long-run distribution from s_1 = 0. Equals stationary_dist when the chain
// is ergodic; otherwise it is supported on the closed class above the
// highest state with no downward rate.
std::vector<double> limiting_dist(double lambda, double mu, const PolicyParam& theta, const QueueParams& params);

double expected_step_cost(int s, int a, double mu, const QueueParams& params);

double plugin_gain(double lambda_hat, double mu_hat, const PolicyParam& theta_prime, const QueueParams& params);

// c_beta L^3 sqrt(ln(1/delta) / (alpha n_k))
double queue_radius(std::int64_t n_k, const QueueParams& params, const IopeaConfig& cfg);

struct QueueTick {
    double u = 0;   // picks the event
    double e = 0;   // Exp(1), scaled by 1/U into elapsed time
};

struct QueueObservation {
    double dt = 0;
    QueueEvent event = QueueEvent::none;
};

using QueueTransition = Transition<int, int, QueueObservation>;
using QueueTrajectory = Trajectory<QueueTransition>;

// Collapses uniformized ticks into completed holding intervals. The trailing
// unfinished interval is dropped.
std::vector<JumpRecord> jumps_from_trajectory(const QueueTrajectory& traj, const QueueParams& params);

// One MDP step is one tick of the uniformized chain: a real event or a
// self-loop, each lasting Exp(U) time.
class QueueEnv {
public:
    using State = int;
    using Action = int;
    using Exogenous = QueueTick;
    using Observation = QueueObservation;
    using Transition = QueueTransition;

    explicit QueueEnv(QueueParams params);

    const QueueParams& params() const { return params_; }
    double uniformization() const { return U_; }

    State initial_state() const { return 0; }
    Action policy_action(const PolicyParam& p, const State& s) const { return service_rate(p, s); }
    Exogenous draw_exogenous(RandomStream& rng) const { return QueueTick{rng.uniform(), rng.exponential(1.0)}; }
    Transition step(const State& s, Action a, const Exogenous& x) const;
    PolicyParam restart_policy() const;
    bool is_initial(const State& s) const { return s == 0; }
    EnvironmentInfo info() const;
    // r is ignored: the policy set is already finite, {0..A_max}^{L+1}.
    std::vector<PolicyParam> policy_grid(double r = 1) const;
    InformationOrder<QueueEnv> information_order(std::vector<PolicyParam> grid, RadiusRule rule) const;
    InformationOrder<QueueEnv> information_order(std::vector<PolicyParam> grid) const {
        return information_order(std::move(grid), RadiusRule::plugin);
    }

private:
    QueueParams params_;
    double U_;
    double cost_scale_;   // largest per-tick cost
};

} // namespace iopea
