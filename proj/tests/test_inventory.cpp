#include <doctest.h>

#include <cmath>
#include <random>

#include "iopea/env_inventory.hpp"

using namespace iopea;

namespace {

InvParams params_with_lead(int L) {
    InvParams p;
    p.lead_time = L;
    p.holding = 1;
    p.lost_sales = 10;
    return p;
}

// theta run from s_1 on a fixed demand stream, kept as a trajectory
InvTrajectory drive(const InventoryEnv& env, double theta, const std::vector<double>& demands) {
    InvTrajectory t;
    t.start_state = env.initial_state();
    t.policy = PolicyParam{theta};
    auto s = t.start_state;
    for (double d : demands) {
        t.steps.push_back(env.step(s, env.policy_action(t.policy, s), d));
        s = t.steps.back().state_after;
    }
    return t;
}

std::string code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("single step examples") {
    auto p = params_with_lead(1);
    InvState s{2.0, 1, {}};
    s.pipeline[0] = 1.0;
    auto r = inv_step(s, 0.0, 1.0, p);
    CHECK(r.next.on_hand == 2.0);
    CHECK(r.true_cost == 2.0);
    CHECK(r.pseudo_cost == -8.0);
    CHECK(r.obs.sale == 1.0);
    CHECK_FALSE(r.obs.censored);

    r = inv_step(s, 0.0, 0.0, p);
    CHECK(r.obs.sale == 0.0);
    CHECK(r.pseudo_cost == 3.0);
    CHECK_FALSE(r.obs.censored);

    r = inv_step(s, 0.0, 3.0, p);
    CHECK(r.obs.sale == 3.0);
    CHECK(r.next.on_hand == 0.0);
    CHECK(r.true_cost == 0.0);
    CHECK(r.pseudo_cost == -30.0);
    CHECK(r.obs.censored);

    // the order joins the back of the pipeline
    r = inv_step(s, 2.5, 0.0, p);
    CHECK(r.next.pipeline[0] == 2.5);

    CHECK_THROWS_AS(inv_step(s, -1.0, 0.0, p), Error);
    CHECK_THROWS_AS(inv_step(s, 0.0, -1.0, p), Error);
}

TEST_CASE("base-stock action") {
    InvState s{2.0, 1, {}};
    s.pipeline[0] = 1.0;
    CHECK(base_stock_action(5.0, s) == 2.0);
    CHECK(base_stock_action(0.0, s) == 0.0);
    InvState full{3.0, 1, {}};
    full.pipeline[0] = 2.0;
    CHECK(base_stock_action(3.0, full) == 0.0);
}

TEST_CASE("replay example with zero lead time") {
    InventoryEnv env(params_with_lead(0));
    auto traj = drive(env, 3.0, {2, 0, 4});
    CHECK(traj.steps[0].observation.sale == 2.0);
    CHECK(traj.steps[1].observation.sale == 0.0);
    CHECK(traj.steps[2].observation.sale == 3.0);
    CHECK(traj.steps[2].observation.censored);
    CHECK(replay_counterfactual(1.0, traj, env.params()) == doctest::Approx(-19.0 / 3.0));
}

TEST_CASE("replay of theta itself is the trajectory's own gain") {
    InventoryEnv env(params_with_lead(2));
    RandomStream rng(StreamKey{4, 0, 0, 0});
    auto traj = rollout(env, PolicyParam{2.2}, env.initial_state(), 300, rng);
    CHECK(replay_counterfactual(2.2, traj, env.params(), env.info().normalizer) ==
          doctest::Approx(empirical_gain(traj, CostChannel::observed)).epsilon(1e-12));
}

TEST_CASE("zero demand: stock sits at theta'") {
    InventoryEnv env(params_with_lead(0));
    auto traj = drive(env, 3.0, std::vector<double>(10, 0.0));
    CHECK(replay_counterfactual(1.5, traj, env.params()) == doctest::Approx(1.5));
}

TEST_CASE("replay errors") {
    InventoryEnv env(params_with_lead(0));
    auto traj = drive(env, 1.0, {1, 1});
    CHECK(code_of([&] { replay_counterfactual(2.0, traj, env.params()); }) == "not-dominated");
    InvTrajectory empty;
    empty.policy = PolicyParam{1.0};
    CHECK(code_of([&] { replay_counterfactual(0.5, empty, env.params()); }) == "empty-trajectory");
}

TEST_CASE("restart drain") {
    auto p0 = params_with_lead(0);
    CHECK(inv_restart(InvState{0.0, 0, {}}, [] { return 1.0; }, p0) == 0);
    CHECK(inv_restart(InvState{2.0, 0, {}}, [] { return 3.0; }, p0) == 1);

    auto p1 = params_with_lead(1);
    InvState s{0.0, 1, {}};
    s.pipeline[0] = 1.0;
    CHECK(inv_restart(s, [] { return 100.0; }, p1) >= 1);
    // no demand ever: the stock cannot drain
    CHECK(code_of([&] { inv_restart(s, [] { return 0.0; }, p1, 50); }) == "restart-cap");
}

TEST_CASE("replay equals direct simulation on the true demands") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 1000; ++rep) {
        InvParams p = params_with_lead(static_cast<int>(gen() % 4));
        p.holding = 0.5 + u(gen);
        p.lost_sales = 1 + 10 * u(gen);
        InventoryEnv env(p);
        const double theta = 3 * u(gen);
        const double theta_p = theta * u(gen);
        std::vector<double> d(1 + gen() % 60);
        for (auto& x : d) x = u(gen) < 0.3 ? 0.0 : 3 * u(gen);

        auto traj = drive(env, theta, d);
        auto direct = drive(env, theta_p, d);
        const auto norm = env.info().normalizer;
        CHECK(replay_counterfactual(theta_p, traj, p, norm) ==
              doctest::Approx(empirical_gain(direct, CostChannel::observed)).epsilon(1e-9));
    }
}

TEST_CASE("pseudo-cost is the true cost minus p times demand; censoring iff stockout") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    auto p = params_with_lead(2);
    InvState s{0.0, 2, {}};
    for (int t = 0; t < 2000; ++t) {
        const double d = u(gen) < 0.2 ? 0.0 : 4 * u(gen);
        auto r = inv_step(s, base_stock_action(2.5, s), d, p);
        CHECK(r.pseudo_cost == doctest::Approx(r.true_cost - p.lost_sales * d).epsilon(1e-12));
        CHECK(r.obs.censored == (d >= r.obs.available));
        CHECK(r.obs.sale == std::min(d, r.obs.available));
        s = r.next;
    }
}

TEST_CASE("a lower base-stock level never holds more stock on the same demand path") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 200; ++rep) {
        InventoryEnv env(params_with_lead(static_cast<int>(gen() % 4)));
        const double hi = 3 * u(gen), lo = hi * u(gen);
        std::vector<double> d(100);
        for (auto& x : d) x = 3 * u(gen);
        auto a = drive(env, hi, d), b = drive(env, lo, d);
        for (std::size_t t = 0; t < d.size(); ++t) {
            CHECK(b.steps[t].observation.available <= a.steps[t].observation.available + 1e-12);
            CHECK(b.steps[t].observation.sale <= a.steps[t].observation.sale + 1e-12);
        }
    }
}

TEST_CASE("demand draws respect the atom and the support") {
    DemandModel m;
    RandomStream rng(StreamKey{1, 0, 0, 0});
    int zeros = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = m.draw(rng);
        CHECK(d >= 0.0);
        CHECK(d <= m.support);
        zeros += d == 0.0;
    }
    CHECK(zeros / double(n) == doctest::Approx(0.3).epsilon(0.03));

    m.tail = TailRule::truncate;
    m.dist = DemandDistribution::normal;
    m.a = 2.5;
    m.b = 1.0;
    for (int i = 0; i < 1000; ++i) {
        const double d = m.draw(rng);
        CHECK(d >= 0.0);
        CHECK(d <= m.support);
    }
}

TEST_CASE("normalized training costs stay in [0,1] on the policy box") {
    InvParams p = params_with_lead(2);
    p.policy_bound = 6;
    InventoryEnv env(p);
    for (double theta : {0.0, 1.0, 3.3, 6.0}) {
        RandomStream rng(StreamKey{2, 0, 0, 0});
        auto traj = rollout(env, PolicyParam{theta}, env.initial_state(), 2000, rng);
        for (const auto& st : traj.steps) {
            CHECK(st.observed_cost >= -1e-12);
            CHECK(st.observed_cost <= 1 + 1e-12);
        }
    }
}

TEST_CASE("bad parameters are configuration errors") {
    InvParams p;
    p.lead_time = 13;
    CHECK_THROWS_AS(InventoryEnv{p}, ConfigError);
    p.lead_time = 1;
    p.demand.zero_prob = 1.0;
    CHECK_THROWS_AS(InventoryEnv{p}, ConfigError);
}
