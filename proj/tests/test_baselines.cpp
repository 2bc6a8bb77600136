#include <doctest.h>

#include <cmath>

#include "iopea/baselines.hpp"
#include "iopea/env_inventory.hpp"
#include "toy_env.hpp"

using namespace iopea;

namespace {

IopeaConfig cfg_for(std::int64_t T, double c_beta = 0.1) {
    IopeaConfig c;
    c.horizon = T;
    c.delta = 0.1;
    c.span = 1;
    c.beta_scale = c_beta;
    return c;
}

} // namespace

TEST_CASE("random with a single policy is just that policy") {
    toy::ConstantEnv env;
    std::vector<PolicyParam> grid{PolicyParam{0.4}};
    auto r = run_random(env, grid, cfg_for(1000), StreamKey{1, 0, 0, 0});
    CHECK(r.ledger.timesteps == 1000);
    CHECK(r.ledger.total_true_cost == doctest::Approx(400));
    CHECK(r.final_policy == grid[0]);

    auto t = run_trivial_elimination(env, grid, cfg_for(1000), StreamKey{1, 0, 0, 0});
    CHECK(t.ledger.total_true_cost == doctest::Approx(r.ledger.total_true_cost));

    auto e = run_full_feedback_erm(env, grid, cfg_for(1000), StreamKey{1, 0, 0, 0});
    CHECK(e.ledger.total_true_cost == doctest::Approx(400));
}

TEST_CASE("random averages the grid") {
    toy::ConstantEnv env;
    std::vector<PolicyParam> grid{PolicyParam{0.2}, PolicyParam{0.8}};
    double mean = 0;
    const int seeds = 400;
    for (int s = 0; s < seeds; ++s) {
        auto r = run_random(env, grid, cfg_for(5000), StreamKey{static_cast<std::uint64_t>(s), 0, 0, 0});
        mean += r.ledger.total_true_cost / r.ledger.timesteps / seeds;
    }
    CHECK(mean == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("baselines are reproducible from the key") {
    InventoryEnv env(InvParams{});
    auto grid = env.policy_grid(0.5);
    auto a = run_random(env, grid, cfg_for(5000), StreamKey{4, 2, 0, 0});
    auto b = run_random(env, grid, cfg_for(5000), StreamKey{4, 2, 0, 0});
    CHECK(a.ledger.total_true_cost == b.ledger.total_true_cost);
    CHECK(a.final_policy == b.final_policy);
    auto c = run_full_feedback_erm(env, grid, cfg_for(5000), StreamKey{4, 2, 0, 0});
    auto d = run_full_feedback_erm(env, grid, cfg_for(5000), StreamKey{4, 2, 0, 0});
    CHECK(c.ledger.total_true_cost == d.ledger.total_true_cost);
}

TEST_CASE("trivial elimination drops a policy with a gap beyond 2 beta_1") {
    toy::ConstantEnv env;
    std::vector<PolicyParam> grid{PolicyParam{0.1}, PolicyParam{0.9}};
    auto cfg = cfg_for(5000, 0.05);
    const int K = epoch_count(cfg, 2);
    REQUIRE(2 * beta_k(1, schedule_n_k(1, cfg), 2, K, cfg) < 0.8);
    auto io = trivial_order<toy::ConstantEnv>(grid);
    auto r = run(env, io, cfg, StreamKey{1, 0, 0, 0}, {}, 2);
    CHECK(r.history[0].survivors == std::vector<std::size_t>{0});
    auto b = run_trivial_elimination(env, grid, cfg, StreamKey{1, 0, 0, 0});
    CHECK(b.final_policy == PolicyParam{0.1});
}

TEST_CASE("epoch one costs w N_1 steps without sharing, N_1 with a chain") {
    toy::ConstantEnv env{0.2};
    auto grid = env.policy_grid(0.25);   // 5 policies
    auto cfg = cfg_for(100000, 0.5);
    auto flat = run(env, trivial_order<toy::ConstantEnv>(grid), cfg, StreamKey{1, 0, 0, 0});
    auto chain = run(env, env.information_order(grid), cfg, StreamKey{1, 0, 0, 0});
    CHECK(flat.history[0].steps_used == 5 * schedule_n_k(1, cfg));
    CHECK(chain.history[0].steps_used == schedule_n_k(1, cfg));
}

TEST_CASE("ERM on a deterministic env switches to the argmin after epoch one") {
    toy::ConstantEnv env;
    env.center = 0.6;
    auto grid = env.policy_grid(0.1);
    auto cfg = cfg_for(20000);
    auto r = run_full_feedback_erm(env, grid, cfg, StreamKey{1, 0, 0, 0});
    CHECK(r.final_policy == PolicyParam{0.6});
    CHECK(r.ledger.timesteps == 20000);
    // theta = 0 for epoch one, zero cost afterwards
    CHECK(r.ledger.total_true_cost == doctest::Approx(0.6 * schedule_n_k(1, cfg)));
}

TEST_CASE("ERM's hindsight evaluation matches the censored replay") {
    InvParams p;
    p.lead_time = 2;
    InventoryEnv env(p);
    RandomStream rng(StreamKey{8, 0, 0, 0});
    std::vector<double> exo(3000);
    for (auto& x : exo) x = env.draw_exogenous(rng);
    InvTrajectory played;
    played.start_state = env.initial_state();
    played.policy = PolicyParam{2.5};
    auto s = played.start_state;
    for (double d : exo) {
        played.steps.push_back(env.step(s, env.policy_action(played.policy, s), d));
        s = played.steps.back().state_after;
    }
    double mean_d = 0;
    for (double d : exo) mean_d += d / exo.size();
    for (double tp : {0.0, 0.7, 1.9, 2.5}) {
        const double hindsight = hindsight::true_gain_on(env, PolicyParam{tp}, std::span<const double>(exo));
        CHECK(hindsight - p.lost_sales * mean_d == doctest::Approx(replay_counterfactual(tp, played, p)).epsilon(1e-9));
    }
}

TEST_CASE("ERM needs a view of the exogenous inputs") {
    toy::OpaqueEnv env;
    static_assert(!hindsight::has_view<toy::OpaqueEnv>());
    static_assert(hindsight::has_view<InventoryEnv>());
    try {
        run_full_feedback_erm(env, env.policy_grid(0.5), cfg_for(100), StreamKey{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "no-full-feedback");
    }
}

TEST_CASE("every baseline spends the budget exactly") {
    InventoryEnv env(InvParams{});
    auto grid = env.policy_grid(0.5);
    for (std::int64_t T : {50, 999, 12345}) {
        CHECK(run_random(env, grid, cfg_for(T), StreamKey{1, 0, 0, 0}).ledger.timesteps == T);
        CHECK(run_trivial_elimination(env, grid, cfg_for(T), StreamKey{1, 0, 0, 0}).ledger.timesteps == T);
        CHECK(run_full_feedback_erm(env, grid, cfg_for(T), StreamKey{1, 0, 0, 0}).ledger.timesteps == T);
    }
}
