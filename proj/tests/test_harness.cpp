#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "iopea/harness.hpp"
#include "toy_env.hpp"

using namespace iopea;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

std::vector<ResultRow> synthetic(auto regret_at) {
    std::vector<ResultRow> rows;
    for (double t = 1; t <= 1e6; t *= 1.2) {
        ResultRow r;
        r.timestep = static_cast<std::int64_t>(t);
        r.cum_regret = regret_at(static_cast<double>(r.timestep));
        rows.push_back(r);
    }
    return rows;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_inventory() {
    auto c = parse(R"(
env = inventory
lead_time = 2
policy_bound = 6
horizon = 20000
beta_scale = 0.0025
replicates = 2
eval_horizon = 2000
eval_seeds = 3
threads = 2
)");
    return c;
}

} // namespace

TEST_CASE("config parsing") {
    auto c = parse(R"(
# comment line
name = demo
env = queue          # trailing comment
algorithm = erm
horizon = 1e5
buffer = 3
power_cost = 0, 1, 4, 9
arrival_mode = fixed
radius_rule = union_bound
)");
    CHECK(c.name == "demo");
    CHECK(c.env == EnvKind::queue);
    CHECK(c.algorithm == Algorithm::erm);
    CHECK(c.iopea.horizon == 100000);
    CHECK(c.queue.buffer == 3);
    CHECK(c.queue.power_cost == std::vector<double>{0, 1, 4, 9});
    CHECK(c.queue.mode == ArrivalMode::fixed);
    CHECK(c.iopea.radius_rule == RadiusRule::union_bound);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("bogus = 1"), ConfigError);
    CHECK_THROWS_AS(parse("horizon = lots"), ConfigError);
    CHECK_THROWS_AS(parse("horizon = 10.5"), ConfigError);
    CHECK_THROWS_AS(parse("env = spaceship"), ConfigError);
    CHECK_THROWS_AS(parse("horizon 100"), ConfigError);
    CHECK_THROWS_AS(parse("demand = cauchy"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);

    CHECK_THROWS_AS(parse("replicates = 0"), ConfigError);
    CHECK_THROWS_AS(parse("delta = 1.5"), ConfigError);
    // power table still has four entries
    CHECK_THROWS_AS(parse("env = queue\na_max = 2"), ConfigError);
}

TEST_CASE("shipped configs load and build their environments") {
    for (const auto& entry : std::filesystem::directory_iterator(std::string(IOPEA_SOURCE_DIR) + "/configs")) {
        if (entry.path().extension() != ".cfg") continue;
        CAPTURE(entry.path().string());
        auto c = load_config(entry.path().string());
        c.validate();
        CHECK_NOTHROW(make_env(c));
    }
}

TEST_CASE("oracle gain basics") {
    toy::ConstantEnv env;
    const std::uint64_t seeds[] = {1, 2, 3};
    auto g = oracle_gain(env, PolicyParam{0.7}, 100, seeds);
    CHECK(g.mean == doctest::Approx(0.7));
    CHECK(g.se == 0.0);

    InventoryEnv inv(InvParams{});
    const std::uint64_t dup[] = {5, 5, 5};
    const std::uint64_t one[] = {5};
    auto a = oracle_gain(inv, PolicyParam{2.0}, 5000, dup);
    auto b = oracle_gain(inv, PolicyParam{2.0}, 5000, one);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.se == 0.0);

    CHECK_THROWS_AS(oracle_gain(env, PolicyParam{0.7}, 0, seeds), Error);
}

TEST_CASE("queue oracle agrees with the analytic plug-in") {
    QueueParams p;
    QueueEnv env(p);
    const auto seeds = oracle_seeds(1, 20);
    for (const PolicyParam theta : {PolicyParam{0, 3, 3}, PolicyParam{0, 1, 1}, PolicyParam{1, 2, 0}}) {
        auto g = oracle_gain(env, theta, 100000, seeds);
        CHECK(g.mean == doctest::Approx(plugin_gain(p.lambda, p.mu, theta, p)).epsilon(0.02));
    }
}

TEST_CASE("grid optimum") {
    toy::ConstantEnv env;
    env.center = 0.3;
    const std::uint64_t seeds[] = {1};
    auto one = grid_optimum(env, {PolicyParam{0.9}}, 10, seeds);
    CHECK(one.theta == PolicyParam{0.9});
    auto best = grid_optimum(env, env.policy_grid(0.1), 10, seeds);
    CHECK(best.theta == PolicyParam{0.3});
    // two exact ties: the lexicographically smaller wins
    env.center = 0.35;
    auto tie = grid_optimum(env, {PolicyParam{0.4}, PolicyParam{0.3}}, 10, seeds);
    CHECK(tie.theta == PolicyParam{0.3});
    CHECK_THROWS_AS(grid_optimum(env, {}, 10, seeds), Error);
}

TEST_CASE("benchmark optima") {
    auto inv = load_config(std::string(IOPEA_SOURCE_DIR) + "/configs/inventory_small_exp.cfg");
    auto g = compute_grid_optimum(inv);
    CHECK(g.gain == doctest::Approx(2.5).epsilon(0.2 / 2.5));

    auto q = load_config(std::string(IOPEA_SOURCE_DIR) + "/configs/queue_decaying.cfg");
    auto gq = compute_grid_optimum(q);
    CHECK(gq.gain == doctest::Approx(9.5).epsilon(0.5 / 9.5));
}

TEST_CASE("regret slope fits") {
    CHECK(regret_slope(synthetic([](double t) { return std::sqrt(t); })) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(regret_slope(synthetic([](double t) { return t; })) == doctest::Approx(1.0).epsilon(1e-9));
    std::mt19937_64 gen(4);
    std::normal_distribution<double> noise(0, 0.01);
    const double s = regret_slope(synthetic([&](double t) { return 3 * std::pow(t, 0.55) * (1 + noise(gen)); }));
    CHECK(std::abs(s - 0.55) <= 0.02);

    CHECK_THROWS_AS(regret_slope(synthetic([](double) { return 0.0; })), Error);
    std::vector<ResultRow> few(5);
    CHECK_THROWS_AS(regret_slope(few), Error);
}

TEST_CASE("CSV layout") {
    CHECK(std::string(kCsvHeader) ==
          "replicate,epoch,timestep,cum_true_cost,cum_regret,active_set_size,policy_coords,gain_estimate");
    ResultRow r{3, 2, 1500, 1234.5, -0.25, 7, "1.5;2", 0.1};
    CHECK(format_row(r) == "3,2,1500,1234.5,-0.25,7,1.5;2,0.1");
}

TEST_CASE("rows are geometric, end at T, and stay consistent") {
    auto cfg = tiny_inventory();
    auto out = run_experiment_in_memory(cfg);
    const double g = out.summary.optimum.gain;
    for (std::size_t i = 0; i < out.replicates.size(); ++i) {
        const auto& rows = out.replicates[i].rows;
        REQUIRE_FALSE(rows.empty());
        CHECK(rows.back().timestep == cfg.iopea.horizon);
        for (std::size_t j = 0; j + 1 < rows.size(); ++j) CHECK(rows[j].timestep < rows[j + 1].timestep);
        // summary regret recomputed from the raw rows
        const auto& last = rows.back();
        CHECK(out.summary.replicates[i].regret_T ==
              doctest::Approx(last.cum_true_cost - static_cast<double>(last.timestep) * g).epsilon(1e-9));
        CHECK(last.cum_regret == doctest::Approx(out.summary.replicates[i].regret_T).epsilon(1e-9));
        // trailing averages reassemble the total cost
        double total = 0;
        std::int64_t prev = 0;
        for (const auto& row : rows) {
            total += row.gain_estimate * static_cast<double>(row.timestep - prev);
            prev = row.timestep;
        }
        CHECK(total == doctest::Approx(last.cum_true_cost).epsilon(1e-9));
    }
}

TEST_CASE("outputs are byte-identical across reruns") {
    const auto dir = std::filesystem::temp_directory_path() / "iopea_harness_test";
    std::filesystem::remove_all(dir);
    auto cfg = tiny_inventory();
    cfg.out = (dir / "a" / "run").string();
    run_experiment(cfg);
    cfg.out = (dir / "b" / "run").string();
    cfg.threads = 1;
    run_experiment(cfg);
    const auto a_csv = slurp((dir / "a" / "run.csv").string());
    CHECK_FALSE(a_csv.empty());
    CHECK(a_csv == slurp((dir / "b" / "run.csv").string()));
    const auto a_json = slurp((dir / "a" / "run.json").string());
    CHECK(a_json == slurp((dir / "b" / "run.json").string()));

    auto j = nlohmann::json::parse(a_json);
    for (const char* key : {"algorithm", "env", "mean_final_gain", "relative_gap", "regret_slope_median", "seeds",
                            "g_star", "mean_regret_T"})
        CHECK(j.contains(key));
    CHECK(j["seeds"].size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("every algorithm runs through the harness") {
    for (auto alg : {Algorithm::iopea, Algorithm::random, Algorithm::trivial, Algorithm::erm}) {
        auto cfg = tiny_inventory();
        cfg.algorithm = alg;
        cfg.replicates = 1;
        auto out = run_experiment_in_memory(cfg);
        CHECK(out.replicates[0].ledger.timesteps == cfg.iopea.horizon);
    }
    for (auto env : {EnvKind::dual_sourcing, EnvKind::queue}) {
        auto cfg = tiny_inventory();
        cfg.env = env;
        cfg.replicates = 1;
        if (env == EnvKind::dual_sourcing) cfg.iopea.radius = 0.25;
        auto out = run_experiment_in_memory(cfg);
        CHECK(out.replicates[0].ledger.timesteps == cfg.iopea.horizon);
        CHECK(out.summary.width == 1);
    }
}
