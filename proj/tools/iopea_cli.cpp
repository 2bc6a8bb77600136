// Command line front end: run / sweep / oracle / width.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iopea/harness.hpp"

using namespace iopea;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    std::optional<double> downsample;
    std::string out;
};

ExperimentConfig load_with(const std::string& path, const Overrides& o) {
    auto cfg = load_config(path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.replicates) cfg.replicates = *o.replicates;
    if (o.downsample) cfg.downsample = *o.downsample;
    if (!o.out.empty()) cfg.out = o.out;
    cfg.validate();
    return cfg;
}

void print_summary(const ExperimentSummary& s, const std::string& out) {
    std::printf("%s [%s/%s] g*=%.4f final=%.4f +- %.4f gap=%.2f%% slope=%s -> %s.{csv,json}\n", s.name.c_str(),
                s.env.c_str(), s.algorithm.c_str(), s.optimum.gain, s.mean_final_gain, s.final_gain_se,
                100 * s.relative_gap,
                s.median_regret_slope ? format_double(*s.median_regret_slope).c_str() : "n/a", out.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Policy elimination benchmark harness"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config;
    std::vector<std::string> configs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", ov.seed, "base seed");
        sub->add_option("--replicates", ov.replicates, "number of replicates");
        sub->add_option("--downsample", ov.downsample, "geometric row spacing factor (> 1)");
        sub->add_option("--out", ov.out, "output prefix (writes PREFIX.csv and PREFIX.json)");
    };

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    run_cmd->add_option("--config", config, "config file")->required();
    add_common(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run several experiments in turn");
    sweep_cmd->add_option("--config", configs, "config files")->required();
    add_common(sweep_cmd);

    auto* oracle_cmd = app.add_subcommand("oracle", "grid optimum only");
    oracle_cmd->add_option("--config", config, "config file")->required();
    oracle_cmd->add_option("--seed", ov.seed, "base seed");

    auto* width_cmd = app.add_subcommand("width", "width of the information order on the config's grid");
    width_cmd->add_option("--config", config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            auto cfg = load_with(config, ov);
            print_summary(run_experiment(cfg), cfg.out);
        } else if (*sweep_cmd) {
            // --out acts as a directory prefix when sweeping
            for (const auto& path : configs) {
                auto o = ov;
                o.out.clear();
                auto cfg = load_with(path, o);
                if (!ov.out.empty()) cfg.out = ov.out + "/" + cfg.name;
                print_summary(run_experiment(cfg), cfg.out);
            }
        } else if (*oracle_cmd) {
            auto cfg = load_with(config, ov);
            auto opt = compute_grid_optimum(cfg);
            nlohmann::ordered_json j;
            j["name"] = cfg.name;
            j["theta_star"] = opt.theta.coords;
            j["g_star"] = opt.gain;
            j["g_star_se"] = opt.se;
            std::cout << j.dump(2) << "\n";
        } else if (*width_cmd) {
            auto cfg = load_config(config);
            auto env = make_env(cfg);
            std::visit(
                [&](const auto& e) {
                    const auto icfg = resolve_iopea_config(e, cfg.iopea);
                    auto io = make_information_order(e, e.policy_grid(icfg.grid_radius()), cfg.iopea.radius_rule);
                    std::printf("grid %zu policies, width %zu\n", io.order.size(), width(io.order));
                },
                env);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
