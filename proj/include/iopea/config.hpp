#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "iopea/env_dualsource.hpp"
#include "iopea/env_inventory.hpp"
#include "iopea/env_queue.hpp"
#include "iopea/iopea.hpp"

namespace iopea {

enum class EnvKind { inventory, dual_sourcing, queue };
enum class Algorithm { iopea, random, trivial, erm };

std::string to_string(EnvKind e);
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct ExperimentConfig {
    std::string name = "experiment";
    EnvKind env = EnvKind::inventory;
    Algorithm algorithm = Algorithm::iopea;

    InvParams inventory;
    DsParams dual;
    QueueParams queue;

    // horizon, delta, radius, beta_scale, radius_rule, restart cap; span /
    // alpha / t_h are filled in from the environment
    IopeaConfig iopea;

    int replicates = 20;
    std::uint64_t seed = 1;
    double baseline_radius = 0.1;   // grid spacing for random / trivial / ERM
    double oracle_radius = 0.1;     // grid spacing for the g* search
    std::int64_t eval_horizon = 1'000'000;
    int eval_seeds = 20;
    double downsample = 1.2;
    int threads = 0;                // 0 = hardware concurrency
    std::string out = "results/experiment";

    void validate() const;
};

// "key = value" lines, '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

using AnyEnv = std::variant<InventoryEnv, DualSourcingEnv, QueueEnv>;

AnyEnv make_env(const ExperimentConfig& cfg);

} // namespace iopea
