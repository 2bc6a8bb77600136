#include "iopea/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace iopea {

std::string to_string(EnvKind e) {
    switch (e) {
    case EnvKind::inventory: return "inventory";
    case EnvKind::dual_sourcing: return "dual_sourcing";
    case EnvKind::queue: return "queue";
    }
    return "?";
}

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::iopea: return "iopea";
    case Algorithm::random: return "random";
    case Algorithm::trivial: return "trivial";
    case Algorithm::erm: return "erm";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "iopea") return Algorithm::iopea;
    if (s == "random") return Algorithm::random;
    if (s == "trivial") return Algorithm::trivial;
    if (s == "erm") return Algorithm::erm;
    throw ConfigError("unknown algorithm '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    // accept 1e5-style integers, common in horizons
    const double x = to_double(key, v);
    const auto i = static_cast<std::int64_t>(x);
    if (static_cast<double>(i) != x) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return i;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto num = [&t](const std::string& k, auto apply) {
            t[k] = [apply](ExperimentConfig& c, const std::string& key, const std::string& v) { apply(c, to_double(key, v)); };
        };
        auto integer = [&t](const std::string& k, auto apply) {
            t[k] = [apply](ExperimentConfig& c, const std::string& key, const std::string& v) { apply(c, to_int(key, v)); };
        };
        t["name"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.name = v; };
        t["out"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["env"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            if (v == "inventory") c.env = EnvKind::inventory;
            else if (v == "dual_sourcing") c.env = EnvKind::dual_sourcing;
            else if (v == "queue") c.env = EnvKind::queue;
            else throw ConfigError("unknown env '" + v + "'");
        };
        t["algorithm"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.algorithm = parse_algorithm(v);
        };

        // run / algorithm
        integer("horizon", [](ExperimentConfig& c, std::int64_t v) { c.iopea.horizon = v; });
        integer("replicates", [](ExperimentConfig& c, std::int64_t v) { c.replicates = static_cast<int>(v); });
        integer("seed", [](ExperimentConfig& c, std::int64_t v) { c.seed = static_cast<std::uint64_t>(v); });
        integer("threads", [](ExperimentConfig& c, std::int64_t v) { c.threads = static_cast<int>(v); });
        num("delta", [](ExperimentConfig& c, double v) { c.iopea.delta = v; });
        num("radius", [](ExperimentConfig& c, double v) { c.iopea.radius = v; });
        num("beta_scale", [](ExperimentConfig& c, double v) { c.iopea.beta_scale = v; });
        num("restart_cap_factor", [](ExperimentConfig& c, double v) { c.iopea.restart_cap_factor = v; });
        t["radius_rule"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            if (v == "plugin") c.iopea.radius_rule = RadiusRule::plugin;
            else if (v == "union_bound") c.iopea.radius_rule = RadiusRule::union_bound;
            else throw ConfigError("unknown radius_rule '" + v + "'");
        };
        num("span", [](ExperimentConfig& c, double v) {
            c.inventory.span = v;
            c.dual.span = v;
            c.queue.span = v;
        });
        integer("t_h", [](ExperimentConfig& c, std::int64_t v) { c.dual.t_h = static_cast<int>(v); });
        num("baseline_radius", [](ExperimentConfig& c, double v) { c.baseline_radius = v; });
        num("oracle_radius", [](ExperimentConfig& c, double v) { c.oracle_radius = v; });
        integer("eval_horizon", [](ExperimentConfig& c, std::int64_t v) { c.eval_horizon = v; });
        integer("eval_seeds", [](ExperimentConfig& c, std::int64_t v) { c.eval_seeds = static_cast<int>(v); });
        num("downsample", [](ExperimentConfig& c, double v) { c.downsample = v; });

        // inventory + dual sourcing share the cost and demand fields
        num("holding", [](ExperimentConfig& c, double v) { c.inventory.holding = c.dual.holding = v; });
        num("lost_sales", [](ExperimentConfig& c, double v) { c.inventory.lost_sales = c.dual.lost_sales = v; });
        num("policy_bound", [](ExperimentConfig& c, double v) { c.inventory.policy_bound = c.dual.policy_bound = v; });
        num("zero_prob", [](ExperimentConfig& c, double v) { c.inventory.demand.zero_prob = c.dual.demand.zero_prob = v; });
        t["demand"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.inventory.demand.dist = c.dual.demand.dist = parse_distribution(v);
        };
        num("demand_a", [](ExperimentConfig& c, double v) { c.inventory.demand.a = c.dual.demand.a = v; });
        num("demand_b", [](ExperimentConfig& c, double v) { c.inventory.demand.b = c.dual.demand.b = v; });
        num("demand_support", [](ExperimentConfig& c, double v) { c.inventory.demand.support = c.dual.demand.support = v; });
        t["demand_tail"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.inventory.demand.tail = c.dual.demand.tail = parse_tail_rule(v);
        };
        integer("lead_time", [](ExperimentConfig& c, std::int64_t v) { c.inventory.lead_time = static_cast<int>(v); });
        integer("regular_lead", [](ExperimentConfig& c, std::int64_t v) { c.dual.regular_lead = static_cast<int>(v); });
        integer("expedited_lead", [](ExperimentConfig& c, std::int64_t v) { c.dual.expedited_lead = static_cast<int>(v); });
        num("regular_cost", [](ExperimentConfig& c, double v) { c.dual.regular_cost = v; });
        num("expedited_cost", [](ExperimentConfig& c, double v) { c.dual.expedited_cost = v; });

        // queue
        integer("buffer", [](ExperimentConfig& c, std::int64_t v) { c.queue.buffer = static_cast<int>(v); });
        num("lambda", [](ExperimentConfig& c, double v) { c.queue.lambda = v; });
        num("mu", [](ExperimentConfig& c, double v) { c.queue.mu = v; });
        num("lambda_max", [](ExperimentConfig& c, double v) { c.queue.lambda_max = v; });
        num("mu_max", [](ExperimentConfig& c, double v) { c.queue.mu_max = v; });
        integer("a_max", [](ExperimentConfig& c, std::int64_t v) { c.queue.a_max = static_cast<int>(v); });
        t["power_cost"] = [](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.queue.power_cost = to_list(key, v);
        };
        num("deadline_penalty", [](ExperimentConfig& c, double v) { c.queue.deadline_penalty = v; });
        t["arrival_mode"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            if (v == "decaying") c.queue.mode = ArrivalMode::decaying;
            else if (v == "fixed") c.queue.mode = ArrivalMode::fixed;
            else throw ConfigError("unknown arrival_mode '" + v + "'");
        };
        num("uniformization", [](ExperimentConfig& c, double v) { c.queue.uniformization = v; });
        return t;
    }();
    return table;
}

} // namespace

void ExperimentConfig::validate() const {
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (iopea.horizon < 3) throw ConfigError("horizon must be at least 3");
    if (!(iopea.delta > 0 && iopea.delta < 1)) throw ConfigError("delta must lie in (0,1)");
    if (iopea.radius < 0) throw ConfigError("radius must be nonnegative (0 = horizon^-1/2)");
    if (!(iopea.beta_scale >= 0)) throw ConfigError("beta_scale must be nonnegative");
    if (!(baseline_radius > 0) || !(oracle_radius > 0)) throw ConfigError("grid radii must be positive");
    if (eval_horizon < 1 || eval_seeds < 1) throw ConfigError("eval_horizon and eval_seeds must be positive");
    if (!(downsample > 1)) throw ConfigError("downsample factor must exceed 1");
    if (out.empty()) throw ConfigError("out must not be empty");
    switch (env) {
    case EnvKind::inventory: inventory.validate(); break;
    case EnvKind::dual_sourcing: dual.validate(); break;
    case EnvKind::queue: queue.validate(); break;
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(f, path);
}

AnyEnv make_env(const ExperimentConfig& cfg) {
    switch (cfg.env) {
    case EnvKind::inventory: return InventoryEnv(cfg.inventory);
    case EnvKind::dual_sourcing: return DualSourcingEnv(cfg.dual);
    case EnvKind::queue: return QueueEnv(cfg.queue);
    }
    throw ConfigError("unknown environment");
}

} // namespace iopea
