#include "iopea/demand.hpp"

#include <algorithm>

#include "iopea/error.hpp"

namespace iopea {

namespace {

double raw_draw(const DemandModel& m, RandomStream& rng) {
    switch (m.dist) {
    case DemandDistribution::exponential: return rng.exponential(m.a);
    case DemandDistribution::normal: return rng.normal(m.a, m.b);
    case DemandDistribution::uniform: return m.a + (m.b - m.a) * rng.uniform();
    }
    return 0;
}

} // namespace

double DemandModel::draw(RandomStream& rng) const {
    // the atom is decided first so the number of uniforms consumed before the
    // continuous part is fixed
    if (rng.uniform() < zero_prob) return 0.0;
    double x = raw_draw(*this, rng);
    if (tail == TailRule::truncate) {
        for (int tries = 0; (x <= 0.0 || x > support) && tries < 10000; ++tries) x = raw_draw(*this, rng);
    }
    return std::clamp(x, 0.0, support);
}

void DemandModel::validate() const {
    if (!(zero_prob > 0 && zero_prob < 1)) throw ConfigError("demand zero probability must lie in (0,1)");
    if (!(support > 0)) throw ConfigError("demand support must be positive");
    if (dist == DemandDistribution::exponential && !(a > 0)) throw ConfigError("exponential demand mean must be positive");
    if (dist == DemandDistribution::normal && !(b > 0)) throw ConfigError("normal demand sd must be positive");
    if (dist == DemandDistribution::uniform && !(b > a)) throw ConfigError("uniform demand needs a < b");
}

DemandDistribution parse_distribution(const std::string& name) {
    if (name == "exponential" || name == "exp") return DemandDistribution::exponential;
    if (name == "normal") return DemandDistribution::normal;
    if (name == "uniform") return DemandDistribution::uniform;
    throw ConfigError("unknown demand distribution '" + name + "'");
}

TailRule parse_tail_rule(const std::string& name) {
    if (name == "clamp") return TailRule::clamp;
    if (name == "truncate") return TailRule::truncate;
    throw ConfigError("unknown demand tail rule '" + name + "'");
}

std::string to_string(DemandDistribution d) {
    switch (d) {
    case DemandDistribution::exponential: return "exponential";
    case DemandDistribution::normal: return "normal";
    case DemandDistribution::uniform: return "uniform";
    }
    return "?";
}

} // namespace iopea
