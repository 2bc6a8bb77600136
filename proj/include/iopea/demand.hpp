#pragma once

#include <string>

#include "iopea/random.hpp"

namespace iopea {

enum class DemandDistribution { exponential, normal, uniform };

// How a continuous draw beyond the support is brought back into (0, U_d].
enum class TailRule { clamp, truncate };

// D = 0 with probability gamma, otherwise a draw from the named
// distribution restricted to [0, support].
//   exponential: a = mean
//   normal:      a = mean, b = standard deviation
//   uniform:     on [a, b]
struct DemandModel {
    double zero_prob = 0.3;
    DemandDistribution dist = DemandDistribution::exponential;
    double a = 1.0;
    double b = 0.0;
    double support = 3.0;
    TailRule tail = TailRule::clamp;

    double draw(RandomStream& rng) const;
    void validate() const;
};

DemandDistribution parse_distribution(const std::string& name);
TailRule parse_tail_rule(const std::string& name);
std::string to_string(DemandDistribution d);

} // namespace iopea
