#include "iopea/core.hpp"

#include <cstdio>

namespace iopea {

std::string format_coords(const PolicyParam& p) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < p.dim(); ++i) {
        if (i) out += ';';
        std::snprintf(buf, sizeof buf, "%.6g", p[i]);
        out += buf;
    }
    return out;
}

double mean_cost(std::span<const double> costs) {
    if (costs.empty()) throw Error("empty-trajectory", "mean of no costs");
    double sum = 0;
    for (double c : costs) sum += c;
    return sum / static_cast<double>(costs.size());
}

} // namespace iopea
