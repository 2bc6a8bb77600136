#include "iopea/iopea.hpp"

namespace iopea {

std::vector<double> axis_points(double upper, double r) {
    if (!(r > 0)) throw Error("bad-radius", "grid spacing must be positive");
    if (upper < 0) throw Error("bad-radius", "box bound must be nonnegative");
    std::vector<double> pts;
    // integer stepping avoids accumulated drift; the last cell may be shorter
    const auto cells = static_cast<std::int64_t>(std::floor(upper / r + 1e-9));
    // rounded so that e.g. 24 * 0.1 prints as 2.4
    for (std::int64_t i = 0; i <= cells; ++i) pts.push_back(std::round(static_cast<double>(i) * r * 1e12) / 1e12);
    if (upper - pts.back() > 1e-9 * std::max(1.0, upper)) pts.push_back(upper);
    else pts.back() = std::min(pts.back(), upper);
    return pts;
}

std::vector<PolicyParam> epsilon_net(std::span<const double> upper, double r) {
    std::vector<std::vector<double>> axes;
    for (double u : upper) axes.push_back(axis_points(u, r));
    std::vector<PolicyParam> out;
    if (axes.empty()) return out;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        std::vector<double> c(axes.size());
        for (std::size_t d = 0; d < axes.size(); ++d) c[d] = axes[d][idx[d]];
        out.emplace_back(std::move(c));
        std::size_t d = axes.size();
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
            if (d == 0) return out;
        }
    }
}

std::int64_t epoch_length(int k, int t_h, double alpha, double log_horizon) {
    const double n = std::pow(4.0, k) * t_h * log_horizon / alpha;
    return static_cast<std::int64_t>(std::ceil(n - 1e-9));
}

std::int64_t schedule_n_k(int k, const IopeaConfig& cfg) {
    return epoch_length(k, cfg.t_h, cfg.alpha, std::log(static_cast<double>(cfg.horizon)));
}

double beta_k(int k, std::int64_t n_k, std::size_t grid_size, int K, const IopeaConfig& cfg) {
    (void)k;
    const double an = cfg.alpha * static_cast<double>(n_k);
    const double lg = std::log(4.0 * static_cast<double>(grid_size) * K / cfg.delta);
    return cfg.beta_scale * (cfg.span / an + (cfg.span + 2.0) * std::sqrt(2.0 * lg / an));
}

int epoch_count(const IopeaConfig& cfg, std::size_t w) {
    std::int64_t used = 0;
    int k = 0;
    while (true) {
        std::int64_t next = used + static_cast<std::int64_t>(w) * schedule_n_k(k + 1, cfg);
        if (next > cfg.horizon) break;
        used = next;
        ++k;
    }
    return std::max(k, 1);
}

std::vector<std::size_t> eliminate(std::span<const std::size_t> active, std::span<const double> estimates,
                                   double beta) {
    if (active.empty()) throw Error("empty-active-set", "nothing to eliminate from");
    const double best = *std::min_element(estimates.begin(), estimates.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < active.size(); ++i)
        if (estimates[i] - best <= 2.0 * beta) out.push_back(active[i]);
    return out;
}

} // namespace iopea
