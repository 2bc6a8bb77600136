#include "iopea/order.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace iopea {

PolicyOrder::PolicyOrder(std::vector<PolicyParam> ground, Relation leq, OrderKind kind, double alpha, HorizonFn t_h)
    : ground_(std::move(ground)), leq_(std::move(leq)), kind_(kind), alpha_(alpha), t_h_(std::move(t_h)) {
    std::sort(ground_.begin(), ground_.end());
    ground_.erase(std::unique(ground_.begin(), ground_.end()), ground_.end());
    for (std::size_t i = 0; i < ground_.size(); ++i) index_.emplace(ground_[i], i);
    if (!(alpha_ > 0 && alpha_ <= 1)) throw Error("bad-order", "alpha must lie in (0,1]");
    if (kind_ == OrderKind::sample_path) {
        if (alpha_ != 1.0) throw Error("bad-order", "sample-path orders have alpha = 1");
        for (double d : {0.5, 0.1, 0.01, 1e-6})
            if (this->t_h(d) != 1) throw Error("bad-order", "sample-path orders have t_h = 1");
    }
}

bool PolicyOrder::leq(const PolicyParam& a, const PolicyParam& b) const {
    return leq(index_of(a), index_of(b));
}

std::size_t PolicyOrder::index_of(const PolicyParam& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) throw Error("unknown-policy", "(" + format_coords(p) + ") is not in the grid");
    return it->second;
}

PolicyOrder chain_order(std::vector<PolicyParam> ground) {
    return PolicyOrder(std::move(ground), [](const PolicyParam& a, const PolicyParam& b) { return a <= b; });
}

PolicyOrder discrete_order(std::vector<PolicyParam> ground) {
    return PolicyOrder(std::move(ground), [](const PolicyParam& a, const PolicyParam& b) { return a == b; });
}

PolicyOrder product_order(std::vector<PolicyParam> ground) {
    return PolicyOrder(std::move(ground), [](const PolicyParam& a, const PolicyParam& b) {
        for (std::size_t i = 0; i < a.dim(); ++i)
            if (a[i] > b[i]) return false;
        return true;
    });
}

std::vector<std::size_t> maximal_set(const PolicyOrder& order, std::span<const std::size_t> active) {
    if (active.empty()) throw Error("empty-active-set", "maximal_set of an empty set");
    std::vector<std::size_t> sorted(active.begin(), active.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> out;
    for (std::size_t a : sorted) {
        bool dominated = false;
        for (std::size_t b : sorted) {
            if (a != b && order.leq(a, b)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(a);
    }
    return out;
}

std::vector<PolicyParam> maximal_set(const PolicyOrder& order, const std::vector<PolicyParam>& active) {
    std::vector<std::size_t> idx;
    idx.reserve(active.size());
    for (const auto& p : active) idx.push_back(order.index_of(p));
    std::vector<PolicyParam> out;
    for (std::size_t i : maximal_set(order, idx)) out.push_back(order.at(i));
    return out;
}

namespace {

// Hopcroft-Karp on the bipartite graph left i -> right j whenever i < j
// strictly in the order. Returns match_left (npos if unmatched).
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> strict_matching(const PolicyOrder& order, std::size_t cap) {
    const std::size_t n = order.size();
    if (n > cap) throw Error("poset-too-large", std::to_string(n) + " elements exceed the cap of " + std::to_string(cap));

    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && order.leq(i, j)) adj[i].push_back(static_cast<std::uint32_t>(j));

    std::vector<std::size_t> match_l(n, npos), match_r(n, npos), dist(n);

    auto bfs = [&]() {
        std::queue<std::size_t> q;
        bool found = false;
        for (std::size_t u = 0; u < n; ++u) {
            if (match_l[u] == npos) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = npos;
            }
        }
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (std::size_t v : adj[u]) {
                std::size_t w = match_r[v];
                if (w == npos) {
                    found = true;
                } else if (dist[w] == npos) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    };

    // iterative DFS would be nicer for huge chains; recursion depth is bounded
    // by the layered distance, which stays small in practice
    auto dfs = [&](auto&& self, std::size_t u) -> bool {
        for (std::size_t v : adj[u]) {
            std::size_t w = match_r[v];
            if (w == npos || (dist[w] == dist[u] + 1 && self(self, w))) {
                match_l[u] = v;
                match_r[v] = u;
                return true;
            }
        }
        dist[u] = npos;
        return false;
    };

    // greedy start: chains of comparable neighbours get matched immediately
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : adj[u])
            if (match_r[v] == npos) {
                match_l[u] = v;
                match_r[v] = u;
                break;
            }

    while (bfs())
        for (std::size_t u = 0; u < n; ++u)
            if (match_l[u] == npos) dfs(dfs, u);
    return match_l;
}

} // namespace

std::size_t width(const PolicyOrder& order, std::size_t cap) {
    auto match = strict_matching(order, cap);
    std::size_t matched = std::count_if(match.begin(), match.end(), [](std::size_t m) { return m != npos; });
    return order.size() - matched;
}

std::vector<std::vector<std::size_t>> chain_cover(const PolicyOrder& order, std::size_t cap) {
    auto match = strict_matching(order, cap);
    const std::size_t n = order.size();
    std::vector<bool> has_pred(n, false);
    for (std::size_t u = 0; u < n; ++u)
        if (match[u] != npos) has_pred[match[u]] = true;
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t u = 0; u < n; ++u) {
        if (has_pred[u]) continue;
        std::vector<std::size_t> chain;
        for (std::size_t v = u; v != npos; v = match[v]) chain.push_back(v);
        chains.push_back(std::move(chain));
    }
    return chains;
}

EstimatorAssignment assign_estimators(const PolicyOrder& order, std::span<const std::size_t> active,
                                      std::span<const std::size_t> maxima) {
    std::vector<std::size_t> canon(maxima.begin(), maxima.end());
    std::sort(canon.begin(), canon.end());
    EstimatorAssignment out;
    out.active.assign(active.begin(), active.end());
    out.owner.reserve(active.size());
    for (std::size_t a : active) {
        auto it = std::find_if(canon.begin(), canon.end(), [&](std::size_t m) { return order.leq(a, m); });
        if (it == canon.end())
            throw Error("order-violated", "(" + format_coords(order.at(a)) + ") is below no maximal element");
        out.owner.push_back(*it);
    }
    return out;
}

bool is_partial_order(const PolicyOrder& order) {
    const std::size_t n = order.size();
    std::vector<char> rel(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rel[i * n + j] = order.leq(i, j);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rel[i * n + i]) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && rel[i * n + j] && rel[j * n + i]) return false;
            if (!rel[i * n + j]) continue;
            for (std::size_t k = 0; k < n; ++k)
                if (rel[j * n + k] && !rel[i * n + k]) return false;
        }
    }
    return true;
}

} // namespace iopea
