#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "iopea/core.hpp"

namespace iopea {

enum class OrderKind { sample_path, distributional };

// Partial order over a finite policy grid. Elements are addressed by their
// index in the lexicographically sorted ground set; index order is the
// canonical order.
class PolicyOrder {
public:
    using Relation = std::function<bool(const PolicyParam&, const PolicyParam&)>;
    using HorizonFn = std::function<int(double)>;

    PolicyOrder(std::vector<PolicyParam> ground, Relation leq, OrderKind kind = OrderKind::sample_path,
                double alpha = 1.0, HorizonFn t_h = {});

    const std::vector<PolicyParam>& ground_set() const { return ground_; }
    std::size_t size() const { return ground_.size(); }
    OrderKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    int t_h(double delta) const { return t_h_ ? t_h_(delta) : 1; }

    bool leq(const PolicyParam& a, const PolicyParam& b) const;
    bool leq(std::size_t a, std::size_t b) const { return leq_(ground_[a], ground_[b]); }

    std::size_t index_of(const PolicyParam& p) const;  // throws unknown-policy
    const PolicyParam& at(std::size_t i) const { return ground_[i]; }

private:
    std::vector<PolicyParam> ground_;
    std::map<PolicyParam, std::size_t> index_;
    Relation leq_;
    OrderKind kind_;
    double alpha_;
    HorizonFn t_h_;
};

// Common relations.
PolicyOrder chain_order(std::vector<PolicyParam> ground);      // lexicographic total order
PolicyOrder discrete_order(std::vector<PolicyParam> ground);   // only a <= a
PolicyOrder product_order(std::vector<PolicyParam> ground);    // componentwise <=

// Maximal elements of `active` (indices), returned in canonical order.
std::vector<std::size_t> maximal_set(const PolicyOrder& order, std::span<const std::size_t> active);
std::vector<PolicyParam> maximal_set(const PolicyOrder& order, const std::vector<PolicyParam>& active);

inline constexpr std::size_t kWidthCap = 10000;

// Maximum antichain size via Dilworth: n minus a maximum matching in the
// strict-comparability bipartite graph.
std::size_t width(const PolicyOrder& order, std::size_t cap = kWidthCap);

// Minimum chain cover realized by the same matching (each chain listed
// bottom-up). Exposed for tests and the CLI.
std::vector<std::vector<std::size_t>> chain_cover(const PolicyOrder& order, std::size_t cap = kWidthCap);

// assignment[i] = maximal element responsible for active[i].
struct EstimatorAssignment {
    std::vector<std::size_t> active;
    std::vector<std::size_t> owner;
};

EstimatorAssignment assign_estimators(const PolicyOrder& order, std::span<const std::size_t> active,
                                      std::span<const std::size_t> maxima);

// Exhaustive check of reflexivity / antisymmetry / transitivity. O(n^3).
bool is_partial_order(const PolicyOrder& order);

} // namespace iopea
