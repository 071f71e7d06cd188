#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeca/errors.hpp"
#include "treeca/mod_matrix.hpp"
#include "treeca/modmath.hpp"
#include "treeca/reversibility.hpp"
#include "treeca/rule.hpp"

namespace treeca {

struct OrbitSummary {
    std::uint64_t transient;    // steps before the orbit enters its cycle
    std::uint64_t period;       // minimal cycle length
    std::uint64_t steps_taken;  // evolve applications performed until detection

    bool operator==(const OrbitSummary&) const = default;
};

/**
 * Forward iteration with full-history hashing: every configuration maps to
 * its first-seen step; the first repeat at steps (i, j) yields transient i
 * and period j - i, both minimal. Hash hits are confirmed by comparison.
 * Memory grows as steps * node_count.
 */
inline std::optional<OrbitSummary> orbit(const Configuration& start, const LinearRule& rule,
                                         std::uint64_t max_steps) {
    if (max_steps < 1) throw Error("max_steps must be at least 1");
    require_compatible(start, rule);

    std::vector<std::vector<std::uint32_t>> history;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> steps_by_hash;
    const auto hash_of = [](std::span<const std::uint32_t> sym) {
        return fnv1a64(reinterpret_cast<const unsigned char*>(sym.data()),
                       sym.size() * sizeof(std::uint32_t));
    };
    const auto lookup = [&](std::span<const std::uint32_t> sym) -> std::optional<std::uint64_t> {
        auto it = steps_by_hash.find(hash_of(sym));
        if (it == steps_by_hash.end()) return std::nullopt;
        for (std::uint64_t step : it->second) {
            if (history[step].size() == sym.size() &&
                std::equal(sym.begin(), sym.end(), history[step].begin())) {
                return step;
            }
        }
        return std::nullopt;
    };
    const auto record = [&](std::span<const std::uint32_t> sym) {
        steps_by_hash[hash_of(sym)].push_back(history.size());
        history.emplace_back(sym.begin(), sym.end());
    };

    record(start.symbols());
    Configuration current = start;
    for (std::uint64_t step = 1; step <= max_steps; ++step) {
        current = evolve(current, rule);
        if (auto seen = lookup(current.symbols())) {
            return OrbitSummary{*seen, step - *seen, step};
        }
        record(current.symbols());
    }
    return std::nullopt;
}

namespace detail {

using RuleShapeKey = std::tuple<std::uint32_t, std::uint32_t, std::vector<std::uint32_t>, int, int>;

inline std::mutex inverse_cache_mutex;
inline std::map<RuleShapeKey, std::shared_ptr<const ModMatrix>> inverse_cache;

// One inverse per (rule, shape); computed under the lock so concurrent
// callers see it exactly once.
inline std::shared_ptr<const ModMatrix> cached_inverse(const LinearRule& rule,
                                                       const TreeShape& shape) {
    RuleShapeKey key{rule.modulus(), rule.center(), rule.child_coeffs(), shape.arity(),
                     shape.height()};
    std::lock_guard<std::mutex> lock(inverse_cache_mutex);
    auto it = inverse_cache.find(key);
    if (it != inverse_cache.end()) return it->second;
    auto inv = std::make_shared<const ModMatrix>(invert_mod(build_matrix(rule, shape)));
    inverse_cache.emplace(std::move(key), inv);
    return inv;
}

}  // namespace detail

/// The unique s with evolve(s) = t; requires a reversible rule on this shape.
inline Configuration preimage(const Configuration& t, const LinearRule& rule) {
    require_compatible(t, rule);
    const ReversibilityReport report = det_formula(rule, t.shape());
    if (!report.reversible) {
        throw NotReversible("rule is not reversible on this shape: gcd(det, m) = " +
                            std::to_string(report.det_gcd));
    }
    const auto inverse = detail::cached_inverse(rule, t.shape());
    return Configuration(t.shape(), rule.modulus(), matvec(*inverse, t.symbols()));
}

/**
 * Eventual behaviour of the whole map via its matrix: minimal (r, s) with
 * T^{r+s} = T^r. Every orbit has transient <= r and period dividing s.
 */
inline std::optional<MatrixOrder> global_period(const LinearRule& rule, const TreeShape& shape,
                                                std::uint64_t max_steps) {
    return matrix_order(build_matrix(rule, shape), max_steps);
}

}  // namespace treeca
