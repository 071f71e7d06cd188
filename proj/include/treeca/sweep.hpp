#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "treeca/mod_matrix.hpp"
#include "treeca/reversibility.hpp"
#include "treeca/rule.hpp"
#include "treeca/tree.hpp"

namespace treeca {

enum class SweepCriteria { none, p2, p3, pow2 };

struct SweepOptions {
    std::uint32_t m_lo = 2, m_hi = 2;
    int d_lo = 2, d_hi = 2;
    int n_lo = 2, n_hi = 2;
    std::uint64_t max_tuples = 100000;  // per (m, d, n) cell; sampled beyond
    std::uint64_t seed = 0;
    std::uint64_t oracle_cap = 1024;    // skip the dense oracle above this node count
    SweepCriteria criteria = SweepCriteria::none;
    std::uint64_t node_cap = default_node_cap;
};

struct SweepRow {
    std::uint32_t m;
    int d;
    int n;
    std::uint32_t b;
    std::vector<std::uint32_t> c;
    std::uint32_t formula_det;
    std::optional<std::uint32_t> oracle_det;  // absent when the cell is over the oracle cap
    bool reversible;
    std::optional<std::string> criteria_verdict;
    bool criteria_mismatch = false;
    bool agree = true;  // oracle absent, or formula == oracle
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::uint64_t total = 0;
    std::uint64_t disagreements = 0;
    std::uint64_t criteria_mismatches = 0;
};

namespace detail {

inline bool criteria_applies(SweepCriteria criteria, std::uint32_t m, int d, int n, int& log2_n) {
    switch (criteria) {
        case SweepCriteria::none:
            return false;
        case SweepCriteria::p2:
            return m == 2 && d == 2;
        case SweepCriteria::p3:
            return m == 3 && d == 2;
        case SweepCriteria::pow2: {
            if (d != 2 || !is_prime(m) || m % 2 == 0) return false;
            if ((static_cast<std::uint64_t>(n) & (static_cast<std::uint64_t>(n) - 1)) != 0) {
                return false;
            }
            log2_n = 0;
            for (int t = n; t > 1; t >>= 1) ++log2_n;
            return log2_n >= 1;
        }
    }
    return false;
}

}  // namespace detail

/**
 * Formula-vs-oracle comparison over coefficient space: one row per
 * (m, d, n, b, c) tuple, exhaustive up to max_tuples per cell and seeded
 * random sampling beyond. Row order is deterministic.
 */
inline SweepResult run_sweep(const SweepOptions& opt) {
    SweepResult result;
    for (std::uint32_t m = opt.m_lo; m <= opt.m_hi; ++m) {
        for (int d = opt.d_lo; d <= opt.d_hi; ++d) {
            for (int n = opt.n_lo; n <= opt.n_hi; ++n) {
                const TreeShape shape(d, n, opt.node_cap);
                const auto count = shape.checked_node_count();
                const bool run_oracle = count && *count <= opt.oracle_cap &&
                                        *count <= opt.node_cap;
                int log2_n = 0;
                const bool with_criteria =
                    detail::criteria_applies(opt.criteria, m, d, n, log2_n);

                // d + 1 coefficients, m choices each
                double cell_size_estimate = 1.0;
                for (int i = 0; i <= d; ++i) cell_size_estimate *= m;
                const bool exhaustive =
                    cell_size_estimate <= static_cast<double>(opt.max_tuples);
                std::uint64_t cell_tuples = exhaustive
                                                ? static_cast<std::uint64_t>(cell_size_estimate)
                                                : opt.max_tuples;
                std::mt19937_64 rng(opt.seed);

                std::vector<std::uint32_t> coeffs(static_cast<std::size_t>(d) + 1, 0);
                for (std::uint64_t tuple = 0; tuple < cell_tuples; ++tuple) {
                    if (!exhaustive) {
                        for (auto& x : coeffs) {
                            x = static_cast<std::uint32_t>(rng() % m);
                        }
                    }
                    SweepRow row{};
                    row.m = m;
                    row.d = d;
                    row.n = n;
                    row.b = coeffs[0];
                    row.c.assign(coeffs.begin() + 1, coeffs.end());
                    const LinearRule rule(m, row.b, row.c);
                    row.formula_det = det_formula(rule, shape).det;
                    row.reversible =
                        std::gcd<std::uint64_t>(row.formula_det, m) == 1;
                    if (run_oracle) {
                        row.oracle_det = det_exact_mod(build_matrix(rule, shape));
                        row.agree = *row.oracle_det == row.formula_det;
                    }
                    if (with_criteria) {
                        CriterionVerdict v = opt.criteria == SweepCriteria::p2
                                                 ? criterion_mod2(rule, n)
                                                 : opt.criteria == SweepCriteria::p3
                                                       ? criterion_mod3(rule, n)
                                                       : criterion_pow2(rule, log2_n, m);
                        row.criteria_mismatch = !v.matches_formula.value_or(true);
                        row.criteria_verdict =
                            std::string(v.reversible ? "reversible" : "irreversible") +
                            (row.criteria_mismatch ? "(mismatch)" : "");
                    }
                    if (!row.agree) ++result.disagreements;
                    if (row.criteria_mismatch) ++result.criteria_mismatches;
                    ++result.total;
                    result.rows.push_back(std::move(row));

                    if (exhaustive) {
                        // odometer over (b, c_1, ..., c_d)
                        for (std::size_t pos = coeffs.size(); pos-- > 0;) {
                            if (++coeffs[pos] < m) break;
                            coeffs[pos] = 0;
                        }
                    }
                }
            }
        }
    }
    return result;
}

inline void write_csv(const SweepResult& result, std::ostream& out, bool with_criteria_count) {
    out << "m,d,n,b,c,det_formula,det_oracle,reversible,criteria_verdict,agree\n";
    for (const SweepRow& row : result.rows) {
        out << row.m << ',' << row.d << ',' << row.n << ',' << row.b << ',';
        for (std::size_t i = 0; i < row.c.size(); ++i) {
            if (i != 0) out << ';';
            out << row.c[i];
        }
        out << ',' << row.formula_det << ',';
        if (row.oracle_det) out << *row.oracle_det;
        out << ',' << (row.reversible ? 1 : 0) << ',';
        if (row.criteria_verdict) out << *row.criteria_verdict;
        out << ',' << (row.agree ? 1 : 0) << '\n';
    }
    out << "TOTAL=" << result.total << ", DISAGREE=" << result.disagreements;
    if (with_criteria_count) out << ", CRITERIA_MISMATCH=" << result.criteria_mismatches;
    out << '\n';
}

}  // namespace treeca
