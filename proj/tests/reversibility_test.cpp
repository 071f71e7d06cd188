#include <doctest.h>

#include <gmpxx.h>

#include <random>
#include <vector>

#include "treeca/reversibility.hpp"
#include "treeca/sweep.hpp"

using namespace treeca;

namespace {

// the explicit alternating sum (-1)^{n-3} * sum_{j=0}^{n-2} (-1)^j c^{n-2-j} b^j
mpz_class alpha_numerator_by_sum(std::int64_t b, std::int64_t c, int n) {
    mpz_class acc = 0;
    for (int j = 0; j <= n - 2; ++j) {
        mpz_class cp = c, bp = b;
        mpz_pow_ui(cp.get_mpz_t(), cp.get_mpz_t(), static_cast<unsigned long>(n - 2 - j));
        mpz_pow_ui(bp.get_mpz_t(), bp.get_mpz_t(), static_cast<unsigned long>(j));
        mpz_class term = cp * bp;
        if (j % 2 == 1) term = -term;
        acc += term;
    }
    if ((n - 3) % 2 != 0) acc = -acc;
    return acc;
}

std::uint32_t brute_force_g(std::uint32_t b, std::uint32_t x, std::uint64_t n,
                            std::uint32_t m) {
    // term-by-term sum, no Horner
    std::uint64_t acc = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        std::uint64_t term = mul_mod(pow_mod(b, k, m), pow_mod(x, n - 1 - k, m), m);
        if (k % 2 == 1) term = (m - term) % m;
        acc = (acc + term) % m;
    }
    return static_cast<std::uint32_t>(acc);
}

}  // namespace

TEST_CASE("g_eval") {
    SUBCASE("x = b with even degree count cancels") {
        for (std::uint32_t m : {3u, 5u, 7u}) {
            for (std::uint32_t b = 1; b < m; ++b) {
                CHECK(g_eval(b, b, 4, m) == 0);
                CHECK(g_eval(b, b, 10, m) == 0);
            }
        }
    }
    CHECK(g_eval(1, 1, 5, 3) == 1);
    CHECK(g_eval(1, 0, 4, 7) == 6);
    CHECK(g_eval(1, 0, 6, 5) == 4);
    SUBCASE("matches the term-by-term sum") {
        std::mt19937_64 rng(3);
        for (int rep = 0; rep < 200; ++rep) {
            const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng() % 30);
            const std::uint32_t b = static_cast<std::uint32_t>(rng() % m);
            const std::uint32_t x = static_cast<std::uint32_t>(rng() % m);
            const std::uint64_t n = 2 + rng() % 12;
            REQUIRE(g_eval(b, x, n, m) == brute_force_g(b, x, n, m));
        }
    }
}

TEST_CASE("det_exponent") {
    CHECK(det_exponent(TreeShape(2, 3)) == 4);
    CHECK(det_exponent(TreeShape(2, 2)) == 1);
    CHECK(det_exponent(TreeShape(3, 3)) == 10);
    // 2^1024 - 1 - 1024 has 1024 bits; only the exact integer survives
    const mpz_class e = det_exponent(TreeShape(2, 1024));
    CHECK(mpz_sizeinbase(e.get_mpz_t(), 2) == 1024);
}

TEST_CASE("det_formula examples") {
    SUBCASE("binary height 3 over Z_2") {
        const auto r = det_formula(LinearRule(2, 1, {1, 1}), TreeShape(2, 3));
        CHECK(r.det == 1);
        CHECK(r.reversible);
        CHECK(r.decided_by == DecisionPath::formula);
    }
    SUBCASE("b = 0 kills the determinant") {
        for (std::uint32_t m : {2u, 5u, 6u}) {
            const auto r = det_formula(LinearRule(m, 0, {1, 1}), TreeShape(2, 4));
            CHECK(r.det == 0);
            CHECK(!r.reversible);
        }
    }
    SUBCASE("b + K = 0 mod 3 is irreversible at every height") {
        for (int n : {2, 3, 5, 9}) {
            const auto r = det_formula(LinearRule(3, 1, {1, 1}), TreeShape(2, n));
            CHECK(r.factor_bc == 0);
            CHECK(r.det == 0);
            CHECK(!r.reversible);
        }
    }
    SUBCASE("heights far past the oracle") {
        const auto r = det_formula(LinearRule(7, 1, {1, 0}), TreeShape(2, 1024));
        CHECK(!r.reversible);  // K = b makes g vanish at even heights
        const auto r2 = det_formula(LinearRule(7, 1, {2, 0}), TreeShape(2, 1024));
        CHECK(r2.reversible);
    }
}

TEST_CASE("report factors multiply to the determinant") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 300; ++rep) {
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng() % 11);
        const int d = 2 + static_cast<int>(rng() % 3);
        const int n = 2 + static_cast<int>(rng() % 7);
        std::vector<std::uint32_t> c(static_cast<std::size_t>(d));
        for (auto& x : c) x = static_cast<std::uint32_t>(rng() % m);
        const auto r = det_formula(LinearRule(m, static_cast<std::uint32_t>(rng() % m), c),
                                   TreeShape(d, n));
        std::uint64_t product = mul_mod(mul_mod(r.factor_bc, r.factor_bpow, m), r.factor_g, m);
        if (r.factor_sign < 0) product = (m - product) % m;
        REQUIRE(r.det == product);
        REQUIRE(r.reversible == (std::gcd<std::uint64_t>(r.det, m) == 1));
    }
}

TEST_CASE("formula equals the exact oracle on a small sweep") {
    for (std::uint32_t m : {2u, 3u, 5u}) {
        for (int d : {2, 3}) {
            for (int n : {2, 3}) {
                SweepOptions opt;
                opt.m_lo = opt.m_hi = m;
                opt.d_lo = opt.d_hi = d;
                opt.n_lo = opt.n_hi = n;
                const auto result = run_sweep(opt);
                REQUIRE(result.disagreements == 0);
                for (const auto& row : result.rows) REQUIRE(row.oracle_det.has_value());
            }
        }
    }
    SUBCASE("arity 3 at height 5: 121 x 121 matrices") {
        SweepOptions opt;
        opt.m_lo = 2;
        opt.m_hi = 3;
        opt.d_lo = opt.d_hi = 3;
        opt.n_lo = opt.n_hi = 5;
        const auto result = run_sweep(opt);
        CHECK(result.total == 16 + 81);
        REQUIRE(result.disagreements == 0);
    }
}

TEST_CASE("alpha numerator") {
    CHECK(alpha_numerator(3, 7, 3) == 4);     // c - b
    CHECK(alpha_numerator(1, 2, 4) == -3);
    CHECK(alpha_numerator(1, 1, 4) == -1);
    CHECK(alpha_numerator(1, 1, 5) == 0);
    CHECK_THROWS_AS(alpha_numerator(1, 1, 2), Error);
    SUBCASE("recurrence equals the closed-form sum") {
        for (std::int64_t b = -4; b <= 4; ++b) {
            for (std::int64_t c = -4; c <= 4; ++c) {
                for (int n = 3; n <= 24; ++n) {
                    REQUIRE(alpha_numerator(b, c, n) == alpha_numerator_by_sum(b, c, n));
                }
            }
        }
    }
}

TEST_CASE("exponent cycle") {
    const auto p7 = exponent_cycle(7);
    CHECK(p7.exponents == std::vector<std::uint32_t>{2, 4});
    CHECK(p7.gamma() == 2);
    const auto p29 = exponent_cycle(29);
    CHECK(p29.exponents == std::vector<std::uint32_t>{2, 4, 8, 16});
    CHECK(p29.gamma() == 4);
    const auto p3 = exponent_cycle(3);
    CHECK(p3.exponents == std::vector<std::uint32_t>{2});
    CHECK_THROWS_AS(exponent_cycle(2), CriterionDomain);
    CHECK_THROWS_AS(exponent_cycle(9), CriterionDomain);
    CHECK_THROWS_AS(exponent_cycle(15), CriterionDomain);
}

TEST_CASE("exponent cycle is sound: x^{2^k} = x^{e_k}") {
    for (std::uint32_t p : {5u, 7u, 13u, 17u, 29u, 41u}) {
        const auto cycle = exponent_cycle(p);
        const std::size_t k_max = 2 * cycle.gamma() + 4;
        for (std::uint32_t x = 1; x < p; ++x) {
            std::uint64_t sq = x;  // x^{2^k} by repeated squaring
            std::uint64_t power = 2 % (p - 1);
            for (std::size_t k = 1; k <= k_max; ++k) {
                sq = mul_mod(sq, sq, p);
                const std::uint32_t e =
                    static_cast<std::uint32_t>((power + p - 2) % (p - 1) + 1);
                REQUIRE(sq == pow_mod(x, e, p));
                power = power * 2 % (p - 1);
            }
        }
    }
}

TEST_CASE("criterion for m = 2") {
    CHECK(criterion_mod2(LinearRule(2, 1, {1, 1}), 5).reversible);
    CHECK(!criterion_mod2(LinearRule(2, 0, {1, 1}), 5).reversible);
    CHECK(!criterion_mod2(LinearRule(2, 1, {1, 0}), 5).reversible);
    CHECK_THROWS_AS(criterion_mod2(LinearRule(3, 1, {1, 1}), 5), CriterionDomain);
    CHECK_THROWS_AS(criterion_mod2(LinearRule(2, 1, {1, 1, 1}), 5), CriterionDomain);
    SUBCASE("agrees with the formula for every triple and height") {
        for (std::uint32_t b = 0; b < 2; ++b) {
            for (std::uint32_t c1 = 0; c1 < 2; ++c1) {
                for (std::uint32_t c2 = 0; c2 < 2; ++c2) {
                    for (int n = 2; n <= 10; ++n) {
                        const auto v = criterion_mod2(LinearRule(2, b, {c1, c2}), n);
                        REQUIRE(v.matches_formula == true);
                    }
                }
            }
        }
    }
}

TEST_CASE("criterion for m = 3") {
    CHECK(!criterion_mod3(LinearRule(3, 1, {1, 1}), 4).reversible);
    CHECK(criterion_mod3(LinearRule(3, 1, {0, 0}), 5).reversible);
    CHECK_THROWS_AS(criterion_mod3(LinearRule(5, 1, {1, 1}), 5), CriterionDomain);
    SUBCASE("the K = b disjunct diverges from the determinant at odd heights") {
        const auto v = criterion_mod3(LinearRule(3, 1, {1, 0}), 3);
        CHECK(!v.reversible);            // published condition fires
        CHECK(v.matches_formula == false);  // the determinant says otherwise
        CHECK(det_formula(LinearRule(3, 1, {1, 0}), TreeShape(2, 3)).det == 2);
    }
    SUBCASE("divergence happens exactly for K = b, b != 0, b + K != 0, odd n") {
        for (std::uint32_t b = 0; b < 3; ++b) {
            for (std::uint32_t c1 = 0; c1 < 3; ++c1) {
                for (std::uint32_t c2 = 0; c2 < 3; ++c2) {
                    for (int n = 2; n <= 8; ++n) {
                        const LinearRule rule(3, b, {c1, c2});
                        const auto v = criterion_mod3(rule, n);
                        const bool expected_mismatch = rule.coefficient_sum() == b && b != 0 &&
                                                       (b + rule.coefficient_sum()) % 3 != 0 &&
                                                       n % 2 == 1;
                        REQUIRE(v.matches_formula == !expected_mismatch);
                    }
                }
            }
        }
    }
}

TEST_CASE("criterion for heights 2^l") {
    SUBCASE("p = 7, l = 10: reversible iff K outside {1, 6}") {
        for (std::uint32_t k = 0; k < 7; ++k) {
            const auto v = criterion_pow2(LinearRule(7, 1, {k, 0}), 10, 7);
            CHECK(v.reversible == (k != 1 && k != 6));
        }
    }
    SUBCASE("condition lists match the published examples") {
        const auto v7 = criterion_pow2(LinearRule(7, 1, {3, 0}), 10, 7);
        CHECK(v7.exponents_checked == std::vector<std::uint64_t>{2, 4});
        const auto v29 = criterion_pow2(LinearRule(29, 1, {3, 0}), 10, 29);
        CHECK(v29.exponents_checked == std::vector<std::uint64_t>{2, 4, 8, 16});
    }
    SUBCASE("p = 5 = 2^2 + 1, l = 3, K = 2: K^2 + b^2 = 0") {
        const auto v = criterion_pow2(LinearRule(5, 1, {2, 0}), 3, 5);
        CHECK(!v.reversible);
        CHECK(g_eval(1, 2, 8, 5) == 0);
    }
    SUBCASE("p = 17, small l: fourth-power conditions must not leak in") {
        // 2^4 = -1 mod 17, but for l = 2 the only factor beyond (x - b) is x^2 + b^2
        const auto v = criterion_pow2(LinearRule(17, 1, {2, 0}), 2, 17);
        CHECK(v.reversible);
        CHECK(v.matches_formula == true);
    }
    SUBCASE("domain checks") {
        CHECK_THROWS_AS(criterion_pow2(LinearRule(6, 1, {1, 1}), 3, 6), CriterionDomain);
        CHECK_THROWS_AS(criterion_pow2(LinearRule(7, 1, {1, 1}), 0, 7), CriterionDomain);
        CHECK_THROWS_AS(criterion_pow2(LinearRule(7, 1, {1, 1, 1}), 3, 7), CriterionDomain);
        CHECK_THROWS_AS(criterion_pow2(LinearRule(7, 1, {1, 1}), 3, 5), CriterionDomain);
    }
    SUBCASE("cross-check against direct g evaluation holds on a sweep") {
        for (std::uint32_t p : {3u, 5u, 7u, 13u}) {
            for (int l = 1; l <= 6; ++l) {
                for (std::uint32_t b = 0; b < p; ++b) {
                    for (std::uint32_t k = 0; k < p; ++k) {
                        const auto v = criterion_pow2(LinearRule(p, b, {k, 0}), l, p);
                        REQUIRE(v.matches_formula == true);
                    }
                }
            }
        }
    }
}

TEST_CASE("is_reversible modes") {
    const TreeShape fig_shape(2, 5);
    SUBCASE("figure rules") {
        CHECK(is_reversible(LinearRule(2, 1, {1, 1}), fig_shape).reversible);
        CHECK(!is_reversible(LinearRule(3, 1, {1, 1}), fig_shape).reversible);
    }
    SUBCASE("formula and oracle agree and record their path") {
        const LinearRule rule(5, 2, {1, 1, 1});
        const TreeShape shape(3, 3);
        const auto f = is_reversible(rule, shape, CheckMode::formula);
        const auto o = is_reversible(rule, shape, CheckMode::oracle);
        CHECK(f.det == o.det);
        CHECK(f.decided_by == DecisionPath::formula);
        CHECK(o.decided_by == DecisionPath::oracle);
        CHECK(f.reversible == o.reversible);
    }
    SUBCASE("oracle mode respects the cap") {
        CHECK_THROWS_AS(is_reversible(LinearRule(2, 1, {1, 1}), TreeShape(2, 26),
                                      CheckMode::oracle),
                        TooLarge);
    }
    SUBCASE("automatic mode works past the oracle limit") {
        const auto r = is_reversible(LinearRule(2, 1, {0, 0}), TreeShape(2, 20));
        CHECK(r.reversible);
    }
    SUBCASE("composite moduli need a unit determinant") {
        // det = 5 mod 6: nonzero and a unit -> reversible
        CHECK(is_reversible(LinearRule(6, 5, {0, 0}), TreeShape(2, 2)).reversible);
        // det = 2 mod 6: nonzero but gcd 2 -> irreversible
        const auto r = is_reversible(LinearRule(6, 2, {3, 3}), TreeShape(2, 2));
        CHECK(r.det != 0);
        CHECK(r.det_gcd != 1);
        CHECK(!r.reversible);
    }
}
