#include <doctest.h>

#include <sstream>

#include "treeca/sweep.hpp"

using namespace treeca;

TEST_CASE("exhaustive sweep covers every coefficient tuple") {
    SweepOptions opt;
    opt.m_lo = 2;
    opt.m_hi = 3;
    opt.n_lo = 2;
    opt.n_hi = 3;
    const auto result = run_sweep(opt);
    CHECK(result.total == (8 + 27) * 2);
    CHECK(result.disagreements == 0);
    CHECK(result.rows.front().m == 2);
    CHECK(result.rows.front().b == 0);
    CHECK(result.rows.front().c == std::vector<std::uint32_t>{0, 0});
    for (const auto& row : result.rows) {
        REQUIRE(row.oracle_det.has_value());
        REQUIRE(row.agree);
    }
}

TEST_CASE("tuple budget switches to seeded sampling") {
    SweepOptions opt;
    opt.m_lo = opt.m_hi = 5;
    opt.n_lo = opt.n_hi = 3;
    opt.max_tuples = 10;
    const auto a = run_sweep(opt);
    const auto b = run_sweep(opt);
    CHECK(a.total == 10);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].b == b.rows[i].b);
        CHECK(a.rows[i].c == b.rows[i].c);
    }
    opt.seed = 1;
    const auto c = run_sweep(opt);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        any_difference = any_difference || a.rows[i].b != c.rows[i].b || a.rows[i].c != c.rows[i].c;
    }
    CHECK(any_difference);
}

TEST_CASE("oracle cap marks rows instead of failing") {
    SweepOptions opt;
    opt.m_lo = opt.m_hi = 2;
    opt.n_lo = 2;
    opt.n_hi = 5;
    opt.oracle_cap = 7;  // heights 4 and 5 are over the cap
    const auto result = run_sweep(opt);
    for (const auto& row : result.rows) {
        REQUIRE(row.oracle_det.has_value() == (row.n <= 3));
        REQUIRE(row.agree);
    }
}

TEST_CASE("p3 criteria column flags the documented divergence") {
    SweepOptions opt;
    opt.m_lo = opt.m_hi = 3;
    opt.n_lo = opt.n_hi = 3;
    opt.criteria = SweepCriteria::p3;
    const auto result = run_sweep(opt);
    CHECK(result.disagreements == 0);
    CHECK(result.criteria_mismatches == 6);  // K = b, b != 0, b+K != 0 at odd n: 2 * 3 tuples
    for (const auto& row : result.rows) {
        const LinearRule rule(3, row.b, row.c);
        const bool expect_mismatch =
            rule.coefficient_sum() == row.b && row.b != 0 && (row.b + rule.coefficient_sum()) % 3 != 0;
        REQUIRE(row.criteria_verdict.has_value());
        REQUIRE(row.criteria_mismatch == expect_mismatch);
        if (expect_mismatch) {
            REQUIRE(*row.criteria_verdict == "irreversible(mismatch)");
        }
    }
}

TEST_CASE("csv schema is stable") {
    SweepOptions opt;
    opt.m_lo = opt.m_hi = 2;
    opt.n_lo = opt.n_hi = 2;
    const auto result = run_sweep(opt);
    std::ostringstream out;
    write_csv(result, out, false);
    const std::string text = out.str();
    CHECK(text.rfind("m,d,n,b,c,det_formula,det_oracle,reversible,criteria_verdict,agree\n", 0) ==
          0);
    CHECK(text.find("\nTOTAL=8, DISAGREE=0\n") != std::string::npos);
    CHECK(text.find("2,2,2,0,0;0,") != std::string::npos);
}
