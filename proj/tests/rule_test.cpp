#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "treeca/mod_matrix.hpp"
#include "treeca/rule.hpp"

using namespace treeca;

namespace {

Configuration random_configuration(const TreeShape& shape, std::uint32_t m,
                                   std::mt19937_64& rng) {
    std::vector<std::uint32_t> sym(shape.node_count());
    for (auto& s : sym) s = static_cast<std::uint32_t>(rng() % m);
    return Configuration(shape, m, std::move(sym));
}

// direct reading of the sibling-symmetry definition: all child subtrees of
// every internal node carry the same pattern
bool subtrees_equal(const Configuration& t, NodeId a, NodeId b) {
    if (t.at(a) != t.at(b)) return false;
    if (is_leaf(a, t.shape())) return true;
    const auto ca = children(a, t.shape());
    const auto cb = children(b, t.shape());
    for (std::size_t k = 0; k < ca.size(); ++k) {
        if (!subtrees_equal(t, ca[k], cb[k])) return false;
    }
    return true;
}

bool sibling_symmetric_by_definition(const Configuration& t) {
    for (NodeId i = 1; i <= t.shape().internal_count(); ++i) {
        const auto kids = children(i, t.shape());
        for (std::size_t k = 1; k < kids.size(); ++k) {
            if (!subtrees_equal(t, kids[0], kids[k])) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("rule construction reduces and validates") {
    LinearRule rule(5, 7, {6, 11});
    CHECK(rule.center() == 2);
    CHECK(rule.child_coeffs() == std::vector<std::uint32_t>{1, 1});
    CHECK(rule.coefficient_sum() == 2);
    CHECK_THROWS_AS(LinearRule(1, 0, {0, 0}), Error);
    CHECK_THROWS_AS(LinearRule(3, 1, {1}), Error);
}

TEST_CASE("local_apply examples") {
    LinearRule fig1(3, 1, {1, 1});
    CHECK(local_apply(fig1, 1, std::vector<std::uint32_t>{1, 1}) == 0);
    CHECK(local_apply(fig1, 0, std::vector<std::uint32_t>{0, 0}) == 0);
    LinearRule other(5, 2, {1, 0});
    CHECK(local_apply(other, 3, std::vector<std::uint32_t>{4, 1}) == 0);
    CHECK_THROWS_AS(local_apply(other, 1, std::vector<std::uint32_t>{1, 2, 3}), ArityMismatch);
}

TEST_CASE("evolve fixes zero and the (1,0,0) point") {
    TreeShape shape(2, 2);
    LinearRule rule(2, 1, {1, 1});
    const auto zero = Configuration::zeros(shape, 2);
    CHECK(evolve(zero, rule) == zero);
    const Configuration t(shape, 2, {1, 0, 0});
    CHECK(evolve(t, rule) == t);
}

TEST_CASE("evolve validates rule against configuration") {
    const auto t = Configuration::zeros(TreeShape(2, 2), 2);
    CHECK_THROWS_AS(evolve(t, LinearRule(3, 1, {1, 1})), ShapeMismatch);
    CHECK_THROWS_AS(evolve(t, LinearRule(2, 1, {1, 1, 1})), ShapeMismatch);
}

TEST_CASE("evolve equals multiplication by the update matrix") {
    std::mt19937_64 rng(7);
    for (std::uint32_t m : {2u, 3u, 5u, 6u}) {
        for (int d : {2, 3}) {
            for (int n : {2, 3, d == 2 ? 6 : 4}) {
                TreeShape shape(d, n);
                std::vector<std::uint32_t> c(static_cast<std::size_t>(d));
                for (auto& x : c) x = static_cast<std::uint32_t>(rng() % m);
                LinearRule rule(m, static_cast<std::uint32_t>(rng() % m), c);
                const auto mat = build_matrix(rule, shape);
                for (int rep = 0; rep < 25; ++rep) {
                    const auto t = random_configuration(shape, m, rng);
                    const auto direct = evolve(t, rule);
                    const auto via_matrix = matvec(mat, t.symbols());
                    REQUIRE(std::vector<std::uint32_t>(direct.symbols().begin(),
                                                       direct.symbols().end()) == via_matrix);
                }
            }
        }
    }
}

TEST_CASE("evolve is linear") {
    std::mt19937_64 rng(11);
    TreeShape shape(2, 4);
    for (std::uint32_t m : {3u, 5u, 7u}) {
        LinearRule rule(m, static_cast<std::uint32_t>(rng() % m),
                        {static_cast<std::uint32_t>(rng() % m),
                         static_cast<std::uint32_t>(rng() % m)});
        for (int rep = 0; rep < 20; ++rep) {
            const auto t1 = random_configuration(shape, m, rng);
            const auto t2 = random_configuration(shape, m, rng);
            const std::uint32_t a = static_cast<std::uint32_t>(rng() % m);
            std::vector<std::uint32_t> combo(shape.node_count());
            for (std::size_t i = 0; i < combo.size(); ++i) {
                combo[i] = (a * t1.symbols()[i] + t2.symbols()[i]) % m;
            }
            const auto lhs = evolve(Configuration(shape, m, combo), rule);
            const auto e1 = evolve(t1, rule);
            const auto e2 = evolve(t2, rule);
            for (std::size_t i = 0; i < combo.size(); ++i) {
                REQUIRE(lhs.symbols()[i] == (a * e1.symbols()[i] + e2.symbols()[i]) % m);
            }
        }
    }
}

TEST_CASE("sibling symmetry examples") {
    TreeShape shape(2, 2);
    CHECK(is_sibling_symmetric(Configuration::zeros(shape, 2)));
    CHECK(is_sibling_symmetric(Configuration(shape, 2, {1, 1, 1})));
    CHECK(!is_sibling_symmetric(Configuration(shape, 2, {1, 1, 0})));
}

TEST_CASE("sibling symmetry matches the subtree definition") {
    std::mt19937_64 rng(23);
    for (int d : {2, 3}) {
        TreeShape shape(d, 4);
        for (int rep = 0; rep < 200; ++rep) {
            // half the samples forced depth-constant so both outcomes occur
            Configuration t = random_configuration(shape, 3, rng);
            if (rep % 2 == 0) {
                std::vector<std::uint32_t> sym(shape.node_count());
                for (int level = 0; level < shape.height(); ++level) {
                    const auto v = static_cast<std::uint32_t>(rng() % 3);
                    for (std::uint64_t q = 0; q < shape.level_size(level); ++q) {
                        sym[shape.level_offset(level) + q] = v;
                    }
                }
                t = Configuration(shape, 3, std::move(sym));
            }
            REQUIRE(is_sibling_symmetric(t) == sibling_symmetric_by_definition(t));
        }
    }
}

TEST_CASE("equal child coefficients preserve sibling symmetry") {
    std::mt19937_64 rng(31);
    for (int d : {2, 3}) {
        TreeShape shape(d, 4);
        LinearRule rule(5, 2, std::vector<std::uint32_t>(static_cast<std::size_t>(d), 3));
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<std::uint32_t> sym(shape.node_count());
            for (int level = 0; level < shape.height(); ++level) {
                const auto v = static_cast<std::uint32_t>(rng() % 5);
                for (std::uint64_t q = 0; q < shape.level_size(level); ++q) {
                    sym[shape.level_offset(level) + q] = v;
                }
            }
            Configuration t(shape, 5, std::move(sym));
            REQUIRE(is_sibling_symmetric(t));
            REQUIRE(is_sibling_symmetric(evolve(t, rule)));
        }
    }
}

TEST_CASE("configuration text round trip") {
    const std::string text = "3 2 3\n0 1 2 0 1 2 1\n";
    const auto t = parse_configuration(text);
    CHECK(t.modulus() == 3);
    CHECK(t.shape().arity() == 2);
    CHECK(t.shape().height() == 3);
    CHECK(t.at(7) == 1);
    CHECK(to_text(t) == text);
    CHECK(parse_configuration(to_text(t)) == t);
}

TEST_CASE("configuration parser rejections") {
    CHECK_THROWS_AS(parse_configuration(std::string("nonsense")), ParseError);
    CHECK_THROWS_AS(parse_configuration(std::string("1 2 2\n0 0 0\n")), ParseError);
    CHECK_THROWS_AS(parse_configuration(std::string("2 2 2\n0 0\n")), ParseError);
    CHECK_THROWS_AS(parse_configuration(std::string("2 2 2\n0 0 2\n")), ParseError);
    CHECK_THROWS_AS(parse_configuration(std::string("2 2 2\n0 0 -1\n")), ParseError);
    CHECK_THROWS_AS(parse_configuration(std::string("2 2 2\n0 0 0 0\n")), ParseError);
}
