#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "treeca/errors.hpp"
#include "treeca/tree.hpp"

namespace treeca {

/**
 * Linear local rule over Z_m: the next value of a cell is
 *     b * self + c_1 * child_1 + ... + c_d * child_d   (mod m).
 * Coefficients are stored reduced.
 */
class LinearRule {
public:
    LinearRule(std::uint32_t modulus, std::uint32_t center, std::vector<std::uint32_t> child_coeffs)
        : modulus_(modulus), center_(0), child_(std::move(child_coeffs)) {
        if (modulus_ < 2) throw Error("rule modulus must be at least 2");
        if (child_.size() < 2) throw Error("rule arity must be at least 2");
        center_ = center % modulus_;
        for (auto& c : child_) c %= modulus_;
    }

    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t center() const { return center_; }
    const std::vector<std::uint32_t>& child_coeffs() const { return child_; }
    int arity() const { return static_cast<int>(child_.size()); }

    /// K = c_1 + ... + c_d mod m, the weight every leaf feeds back to the root.
    std::uint32_t coefficient_sum() const {
        std::uint64_t k = 0;
        for (std::uint32_t c : child_) k += c;
        return static_cast<std::uint32_t>(k % modulus_);
    }

    bool operator==(const LinearRule&) const = default;

private:
    std::uint32_t modulus_;
    std::uint32_t center_;
    std::vector<std::uint32_t> child_;
};

/**
 * Assignment of a symbol in [0, m) to every node of a tree, stored in
 * breadth-first order: symbols()[i-1] is the value at node id i.
 * Immutable after construction.
 */
class Configuration {
public:
    Configuration(TreeShape shape, std::uint32_t modulus, std::vector<std::uint32_t> symbols)
        : shape_(std::move(shape)), modulus_(modulus), symbols_(std::move(symbols)) {
        if (modulus_ < 2) throw Error("configuration modulus must be at least 2");
        if (symbols_.size() != shape_.node_count()) {
            throw ShapeMismatch("configuration holds " + std::to_string(symbols_.size()) +
                                " symbols, tree has " + std::to_string(shape_.node_count()) +
                                " nodes");
        }
        for (std::uint32_t s : symbols_) {
            if (s >= modulus_) {
                throw Error("symbol " + std::to_string(s) + " outside [0, " +
                            std::to_string(modulus_) + ")");
            }
        }
    }

    static Configuration zeros(const TreeShape& shape, std::uint32_t modulus) {
        return Configuration(shape, modulus, std::vector<std::uint32_t>(shape.node_count(), 0));
    }

    const TreeShape& shape() const { return shape_; }
    std::uint32_t modulus() const { return modulus_; }
    std::span<const std::uint32_t> symbols() const { return symbols_; }
    std::uint32_t at(NodeId node) const {
        require_node(node, shape_);
        return symbols_[static_cast<std::size_t>(node - 1)];
    }

    bool operator==(const Configuration& other) const {
        return shape_ == other.shape_ && modulus_ == other.modulus_ &&
               symbols_ == other.symbols_;
    }

private:
    TreeShape shape_;
    std::uint32_t modulus_;
    std::vector<std::uint32_t> symbols_;
};

/// One application of the local rule to a cell value and its d child values.
inline std::uint32_t local_apply(const LinearRule& rule, std::uint32_t center_value,
                                 std::span<const std::uint32_t> child_values) {
    if (static_cast<int>(child_values.size()) != rule.arity()) {
        throw ArityMismatch("rule has arity " + std::to_string(rule.arity()) + ", got " +
                            std::to_string(child_values.size()) + " child values");
    }
    unsigned __int128 acc =
        static_cast<unsigned __int128>(rule.center()) * center_value;
    for (int k = 0; k < rule.arity(); ++k) {
        acc += static_cast<unsigned __int128>(rule.child_coeffs()[static_cast<std::size_t>(k)]) *
               child_values[static_cast<std::size_t>(k)];
    }
    return static_cast<std::uint32_t>(acc % rule.modulus());
}

inline void require_compatible(const Configuration& t, const LinearRule& rule) {
    if (rule.arity() != t.shape().arity()) {
        throw ShapeMismatch("rule arity " + std::to_string(rule.arity()) +
                            " does not match tree arity " + std::to_string(t.shape().arity()));
    }
    if (rule.modulus() != t.modulus()) {
        throw ShapeMismatch("rule modulus " + std::to_string(rule.modulus()) +
                            " does not match configuration modulus " +
                            std::to_string(t.modulus()));
    }
}

/**
 * One step of the global map under periodic boundary condition: an internal
 * node reads its children, a leaf reads the root in place of every missing
 * child, i.e. leaf -> b * leaf + K * root. Always out-of-place: every read
 * sees the input configuration.
 */
inline Configuration evolve(const Configuration& t, const LinearRule& rule) {
    require_compatible(t, rule);
    const TreeShape& shape = t.shape();
    const std::uint64_t count = shape.node_count();
    const std::uint64_t internal = shape.internal_count();
    const std::uint32_t m = rule.modulus();
    const int d = rule.arity();
    const auto& c = rule.child_coeffs();
    const auto sym = t.symbols();

    std::vector<std::uint32_t> out(count);
    for (std::uint64_t i = 1; i <= internal; ++i) {
        unsigned __int128 acc = static_cast<unsigned __int128>(rule.center()) * sym[i - 1];
        const std::uint64_t first_child = (i - 1) * static_cast<std::uint64_t>(d) + 2;
        for (int k = 0; k < d; ++k) {
            acc += static_cast<unsigned __int128>(c[static_cast<std::size_t>(k)]) *
                   sym[first_child - 1 + static_cast<std::uint64_t>(k)];
        }
        out[i - 1] = static_cast<std::uint32_t>(acc % m);
    }
    const std::uint32_t k_sum = rule.coefficient_sum();
    const std::uint32_t root = sym[0];
    for (std::uint64_t i = internal + 1; i <= count; ++i) {
        const std::uint64_t acc = static_cast<std::uint64_t>(rule.center()) * sym[i - 1] +
                                  static_cast<std::uint64_t>(k_sum) * root;
        out[i - 1] = static_cast<std::uint32_t>(acc % m);
    }
    return Configuration(shape, m, std::move(out));
}

/**
 * True when every internal node's child subtrees carry identical patterns,
 * equivalently when the symbol depends only on the depth of the node.
 */
inline bool is_sibling_symmetric(const Configuration& t) {
    const TreeShape& shape = t.shape();
    const auto sym = t.symbols();
    for (int level = 1; level < shape.height(); ++level) {
        const std::uint64_t offset = shape.level_offset(level);
        const std::uint64_t size = shape.level_size(level);
        for (std::uint64_t q = 1; q < size; ++q) {
            if (sym[offset + q] != sym[offset]) return false;
        }
    }
    return true;
}

// Text format shared with the CLI:
//   line 1:  m d n
//   line 2:  node_count symbols in breadth-first order, whitespace separated

inline Configuration parse_configuration(std::istream& in,
                                         std::uint64_t node_cap = default_node_cap) {
    long long m = 0, d = 0, n = 0;
    if (!(in >> m >> d >> n)) throw ParseError("configuration header must be: m d n");
    if (m < 2 || m > 0xFFFFFFFFll) throw ParseError("modulus " + std::to_string(m) + " out of range");
    if (d < 2 || n < 2 || d > 0x7FFFFFFFll || n > 0x7FFFFFFFll) {
        throw ParseError("bad tree shape d=" + std::to_string(d) + " n=" + std::to_string(n));
    }
    TreeShape shape(static_cast<int>(d), static_cast<int>(n), node_cap);
    const std::uint64_t count = shape.node_count();
    std::vector<std::uint32_t> symbols;
    symbols.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        long long s = 0;
        if (!(in >> s)) {
            throw ParseError("expected " + std::to_string(count) + " symbols, got " +
                             std::to_string(i));
        }
        if (s < 0 || s >= m) {
            throw ParseError("symbol " + std::to_string(s) + " outside [0, " +
                             std::to_string(m) + ")");
        }
        symbols.push_back(static_cast<std::uint32_t>(s));
    }
    std::string rest;
    if (in >> rest) throw ParseError("trailing data after " + std::to_string(count) + " symbols");
    return Configuration(std::move(shape), static_cast<std::uint32_t>(m), std::move(symbols));
}

inline Configuration parse_configuration(const std::string& text,
                                         std::uint64_t node_cap = default_node_cap) {
    std::istringstream in(text);
    return parse_configuration(in, node_cap);
}

inline void write_configuration(const Configuration& t, std::ostream& out) {
    out << t.modulus() << ' ' << t.shape().arity() << ' ' << t.shape().height() << '\n';
    const auto sym = t.symbols();
    for (std::size_t i = 0; i < sym.size(); ++i) {
        if (i != 0) out << ' ';
        out << sym[i];
    }
    out << '\n';
}

inline std::string to_text(const Configuration& t) {
    std::ostringstream out;
    write_configuration(t, out);
    return out.str();
}

}  // namespace treeca
