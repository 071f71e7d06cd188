#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeca/errors.hpp"
#include "treeca/modmath.hpp"
#include "treeca/rule.hpp"
#include "treeca/tree.hpp"

namespace treeca {

/// Dense square matrix of residues mod m. Row-major, 0-based accessors;
/// callers working in 1-based node ids convert at this boundary.
class ModMatrix {
public:
    ModMatrix(std::uint32_t modulus, std::size_t dim)
        : modulus_(modulus), dim_(dim), entries_(dim * dim, 0) {
        if (modulus_ < 2) throw Error("matrix modulus must be at least 2");
        if (dim_ == 0) throw Error("matrix dimension must be positive");
    }

    static ModMatrix identity(std::uint32_t modulus, std::size_t dim) {
        ModMatrix out(modulus, dim);
        for (std::size_t i = 0; i < dim; ++i) out.set(i, i, 1 % modulus);
        return out;
    }

    std::uint32_t modulus() const { return modulus_; }
    std::size_t dim() const { return dim_; }

    std::uint32_t at(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    void set(std::size_t row, std::size_t col, std::uint64_t value) {
        entries_[row * dim_ + col] = static_cast<std::uint32_t>(value % modulus_);
    }
    void add_at(std::size_t row, std::size_t col, std::uint64_t value) {
        set(row, col, entries_[row * dim_ + col] + (value % modulus_));
    }

    std::span<const std::uint32_t> entries() const { return entries_; }

    bool operator==(const ModMatrix&) const = default;

private:
    std::uint32_t modulus_;
    std::size_t dim_;
    std::vector<std::uint32_t> entries_;
};

/**
 * Matrix of one global step in the breadth-first basis: b on the diagonal,
 * c_k at (i, (i-1)d + k + 1) for internal node i, and K = sum c_k at (i, 1)
 * for every leaf i (the periodic boundary feeding leaves from the root).
 */
inline ModMatrix build_matrix(const LinearRule& rule, const TreeShape& shape) {
    if (rule.arity() != shape.arity()) {
        throw ShapeMismatch("rule arity " + std::to_string(rule.arity()) +
                            " does not match tree arity " + std::to_string(shape.arity()));
    }
    const std::uint64_t count = shape.node_count();  // throws TooLarge past the cap
    const std::uint64_t internal = shape.internal_count();
    const int d = shape.arity();
    ModMatrix out(rule.modulus(), static_cast<std::size_t>(count));
    for (std::uint64_t i = 1; i <= count; ++i) out.set(i - 1, i - 1, rule.center());
    for (std::uint64_t i = 1; i <= internal; ++i) {
        for (int k = 1; k <= d; ++k) {
            const std::uint64_t j = (i - 1) * static_cast<std::uint64_t>(d) +
                                    static_cast<std::uint64_t>(k) + 1;
            out.set(i - 1, j - 1, rule.child_coeffs()[static_cast<std::size_t>(k - 1)]);
        }
    }
    const std::uint32_t k_sum = rule.coefficient_sum();
    for (std::uint64_t i = internal + 1; i <= count; ++i) out.set(i - 1, 0, k_sum);
    return out;
}

inline std::vector<std::uint32_t> matvec(const ModMatrix& mat,
                                         std::span<const std::uint32_t> v) {
    if (v.size() != mat.dim()) {
        throw DimensionMismatch("matrix dim " + std::to_string(mat.dim()) +
                                " vs vector length " + std::to_string(v.size()));
    }
    const std::size_t n = mat.dim();
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned __int128 acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += static_cast<unsigned __int128>(mat.at(i, j)) * v[j];
        }
        out[i] = static_cast<std::uint32_t>(acc % mat.modulus());
    }
    return out;
}

inline ModMatrix matmul(const ModMatrix& a, const ModMatrix& b) {
    if (a.dim() != b.dim() || a.modulus() != b.modulus()) {
        throw DimensionMismatch("matrix product needs equal dimensions and moduli");
    }
    const std::size_t n = a.dim();
    ModMatrix out(a.modulus(), n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint64_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint64_t prod = mul_mod(aik, b.at(k, j), a.modulus());
                out.add_at(i, j, prod);
            }
        }
    }
    return out;
}

/**
 * Determinant of the integer lift (entries taken in [0, m)) computed exactly
 * with fraction-free Bareiss elimination over arbitrary-precision integers,
 * then reduced into [0, m). Every intermediate value is a minor of the lifted
 * matrix, so the divisions below are exact; the result does not depend on the
 * choice of lift. This is the ground-truth route: no formula, no field
 * structure assumed on Z_m.
 */
inline std::uint32_t det_exact_mod(const ModMatrix& mat) {
    const std::size_t n = mat.dim();
    std::vector<mpz_class> w(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i * n + j] = mat.at(i, j);

    int sign = 1;
    mpz_class prev = 1;
    mpz_class t1, t2;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (w[k * n + k] == 0) {
            std::size_t pivot_row = n;
            for (std::size_t i = k + 1; i < n; ++i) {
                if (w[i * n + k] != 0) {
                    pivot_row = i;
                    break;
                }
            }
            if (pivot_row == n) return 0;  // whole column zero: singular lift
            for (std::size_t j = k; j < n; ++j) std::swap(w[k * n + j], w[pivot_row * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                t1 = w[i * n + j] * w[k * n + k];
                t2 = w[i * n + k] * w[k * n + j];
                t1 -= t2;
                mpz_divexact(w[i * n + j].get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
            }
            w[i * n + k] = 0;
        }
        prev = w[k * n + k];
    }
    mpz_class det = w[n * n - 1];
    if (sign < 0) det = -det;
    mpz_class r = det % mat.modulus();
    if (r < 0) r += mat.modulus();
    return static_cast<std::uint32_t>(r.get_ui());
}

struct PrimePowerFactorization {
    struct Factor {
        std::uint32_t prime;
        int exponent;
        std::uint32_t value;  // prime^exponent
    };
    std::uint32_t modulus;
    std::vector<Factor> factors;
};

inline PrimePowerFactorization factorize(std::uint32_t m) {
    if (m < 2) throw Error("nothing to factor below 2");
    PrimePowerFactorization out{m, {}};
    std::uint64_t rest = m;
    for (std::uint64_t p = 2; p * p <= rest; ++p) {
        if (rest % p != 0) continue;
        int e = 0;
        std::uint64_t q = 1;
        while (rest % p == 0) {
            rest /= p;
            q *= p;
            ++e;
        }
        out.factors.push_back({static_cast<std::uint32_t>(p), e, static_cast<std::uint32_t>(q)});
    }
    if (rest > 1) out.factors.push_back({static_cast<std::uint32_t>(rest), 1,
                                         static_cast<std::uint32_t>(rest)});
    return out;
}

namespace detail {

inline ModMatrix reduce_mod(const ModMatrix& mat, std::uint32_t q) {
    ModMatrix out(q, mat.dim());
    for (std::size_t i = 0; i < mat.dim(); ++i)
        for (std::size_t j = 0; j < mat.dim(); ++j) out.set(i, j, mat.at(i, j));
    return out;
}

// Gauss-Jordan over the field Z_p; the pivot hunt failing in some column
// means p divides the determinant of the original matrix.
inline ModMatrix invert_prime(const ModMatrix& mat, std::uint32_t p) {
    const std::size_t n = mat.dim();
    ModMatrix a = reduce_mod(mat, p);
    ModMatrix inv = ModMatrix::identity(p, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = n;
        for (std::size_t i = col; i < n; ++i) {
            if (a.at(i, col) != 0) {
                pivot_row = i;
                break;
            }
        }
        if (pivot_row == n) {
            throw NotInvertible("determinant shares factor " + std::to_string(p) +
                                    " with the modulus",
                                p);
        }
        if (pivot_row != col) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint32_t ta = a.at(col, j), tb = inv.at(col, j);
                a.set(col, j, a.at(pivot_row, j));
                inv.set(col, j, inv.at(pivot_row, j));
                a.set(pivot_row, j, ta);
                inv.set(pivot_row, j, tb);
            }
        }
        const std::uint64_t scale = inv_mod(a.at(col, col), p);
        for (std::size_t j = 0; j < n; ++j) {
            a.set(col, j, mul_mod(a.at(col, j), scale, p));
            inv.set(col, j, mul_mod(inv.at(col, j), scale, p));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            const std::uint64_t f = a.at(i, col);
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint64_t sub_a = mul_mod(f, a.at(col, j), p);
                const std::uint64_t sub_b = mul_mod(f, inv.at(col, j), p);
                a.set(i, j, (a.at(i, j) + p - sub_a) % p);
                inv.set(i, j, (inv.at(i, j) + p - sub_b) % p);
            }
        }
    }
    return inv;
}

// Quadratic Newton step X <- X(2I - AX): a residual of order p^t squares to
// order p^{2t}, so ceil(log2 k) rounds lift an inverse mod p to mod p^k.
inline ModMatrix lift_inverse(const ModMatrix& mat, const ModMatrix& inv_mod_p,
                              std::uint32_t p, int exponent, std::uint32_t q) {
    const std::size_t n = mat.dim();
    ModMatrix a = reduce_mod(mat, q);
    ModMatrix x = reduce_mod(inv_mod_p, q);
    int correct = 1;
    while (correct < exponent) {
        ModMatrix ax = matmul(a, x);
        ModMatrix residual(q, n);  // 2I - AX
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::uint64_t v = (q - ax.at(i, j)) % q;
                if (i == j) v = (v + 2) % q;
                residual.set(i, j, v);
            }
        }
        x = matmul(x, residual);
        correct *= 2;
    }
    (void)p;
    return x;
}

struct CrtTerm {
    std::uint32_t value;      // prime power q_i
    std::uint64_t basis;      // (m / q_i) * inv(m / q_i mod q_i)  mod m
};

inline std::vector<CrtTerm> crt_terms(const PrimePowerFactorization& f) {
    std::vector<CrtTerm> out;
    out.reserve(f.factors.size());
    for (const auto& fac : f.factors) {
        const std::uint64_t rest = f.modulus / fac.value;
        const std::uint64_t inv = inv_mod(rest % fac.value, fac.value);
        out.push_back({fac.value, mul_mod(rest, inv, f.modulus)});
    }
    return out;
}

}  // namespace detail

/**
 * Inverse over Z_m for arbitrary m >= 2. Per prime power p^k dividing m the
 * matrix is inverted mod p by elimination and lifted to p^k by Newton
 * iteration; the per-prime-power inverses are recombined entrywise by CRT.
 */
inline ModMatrix invert_mod(const ModMatrix& mat) {
    const auto f = factorize(mat.modulus());
    const auto terms = detail::crt_terms(f);
    const std::size_t n = mat.dim();
    ModMatrix out(mat.modulus(), n);
    std::vector<ModMatrix> parts;
    parts.reserve(f.factors.size());
    for (const auto& fac : f.factors) {
        ModMatrix base = detail::invert_prime(mat, fac.prime);
        parts.push_back(detail::lift_inverse(mat, base, fac.prime, fac.exponent, fac.value));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            unsigned __int128 acc = 0;
            for (std::size_t t = 0; t < parts.size(); ++t) {
                acc += static_cast<unsigned __int128>(parts[t].at(i, j)) * terms[t].basis;
            }
            out.set(i, j, static_cast<std::uint64_t>(acc % mat.modulus()));
        }
    }
    return out;
}

/**
 * Unique solution of  mat * x = y (mod m)  when det is a unit: elimination
 * per prime power with unit pivots (one always exists in each column when
 * p does not divide det), recombined by CRT. Agrees with invert_mod(mat)*y.
 */
inline std::vector<std::uint32_t> solve_mod(const ModMatrix& mat,
                                            std::span<const std::uint32_t> y) {
    if (y.size() != mat.dim()) {
        throw DimensionMismatch("matrix dim " + std::to_string(mat.dim()) +
                                " vs vector length " + std::to_string(y.size()));
    }
    const std::size_t n = mat.dim();
    const auto f = factorize(mat.modulus());
    const auto terms = detail::crt_terms(f);
    std::vector<std::vector<std::uint32_t>> parts;
    parts.reserve(f.factors.size());
    for (const auto& fac : f.factors) {
        const std::uint32_t q = fac.value;
        const std::uint32_t p = fac.prime;
        ModMatrix a = detail::reduce_mod(mat, q);
        std::vector<std::uint32_t> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i] % q;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot_row = n;
            for (std::size_t i = col; i < n; ++i) {
                if (a.at(i, col) % p != 0) {
                    pivot_row = i;
                    break;
                }
            }
            if (pivot_row == n) {
                throw NotInvertible("determinant shares factor " + std::to_string(p) +
                                        " with the modulus",
                                    p);
            }
            if (pivot_row != col) {
                for (std::size_t j = 0; j < n; ++j) {
                    const std::uint32_t t = a.at(col, j);
                    a.set(col, j, a.at(pivot_row, j));
                    a.set(pivot_row, j, t);
                }
                std::swap(rhs[col], rhs[pivot_row]);
            }
            const std::uint64_t scale = inv_mod(a.at(col, col), q);
            for (std::size_t j = 0; j < n; ++j) a.set(col, j, mul_mod(a.at(col, j), scale, q));
            rhs[col] = static_cast<std::uint32_t>(mul_mod(rhs[col], scale, q));
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col) continue;
                const std::uint64_t factor = a.at(i, col);
                if (factor == 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    const std::uint64_t sub = mul_mod(factor, a.at(col, j), q);
                    a.set(i, j, (a.at(i, j) + q - sub) % q);
                }
                const std::uint64_t sub = mul_mod(factor, rhs[col], q);
                rhs[i] = static_cast<std::uint32_t>((rhs[i] + q - sub) % q);
            }
        }
        parts.push_back(std::move(rhs));
    }
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned __int128 acc = 0;
        for (std::size_t t = 0; t < parts.size(); ++t) {
            acc += static_cast<unsigned __int128>(parts[t][i]) * terms[t].basis;
        }
        out[i] = static_cast<std::uint32_t>(acc % mat.modulus());
    }
    return out;
}

struct MatrixOrder {
    std::uint64_t preperiod;  // r: smallest r with mat^{r+s} = mat^r
    std::uint64_t period;     // s: the minimal such s >= 1

    bool operator==(const MatrixOrder&) const = default;
};

namespace detail {

inline std::vector<unsigned char> serialize_entries(const ModMatrix& mat) {
    const int width = mat.modulus() <= 0x100 ? 1 : (mat.modulus() <= 0x10000 ? 2 : 4);
    std::vector<unsigned char> bytes;
    bytes.reserve(mat.entries().size() * static_cast<std::size_t>(width));
    for (std::uint32_t e : mat.entries()) {
        for (int b = 0; b < width; ++b) bytes.push_back(static_cast<unsigned char>(e >> (8 * b)));
    }
    return bytes;
}

}  // namespace detail

/**
 * Minimal (r, s) with mat^{r+s} = mat^r, found by iterating powers from the
 * identity and hashing the canonical byte serialization of each; hash hits
 * are confirmed by full comparison. r = 0 exactly when mat is invertible.
 */
inline std::optional<MatrixOrder> matrix_order(const ModMatrix& mat, std::uint64_t max_steps) {
    if (max_steps < 1) throw Error("max_steps must be at least 1");
    std::vector<std::vector<unsigned char>> history;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> steps_by_hash;
    ModMatrix power = ModMatrix::identity(mat.modulus(), mat.dim());

    const auto record = [&](const ModMatrix& p) {
        auto bytes = detail::serialize_entries(p);
        const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
        steps_by_hash[h].push_back(history.size());
        history.push_back(std::move(bytes));
    };
    const auto find_repeat = [&](const ModMatrix& p) -> std::optional<std::uint64_t> {
        auto bytes = detail::serialize_entries(p);
        const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
        auto it = steps_by_hash.find(h);
        if (it == steps_by_hash.end()) return std::nullopt;
        for (std::uint64_t step : it->second) {
            if (history[step] == bytes) return step;
        }
        return std::nullopt;
    };

    record(power);
    for (std::uint64_t step = 1; step <= max_steps; ++step) {
        power = matmul(power, mat);
        if (auto seen = find_repeat(power)) {
            return MatrixOrder{*seen, step - *seen};
        }
        record(power);
    }
    return std::nullopt;
}

/// Debug dump: "m dim" header, then dim rows of dim entries.
inline void write_matrix(const ModMatrix& mat, std::ostream& out) {
    out << mat.modulus() << ' ' << mat.dim() << '\n';
    for (std::size_t i = 0; i < mat.dim(); ++i) {
        for (std::size_t j = 0; j < mat.dim(); ++j) {
            if (j != 0) out << ' ';
            out << mat.at(i, j);
        }
        out << '\n';
    }
}

}  // namespace treeca
