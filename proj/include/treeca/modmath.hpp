#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "treeca/errors.hpp"

namespace treeca {

// Scalar arithmetic on residues. Moduli are capped at 32 bits so that a
// single product always fits in a 64-bit word.

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) acc = mul_mod(acc, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// Inverse of a modulo m via extended Euclid; requires gcd(a, m) = 1.
inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    std::int64_t r0 = static_cast<std::int64_t>(m), r1 = static_cast<std::int64_t>(a % m);
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        s0 -= q * s1;
        std::swap(s0, s1);
    }
    if (r0 != 1) {
        throw NotInvertible("residue has no inverse: gcd(" + std::to_string(a) + ", " +
                                std::to_string(m) + ") = " + std::to_string(r0),
                            static_cast<std::uint64_t>(r0));
    }
    if (s0 < 0) s0 += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(s0);
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    for (std::uint64_t f = 11; f * f <= n; f += 6) {
        if (n % f == 0 || n % (f + 2) == 0) return false;
    }
    return true;
}

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t len,
                             std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace treeca
