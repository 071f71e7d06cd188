#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treeca {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidWord : Error {
    using Error::Error;
};

struct RootHasNoParent : Error {
    using Error::Error;
};

struct LeafHasNoChildren : Error {
    using Error::Error;
};

struct ArityMismatch : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Carries a nontrivial common divisor of det and the modulus.
struct NotInvertible : Error {
    NotInvertible(const std::string& what, std::uint64_t witness)
        : Error(what), gcd_witness(witness) {}
    std::uint64_t gcd_witness;
};

struct NotReversible : Error {
    using Error::Error;
};

struct CriterionDomain : Error {
    using Error::Error;
};

struct PaletteMismatch : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace treeca
