#pragma once

#include <stdexcept>
#include <string>

namespace tetra3d {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric evaluation would leave the double exponent range.
struct OverflowError : Error {
    using Error::Error;
};

// Truncated hypergeometric sum hit a vanishing lower-parameter Pochhammer.
struct PoleDomainError : Error {
    using Error::Error;
};

// Fock-space truncation leaves no safe comparison window.
struct CutoffTooSmallError : Error {
    using Error::Error;
};

// Ratio test found non-decaying terms in an infinite spin sum.
struct DivergenceError : Error {
    using Error::Error;
};

// A spectral parameter is too close to a pole of the sl2 R-matrix.
struct PoleProximityError : Error {
    using Error::Error;
};

// A block to be compared is identically zero.
struct DegenerateBlockError : Error {
    using Error::Error;
};

// A spin field violates the local conservation laws.
struct InadmissibleError : Error {
    using Error::Error;
};

// Finite differencing lost too many digits to trust the coefficients.
struct ExtractionUnstableError : Error {
    using Error::Error;
};

} // namespace tetra3d
