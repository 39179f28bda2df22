#ifndef BUDDE_ERRORS_HPP
#define BUDDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace budde {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model parameters violate an invariant (non-finite, unstable denominator, ...).
struct ModelError : Error {
    using Error::Error;
};

/// SDP synthesis failed (infeasible, unbounded, iteration limit).
struct SynthesisError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// File content does not match the expected schema.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace budde

#endif  // BUDDE_ERRORS_HPP
