#ifndef IONTRAP_ERRORS_HPP
#define IONTRAP_ERRORS_HPP

#include <stdexcept>

namespace iontrap {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The Fock truncation is too small to hold the requested state.
struct TruncationTooSmall : Error { using Error::Error; };

/// Operation requires the resonant operating regime nu = 2*omega.
struct RegimeViolation : Error { using Error::Error; };

/// The detuning term of the transformed Hamiltonian is singular at eta = 0.
struct EtaZeroUndefined : Error { using Error::Error; };

struct DimensionMismatch : Error { using Error::Error; };

/// Envelope window too narrow to straddle the fast oscillation period.
struct WindowTooSmall : Error { using Error::Error; };

/// Series does not span enough scaled time for the requested detection.
struct SeriesTooShort : Error { using Error::Error; };

/// Filesystem / serialization failure.
struct IoError : Error { using Error::Error; };

}  // namespace iontrap

#endif
