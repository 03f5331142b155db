#ifndef SBMEST_ERRORS_HPP
#define SBMEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sbmest {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// model validation
struct NonSymmetricError : Error { using Error::Error; };
struct OutOfRangeError : Error { using Error::Error; };
struct BadSimplexError : Error { using Error::Error; };
struct RankDeficiencyAmbiguousError : Error { using Error::Error; };

// spectral
struct ConvergenceFailureError : Error { using Error::Error; };
struct EmptyBlockError : Error { using Error::Error; };

// likelihood
struct EmptyBlockPairError : Error { using Error::Error; };
struct InfeasibleInitError : Error { using Error::Error; };

// asymptotic
struct SingularDeltaError : Error { using Error::Error; };
struct DegenerateParamsError : Error { using Error::Error; };
struct SingularInfoError : Error { using Error::Error; };

// monte carlo / cli
struct MismatchedRegimeError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace sbmest

#endif
