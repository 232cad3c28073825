#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
using Index = Eigen::Index;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gram matrix S_n has an eigenvalue below the relative floor; the design is
/// not identifiable at this sample size.
struct SingularGram : Error {
    using Error::Error;
};

/// brute_force_fit found its best point on the search-box boundary.
struct MinimizerOnBoundary : Error {
    using Error::Error;
};

/// E|psi(e+t)| diverges for the requested (loss, distribution) pair.
struct NonIntegrable : Error {
    using Error::Error;
};

/// Too few sample sizes for a decay regression.
struct InsufficientPoints : Error {
    using Error::Error;
};

/// Weight array violates max_i |a_ni| = O(1/n).
struct WeightTooLarge : Error {
    using Error::Error;
};

/// Variable spec cannot certify a sup bound |X| <= b.
struct UnboundedSpec : Error {
    using Error::Error;
};

/// Malformed configuration input.
struct ConfigError : Error {
    using Error::Error;
};

/// File I/O or parse failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace mest
