#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qconvex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. CLI maps these onto exit codes.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmplificationError : EncodingError {
    using EncodingError::EncodingError;
};
struct ApproximationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateBetaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularOperatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integer power for index arithmetic (dim = n^p and friends).
inline std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

Mat kron(const Mat& a, const Mat& b);

/// Operator-norm estimate by power iteration on M^T M.
double spectral_norm_estimate(const Mat& m, double tol = 1e-10, int max_iter = 500);

inline bool is_symmetric(const Mat& m, double tol = 1e-10) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace qconvex
