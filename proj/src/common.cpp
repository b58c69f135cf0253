#include "qconvex/common.hpp"

#include <cmath>

namespace qconvex {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double spectral_norm_estimate(const Mat& m, double tol, int max_iter) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const double frob = m.norm();
    if (frob == 0.0) return 0.0;
    // Power iteration on M^T M from a deterministic start.
    Vec v = Vec::Ones(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 0.37 * std::sin(double(i + 1));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = m.transpose() * (m * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        w /= nw;
        const double next = nw;  // Rayleigh quotient of M^T M at previous v
        if (std::abs(next - lambda) <= tol * std::max(1.0, next) && it > 4) {
            lambda = next;
            break;
        }
        lambda = next;
        v = w;
    }
    return std::sqrt(lambda);
}

}  // namespace qconvex
