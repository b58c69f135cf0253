#pragma once

#include <optional>
#include <variant>

#include "qconvex/common.hpp"

namespace qconvex {

/// One nonzero of the n^p x n^p tensor operator, addressed by p-tuple
/// multi-indices over 0..n-1 (first slot is the most significant).
struct SparseEntry {
    std::vector<int> row;
    std::vector<int> col;
    double val = 0.0;
};

/// f(x) = 1/2 x^{T (x) p} A x^{(x) p} with A symmetric, ||A|| <= 1 after the
/// load-time normalization pass. The original scale is kept in norm_scale so
/// evaluation returns values of the function as given.
class HomogeneousSpec {
public:
    static HomogeneousSpec load(int n, int p, std::vector<SparseEntry> entries);

    int n() const { return n_; }
    int p() const { return p_; }
    int sparsity() const { return sparsity_; }
    std::int64_t dim() const { return ipow(n_, p_); }
    double norm_scale() const { return norm_scale_; }
    const std::vector<SparseEntry>& entries() const { return entries_; }

private:
    int n_ = 0;
    int p_ = 0;
    int sparsity_ = 0;
    double norm_scale_ = 1.0;
    std::vector<SparseEntry> entries_;
};

/// One summand of an inhomogeneous polynomial:
///   coeff * (c^T x) * prod_k (x^T B_k x)          when c is present,
///   coeff * prod_k (x^T B_k x)                    when it is absent.
/// The even-degree (absent-c) form is needed because functions like -x^2 + 3x
/// have even terms that the linear-factor form cannot express. Each B is
/// normalized to ||B|| <= 1 and |c| = 1, with scales folded into coeff.
struct InhomoTerm {
    double coeff = 1.0;
    std::optional<Vec> c;
    std::vector<Mat> bs;

    int half_degree() const { return static_cast<int>(bs.size()); }
    int degree() const { return 2 * half_degree() + (c ? 1 : 0); }
};

class InhomogeneousSpec {
public:
    static InhomogeneousSpec load(int n, std::vector<InhomoTerm> terms);

    int n() const { return n_; }
    const std::vector<InhomoTerm>& terms() const { return terms_; }

private:
    int n_ = 0;
    std::vector<InhomoTerm> terms_;
};

using PolySpec = std::variant<HomogeneousSpec, InhomogeneousSpec>;

int spec_n(const PolySpec& spec);

/// Sample points with their normalization data. C^2 = sum |x_i|^2 and
/// x_min = min |x_i|^2, both stored exactly as computed from the points.
struct PointSet {
    std::vector<Vec> points;
    double c_norm = 0.0;     // C
    double c_squared = 0.0;  // C^2
    double x_min = 0.0;      // min_i |x_i|^2
    int count() const { return static_cast<int>(points.size()); }
};

constexpr double kPointNormFloor = 1e-6;  // |x_i|^2 floor; x_min enters denominators

enum class SampleMode { UniformBall, OnSphere, Explicit };

PointSet make_point_set(std::vector<Vec> points);
PointSet sample_points(int n, int count, std::uint64_t seed, SampleMode mode,
                       const std::vector<Vec>* explicit_points = nullptr);

// ---- evaluation and classical oracles ------------------------------------

double eval_homogeneous(const HomogeneousSpec& spec, const Vec& x);
double eval_inhomogeneous(const InhomogeneousSpec& spec, const Vec& x);
double eval(const PolySpec& spec, const Vec& x);

Vec gradient_analytic(const HomogeneousSpec& spec, const Vec& x);
Vec gradient_analytic(const InhomogeneousSpec& spec, const Vec& x);
Vec gradient_analytic(const PolySpec& spec, const Vec& x);

Mat hessian_analytic(const HomogeneousSpec& spec, const Vec& x);
Mat hessian_analytic(const InhomogeneousSpec& spec, const Vec& x);
Mat hessian_analytic(const PolySpec& spec, const Vec& x);

/// Central-difference gradient and Hessian computed from eval_* only.
/// Independent of every analytic path; this is the validation oracle.
struct FiniteDifferenceResult {
    Vec gradient;
    Mat hessian;
};
FiniteDifferenceResult finite_difference_oracle(const PolySpec& spec, const Vec& x,
                                                double h = 1e-4);

/// Per-term helpers used by the gradient/Hessian assembly and the pipeline.
double term_h_value(const InhomoTerm& term, const Vec& x);
Vec term_h_gradient(const InhomoTerm& term, const Vec& x);
Mat term_h_hessian(const InhomoTerm& term, const Vec& x);

/// Lift prod_k (x^T B_k x) to a HomogeneousSpec (A = 2 * B_1 (x) ... (x) B_m,
/// renormalized). Requires at least one B.
HomogeneousSpec homogeneous_lift(const InhomoTerm& term, int n);

}  // namespace qconvex
