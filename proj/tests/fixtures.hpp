#pragma once

// Shared test fixtures: random spec generators, the Fig-1/Fig-2 functions, and
// dense kron-based oracles kept independent of the library's sparse paths.

#include <random>

#include "qconvex/operator_assembly.hpp"
#include "qconvex/poly_core.hpp"

namespace qconvex::testfix {

inline HomogeneousSpec spec_x_squared() {
    // f(x) = x^2 as 1/2 x A x with A = [2].
    return HomogeneousSpec::load(1, 1, {SparseEntry{{0}, {0}, 2.0}});
}

inline HomogeneousSpec spec_fig2() {
    // f(x, y) = x^2 + xy + y^2.
    return HomogeneousSpec::load(
        2, 1,
        {SparseEntry{{0}, {0}, 2.0}, SparseEntry{{0}, {1}, 1.0},
         SparseEntry{{1}, {0}, 1.0}, SparseEntry{{1}, {1}, 2.0}});
}

inline HomogeneousSpec spec_quartic_radial() {
    // f(x, y) = 1/2 (x^2 + y^2)^2, i.e. A = I_4 with n = p = 2.
    std::vector<SparseEntry> entries;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) entries.push_back(SparseEntry{{a, b}, {a, b}, 1.0});
    return HomogeneousSpec::load(2, 2, entries);
}

inline InhomogeneousSpec spec_cubic_fig1c() {
    // f(x) = x^3 - 2x (the figure's constant offset is not representable).
    InhomoTerm cubic;
    cubic.c = Vec::Constant(1, 1.0);
    cubic.bs = {Mat::Constant(1, 1, 1.0)};
    InhomoTerm linear;
    linear.c = Vec::Constant(1, -2.0);
    return InhomogeneousSpec::load(1, {cubic, linear});
}

inline InhomogeneousSpec spec_concave_fig1b() {
    // f(x) = -x^2 + 3x.
    InhomoTerm quad;
    quad.coeff = -1.0;
    quad.bs = {Mat::Constant(1, 1, 1.0)};
    InhomoTerm linear;
    linear.c = Vec::Constant(1, 3.0);
    return InhomogeneousSpec::load(1, {quad, linear});
}

inline HomogeneousSpec random_homogeneous(int n, int p, int target_row_nnz,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const std::int64_t dim = ipow(n, p);
    const int entries_target = static_cast<int>(std::min<std::int64_t>(dim * target_row_nnz / 2, 400));
    std::vector<SparseEntry> entries;
    for (int e = 0; e < std::max(entries_target, 1); ++e) {
        SparseEntry entry;
        entry.row.resize(p);
        entry.col.resize(p);
        for (int t = 0; t < p; ++t) {
            entry.row[t] = pick(rng);
            entry.col[t] = pick(rng);
        }
        entry.val = val(rng);
        entries.push_back(std::move(entry));
    }
    return HomogeneousSpec::load(n, p, std::move(entries));
}

inline Mat random_symmetric_contraction(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = val(rng);
    b = (b + b.transpose().eval()) / 2.0;
    return scale * b;
}

inline InhomogeneousSpec random_inhomogeneous(int n, int max_half_degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nb(0, max_half_degree);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<InhomoTerm> terms;
    const int term_count = 2 + static_cast<int>(rng() % 2);
    for (int t = 0; t < term_count; ++t) {
        InhomoTerm term;
        term.coeff = val(rng);
        if (term.coeff == 0.0) term.coeff = 0.5;
        const bool linear_factor = (rng() % 2) == 0;
        int m = nb(rng);
        if (!linear_factor && m == 0) m = 1;  // constants are rejected by the loader
        if (linear_factor) {
            Vec c(n);
            for (int i = 0; i < n; ++i) c[i] = val(rng);
            if (c.norm() == 0.0) c[0] = 1.0;
            term.c = c;
        }
        for (int k = 0; k < m; ++k) term.bs.push_back(random_symmetric_contraction(n, rng));
        terms.push_back(std::move(term));
    }
    return InhomogeneousSpec::load(n, std::move(terms));
}

inline Vec random_point(int n, std::mt19937_64& rng, double max_norm = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = gauss(rng);
    x /= x.norm();
    return x * (max_norm * unif(rng));
}

// ---- dense oracles (independent implementation path) ----------------------

inline Mat dense_of(const HomogeneousSpec& spec) { return as_operator(spec).to_dense(); }

inline Mat kron_pow(const Mat& m, int k) {
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < k; ++i) out = kron(out, m);
    return out;
}

/// Literal Tr_{1..p-1}( M ((xx^T)^{(x)p-1} (x) I) ) on dense matrices.
inline Mat dense_partial_trace(const Mat& m, const Vec& x, int n, int p) {
    const Mat proj = x * x.transpose();
    const Mat big = m * kron(kron_pow(proj, p - 1), Mat::Identity(n, n));
    const std::int64_t lead = ipow(n, p - 1);
    Mat out = Mat::Zero(n, n);
    for (std::int64_t a = 0; a < lead; ++a)
        out += big.block(a * n, a * n, n, n);
    return out;
}

/// Literal ((x^T)^{(x)p-1} (x) I) M (x^{(x)p-1} (x) I) on dense matrices.
inline Mat dense_sandwich(const Mat& m, const Vec& x, int n, int p) {
    Mat xp = Mat::Ones(1, 1);
    for (int i = 0; i < p - 1; ++i) xp = kron(xp, Mat(x));
    const Mat lift = kron(xp, Mat::Identity(n, n));  // n^p x n
    return lift.transpose() * m * lift;
}

}  // namespace qconvex::testfix
