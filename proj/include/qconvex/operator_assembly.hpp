#pragma once

#include "qconvex/poly_core.hpp"

namespace qconvex {

enum class OperatorTag { A, Mm, MD, Theta, MH, MHplusMD };

/// n^p x n^p operator stored as COO with p-tuple multi-indices. These are the
/// permutation images of A (M_m, M_D, Theta_jk, M_H) plus A itself.
struct BigOperator {
    int n = 0;
    int p = 0;
    OperatorTag tag = OperatorTag::A;
    std::vector<SparseEntry> entries;

    std::int64_t dim() const { return ipow(n, p); }
    std::size_t nnz() const { return entries.size(); }
    int row_sparsity() const;
    double max_abs_row_sum() const;  // Schur-feasible subnormalization for symmetric ops
    Mat to_dense(std::int64_t dense_cap = 4096) const;
};

BigOperator as_operator(const HomogeneousSpec& spec);             // tag A
BigOperator build_Mm(const HomogeneousSpec& spec, int m);         // 1-based slot
BigOperator build_MD(const HomogeneousSpec& spec);

/// Mixed row/column reshuffle: sandwiching reproduces the
/// prod (x^T A_i x) (A_k x)(x^T A_j) Hessian term on factorized fixtures.
BigOperator build_Theta(const HomogeneousSpec& spec, int j, int k);  // 1-based, j != k

/// Row/row reshuffle companion. For A built from symmetric factors its
/// sandwich coincides with build_Theta's; for general symmetric A both
/// families are needed to reproduce the analytic Hessian.
BigOperator build_Theta_rowrow(const HomogeneousSpec& spec, int j, int k);

/// M_H as the doubled mixed family 2 sum_{j != k} Theta_jk when that form
/// reproduces the Hessian, else the completed sum over both families.
BigOperator build_MH(const HomogeneousSpec& spec);
BigOperator build_MH_plus_MD(const HomogeneousSpec& spec);

/// Tr_{1..p-1}( op . ((x x^T)^{(x) p-1} (x) I_n) ), by sparse contraction.
Mat partial_trace_contract(const BigOperator& op, const Vec& x);

/// ((x^T)^{(x) p-1} (x) I_n) . op . (x^{(x) p-1} (x) I_n).
/// For op = M_H + M_D this equals the Hessian of the normalized spec.
Mat sandwich(const BigOperator& op, const Vec& x);

}  // namespace qconvex
