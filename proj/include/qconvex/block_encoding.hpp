#pragma once

#include "qconvex/operator_assembly.hpp"

namespace qconvex {

/// Symbolic complexity counters. Per-value, merged on composition; repetition
/// primitives (QSVT application, amplification, power iterations) multiply the
/// input's counters by the repetition count, which is what makes the totals
/// reproduce the query-complexity shape of the underlying constructions.
struct Cost {
    double oracle_queries = 0.0;
    double primitive_ops = 0.0;
    double qsvt_degree_total = 0.0;
    int ancillas_peak = 0;

    Cost merged(const Cost& other) const {
        Cost out = *this;
        out.oracle_queries += other.oracle_queries;
        out.primitive_ops += other.primitive_ops;
        out.qsvt_degree_total += other.qsvt_degree_total;
        out.ancillas_peak = std::max(ancillas_peak, other.ancillas_peak);
        return out;
    }
    Cost repeated(double k) const {
        Cost out = *this;
        out.oracle_queries *= k;
        out.primitive_ops *= k;
        return out;
    }
    double total() const { return oracle_queries + primitive_ops + qsvt_degree_total; }
};

/// Simulated block encoding: the top-left block of the (never materialized)
/// unitary, its subnormalization, the accumulated error bound and cost.
/// Represented operator = alpha * block, within eps.
struct EncodedOperator {
    Mat block;
    double alpha = 1.0;
    double eps = 0.0;
    int ancillas = 0;
    Cost cost;

    std::int64_t dim() const { return block.rows(); }
};

constexpr double kBlockNormTol = 1e-9;  // feasibility slack on ||block|| <= 1

/// Throws EncodingError if the block is not a feasible top-left corner.
void check_feasible(const EncodedOperator& a, const char* where);

EncodedOperator encode_identity(std::int64_t dim);

/// Sparse-access encoding of a big operator: block = op/s, alpha = s, where s
/// defaults to the operator's row sparsity but can be widened (the calculus
/// encodes M_D at s*p and M_H at 2*s*p*(p-1)). Charges the sparse-access
/// gate-count shape log(dim) + log^2.5(1/eps) to the counters.
EncodedOperator encode_sparse(const BigOperator& op, double eps,
                              double subnormalization = 0.0,
                              std::int64_t dense_cap = 1 << 20);

/// Exact encoding of rho = Tr_A |state><state| for a unit state on
/// dim_traced x dim_kept.
EncodedOperator encode_density(const Vec& state, std::int64_t dim_traced);

EncodedOperator product(const EncodedOperator& a, const EncodedOperator& b);
EncodedOperator tensor(const EncodedOperator& a, const EncodedOperator& b);

/// (1/m) sum_i signs_i block_i; requires equal alphas (pre-equalize).
EncodedOperator lcu_sum(const std::vector<EncodedOperator>& ops,
                        const std::vector<int>& signs);

/// Shrinks the represented operator by factor in (0, 1]; alpha is unchanged.
EncodedOperator scale(const EncodedOperator& a, double factor);

/// Re-expresses the same represented operator at a larger subnormalization:
/// block *= alpha/new_alpha, alpha = new_alpha. Used to equalize alphas ahead
/// of lcu_sum.
EncodedOperator rescale_alpha(const EncodedOperator& a, double new_alpha);

EncodedOperator transpose(const EncodedOperator& a);

/// Uniform singular value amplification by a known factor. Fails when the
/// amplified block would exceed norm 1 (the C < 1 obstruction).
EncodedOperator amplify(const EncodedOperator& a, double gain);

}  // namespace qconvex
