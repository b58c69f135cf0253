#pragma once

#include <string>
#include <utility>

#include "qconvex/qsvt.hpp"

namespace qconvex {

enum class CBranch { CGe1, CLt1 };
enum class EncodingKind { HessianHomogeneous, HessianInhomogeneous, GradientOuter };

/// The known prefactor linking an encoded block to the operator it carries,
/// recorded exactly as a product of tracked constants.
struct ScaleLedger {
    std::vector<std::pair<std::string, double>> factors;

    void push(std::string name, double value) {
        factors.emplace_back(std::move(name), value);
    }
    double product() const {
        double out = 1.0;
        for (const auto& [name, v] : factors) out *= v;
        return out;
    }
    std::string describe() const;
};

/// Block encoding over dimension N * n^p whose block, divided by the ledger
/// product, reconstructs  (+)_i (|x_i><x_i|)^{(x) p-1} (x) H(x_i)  (or the
/// gradient-outer analogue) in the units of the function as given.
struct MultiPointEncoding {
    EncodedOperator enc;
    PointSet points;
    CBranch branch = CBranch::CGe1;
    ScaleLedger scale;
    EncodingKind kind = EncodingKind::HessianHomogeneous;
    int n = 0;
    int p = 0;            // common tensor shape (max term half-degree for sums)
    double shift_bound = 1.0;  // ||H(x)|| <= shift_bound over the domain, true units

    double scale_factor() const { return scale.product(); }
};

struct PipelineOptions {
    double eps = 1e-8;            // per-stage approximant / encoding accuracy
    double beta_floor = 1e-4;     // |x_i^T c| rejection floor
    int degree_cap = 32768;
    std::int64_t dense_cap = 65536;  // N * n^p cap for the simulated encodings
    bool use_known_xmin = true;   // false: estimate the sqrt domain floor spectrally
};

/// Load |phi> = (1/C) sum_j |j> (x) x_j, copy the index register, trace it
/// out; returns the exact encoding of (1/C^2) (+)_j x_j x_j^T.
EncodedOperator load_points(const PointSet& points);

/// C >= 1: amplification removes C^2, leaving (+)_j x_j x_j^T. C < 1: the
/// factor stays and is folded into downstream ledgers.
EncodedOperator normalize_branch(const EncodedOperator& enc, const PointSet& points,
                                 CBranch* branch_out);

/// Blockwise x_i x_i^T -> 0.5 |x_i| |x_i><x_i| via pos_power(1/2) with
/// the domain floor at min_i |x_i|^2 (scaled by 1/C^2 on the C < 1 branch).
EncodedOperator sqrt_points(const EncodedOperator& enc, const PointSet& points,
                            CBranch branch, const PipelineOptions& opts = {});

/// SWAP-and-product construction of (+)_i (b_i)^{(x) p-1} (x) I_n from the
/// block-diagonal input (+)_i b_i. For p = 1 this is (+)_i I_n.
EncodedOperator tensorize_projectors(const EncodedOperator& enc_sqrt, int p, int n);

MultiPointEncoding multi_point_hessian(const HomogeneousSpec& spec, const PointSet& points,
                                       const PipelineOptions& opts = {});

/// Appendix B: diagonal matrix with entries beta_i^2 = (x_i^T c)^2 times a
/// tracked subnormalization (1/C^2 on the C < 1 branch), built by the U_beta
/// basis-state sandwich.
EncodedOperator beta_diagonal(const PointSet& points, const Vec& c,
                              double* subnormalization_out = nullptr);

MultiPointEncoding multi_point_hessian_inhomo(const InhomogeneousSpec& spec,
                                              const PointSet& points,
                                              const PipelineOptions& opts = {});

/// Dispatch on the spec kind.
MultiPointEncoding multi_point_encoding(const PolySpec& spec, const PointSet& points,
                                        const PipelineOptions& opts = {});

/// The N = 1 specialization with identical scale bookkeeping.
MultiPointEncoding single_point_hessian(const PolySpec& spec, const Vec& x,
                                        const PipelineOptions& opts = {});

/// Contract the known rank-one projectors of point i and divide by the ledger
/// product: recovers H(x_i) (or grad-outer) in true units.
Mat extract_point_block(const MultiPointEncoding& mp, int point_index);

/// (+)_i (step(x_i x_i^T)) ^{(x) p-1} (x) I_n with step ~ 0.5 on the support:
/// the projector-masked identity used by the spectral shift. The ledger-exact
/// weight 2^{-(p-1)} is pushed onto the returned pair's second member.
std::pair<EncodedOperator, double> masked_identity(const PointSet& points, CBranch branch,
                                                   const EncodedOperator& branch_enc, int p,
                                                   int n, const PipelineOptions& opts = {});

/// True if every term of the spec has zero Hessian (purely linear function).
bool has_identically_zero_hessian(const PolySpec& spec);

}  // namespace qconvex
