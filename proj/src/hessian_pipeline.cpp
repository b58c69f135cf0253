#include "qconvex/hessian_pipeline.hpp"

#include <cmath>
#include <sstream>

namespace qconvex {
namespace {

constexpr double kStepExponent = 1e-12;  // pos_power exponent for ~flat projector steps

/// Re-declares the subnormalization field ahead of lcu_sum. The represented
/// target is re-labeled; the pipeline's scale ledger carries the actual
/// constants, so this is bookkeeping alignment only.
EncodedOperator with_alpha(EncodedOperator enc, double alpha) {
    enc.alpha = alpha;
    return enc;
}

Eigen::Block<const Mat> diag_block(const Mat& m, int i, std::int64_t size) {
    return m.block(i * size, i * size, size, size);
}

/// Blockwise kron of two block-diagonal encodings over the same point index.
EncodedOperator blockwise_tensor(const EncodedOperator& a, std::int64_t da,
                                 const EncodedOperator& b, std::int64_t db, int count) {
    EncodedOperator out;
    out.block = Mat::Zero(count * da * db, count * da * db);
    for (int i = 0; i < count; ++i)
        out.block.block(i * da * db, i * da * db, da * db, da * db) =
            kron(diag_block(a.block, i, da), diag_block(b.block, i, db));
    out.alpha = a.alpha * b.alpha;
    out.eps = a.alpha * b.eps + b.alpha * a.eps;
    out.ancillas = a.ancillas + b.ancillas;
    out.cost = a.cost.merged(b.cost);
    out.cost.primitive_ops += 1;
    out.cost.ancillas_peak = std::max(out.cost.ancillas_peak, out.ancillas);
    return out;
}

/// (+)_i b_i  ->  (+)_i I_n^{(x) p-1} (x) b_i  (the SWAP placement into the
/// last tensor slot).
EncodedOperator blockwise_lift_last(const EncodedOperator& a, int count, int n, int p) {
    const std::int64_t lead = ipow(n, p - 1);
    EncodedOperator out;
    out.block = Mat::Zero(count * lead * n, count * lead * n);
    for (int i = 0; i < count; ++i)
        out.block.block(i * lead * n, i * lead * n, lead * n, lead * n) =
            kron(Mat::Identity(lead, lead), diag_block(a.block, i, n));
    out.alpha = a.alpha;
    out.eps = a.eps;
    out.ancillas = a.ancillas;
    out.cost = a.cost;
    out.cost.primitive_ops += 2.0 * std::ceil(std::log2(double(std::max(n, 2)))) + 1.0;
    return out;
}

struct MiddleOperator {
    EncodedOperator enc;  // block = (+)_i op/(divisor)
    double divisor = 1.0;
};

/// I_N (x) [(M_H + M_D)/(2 alpha_mid)] from the two sparse encodings.
MiddleOperator middle_hessian_operator(const HomogeneousSpec& spec, int count, double eps,
                                       std::int64_t dense_cap) {
    const int p = spec.p();
    const double s = spec.sparsity();
    MiddleOperator out;
    if (p == 1) {
        auto md = encode_sparse(build_MD(spec), eps, s, dense_cap);
        out.enc = tensor(encode_identity(count), scale(md, 0.5));
        out.divisor = 2.0 * s;
        return out;
    }
    const double budget_d = s * p;
    auto mh_op = build_MH(spec);
    // Schur-feasible budget; a bare s p^2 can undershoot the row/row family.
    const double budget_h = std::max(2.0 * s * p * (p - 1), mh_op.max_abs_row_sum());
    const double alpha_mid = std::max(budget_h, s * double(p) * double(p));
    auto mh = rescale_alpha(encode_sparse(mh_op, eps, budget_h, dense_cap), alpha_mid);
    auto md = rescale_alpha(encode_sparse(build_MD(spec), eps, budget_d, dense_cap), alpha_mid);
    auto sum = lcu_sum({mh, md}, {1, 1});
    out.enc = tensor(encode_identity(count), sum);
    out.divisor = 2.0 * alpha_mid;
    return out;
}

MiddleOperator middle_gradient_operator(const HomogeneousSpec& spec, int count, double eps,
                                        std::int64_t dense_cap) {
    const double s = spec.sparsity();
    const double budget_d = s * spec.p();
    MiddleOperator out;
    out.enc = tensor(encode_identity(count), encode_sparse(build_MD(spec), eps, budget_d, dense_cap));
    out.divisor = budget_d;
    return out;
}

double branch_kappa(CBranch branch, const PointSet& points) {
    return branch == CBranch::CGe1 ? 0.25 : 0.25 / points.c_squared;
}

double sqrt_domain_floor(const PointSet& points, CBranch branch) {
    const double x_min_eff =
        branch == CBranch::CGe1 ? points.x_min : points.x_min / points.c_squared;
    return std::min(0.5, x_min_eff * (1.0 - 1e-12));
}

/// ~0.5 x_hat x_hat^T per block via pos_power with a vanishing exponent; the
/// exact constant 1/2 goes to the ledger, the x-dependence is O(1e-11).
EncodedOperator uniform_projector(const EncodedOperator& branch_enc, const PointSet& points,
                                  CBranch branch, const PipelineOptions& opts) {
    const double delta = sqrt_domain_floor(points, branch);
    auto step = approx_positive_power(kStepExponent, delta, std::min(opts.eps, 1e-6),
                                      opts.degree_cap);
    auto out = apply_polynomial(branch_enc, step);
    out.eps += 1e-10;  // residual x-dependence of the vanishing exponent
    return out;
}

struct Carried {
    EncodedOperator enc;
    double sigma = 1.0;  // block = sigma * (structure), true units
};

/// Sandwich T . (I_N (x) M/div) . T for T = tensorize(sq, p): yields
/// sigma = kappa^{p-1} / div of (+)_i proj^{(x)p-1} (x) (x-sandwich of M)(x_i),
/// with the norm of A unfolded so sigma refers to true units.
Carried sandwich_middle(const EncodedOperator& tens, const MiddleOperator& mid,
                        double kappa_c, int p, double norm_scale) {
    Carried out;
    out.enc = product(tens, product(mid.enc, tens));
    out.sigma = std::pow(kappa_c, p - 1) / (mid.divisor * norm_scale);
    return out;
}

EncodedOperator encode_c_vector(const Vec& c) {
    EncodedOperator out;
    out.block = c * c.transpose();
    out.alpha = 1.0;
    out.eps = 0.0;
    out.ancillas = 0;
    out.cost.primitive_ops =
        std::ceil(std::log2(double(std::max<Eigen::Index>(c.size(), 2))));
    return out;
}

/// Equalize a set of carried encodings to the smallest sigma, optionally with
/// per-element weights, and re-declare a common alpha so lcu_sum accepts them.
void equalize(std::vector<Carried>& parts, const std::vector<double>& weights) {
    double sigma_target = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < parts.size(); ++i)
        sigma_target = std::min(sigma_target, parts[i].sigma / weights[i]);
    double alpha_common = 1.0;
    for (const auto& part : parts) alpha_common = std::max(alpha_common, part.enc.alpha);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double f = sigma_target * weights[i] / parts[i].sigma;
        if (f < 1.0 - 1e-15) parts[i].enc = scale(parts[i].enc, f);
        parts[i].enc = with_alpha(parts[i].enc, alpha_common);
        parts[i].sigma = sigma_target * weights[i];
    }
}

/// Largest feasible amplification toward `target_gain`.
EncodedOperator amplify_feasible(const EncodedOperator& enc, double target_gain,
                                 double* applied_gain) {
    const double norm = spectral_norm_estimate(enc.block);
    double gain = target_gain;
    if (norm * gain > 0.98) gain = std::max(1.0, 0.98 / std::max(norm, 1e-300));
    *applied_gain = gain;
    return amplify(enc, gain);
}

}  // namespace

std::string ScaleLedger::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) os << " * ";
        os << factors[i].first << "=" << factors[i].second;
    }
    return os.str();
}

EncodedOperator load_points(const PointSet& points) {
    const int count = points.count();
    if (count < 1) throw InputError("load_points: empty point set");
    const int n = static_cast<int>(points.points.front().size());
    // |phi> = (1/C) sum_j |j> (x) x_j, then the CNOT copy |j>|j> (x) x_j and a
    // trace over the copy register.
    Vec copied = Vec::Zero(std::int64_t(count) * count * n);
    for (int j = 0; j < count; ++j)
        copied.segment(std::int64_t(j) * count * n + std::int64_t(j) * n, n) =
            points.points[j] / points.c_norm;
    auto out = encode_density(copied, count);
    // Transversal CNOT copy of the log(N)-qubit index register.
    out.cost.primitive_ops += std::ceil(std::log2(double(std::max(count, 2)))) + 1.0;
    return out;
}

EncodedOperator normalize_branch(const EncodedOperator& enc, const PointSet& points,
                                 CBranch* branch_out) {
    if (points.c_norm >= 1.0) {
        if (branch_out) *branch_out = CBranch::CGe1;
        return points.c_squared == 1.0 ? enc : amplify(enc, points.c_squared);
    }
    if (branch_out) *branch_out = CBranch::CLt1;
    return enc;
}

EncodedOperator sqrt_points(const EncodedOperator& enc, const PointSet& points,
                            CBranch branch, const PipelineOptions& opts) {
    const double x_min_eff =
        branch == CBranch::CGe1 ? points.x_min : points.x_min / points.c_squared;
    if (x_min_eff < kPointNormFloor)
        throw InputError("sqrt_points: domain floor below the point-norm floor");
    double delta = sqrt_domain_floor(points, branch);
    if (!opts.use_known_xmin) {
        // Spectral estimation path: take the floor from the spectrum of the
        // loaded operator instead of the classical knowledge of the points.
        Eigen::SelfAdjointEigenSolver<Mat> eig(enc.block);
        double smallest = 1.0;
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
            const double v = eig.eigenvalues()[i];
            if (v > 1e-9) smallest = std::min(smallest, v);
        }
        delta = std::min(0.5, smallest * (1.0 - 1e-6));
    }
    auto poly = approx_positive_power(0.5, delta, opts.eps, opts.degree_cap);
    return apply_polynomial(enc, poly);
}

EncodedOperator tensorize_projectors(const EncodedOperator& enc_sqrt, int p, int n) {
    if (p < 1) throw InputError("tensorize_projectors: p must be >= 1");
    const int count = static_cast<int>(enc_sqrt.block.rows() / n);
    const std::int64_t dim = std::int64_t(count) * ipow(n, p);
    EncodedOperator out;
    out.block = Mat::Zero(dim, dim);
    const std::int64_t bsize = ipow(n, p);
    for (int i = 0; i < count; ++i) {
        Mat factor = Mat::Identity(1, 1);
        for (int t = 0; t < p - 1; ++t) factor = kron(factor, diag_block(enc_sqrt.block, i, n));
        out.block.block(i * bsize, i * bsize, bsize, bsize) =
            kron(factor, Mat::Identity(n, n));
    }
    out.alpha = std::pow(enc_sqrt.alpha, p - 1);
    out.eps = (p - 1) * std::pow(enc_sqrt.alpha, std::max(p - 2, 0)) * enc_sqrt.eps;
    out.ancillas = enc_sqrt.ancillas * std::max(p - 1, 1);
    out.cost = enc_sqrt.cost.repeated(std::max(p - 1, 1));
    out.cost.primitive_ops +=
        (p - 1) * (2.0 * std::ceil(std::log2(double(std::max(n, 2)))) + 1.0);
    out.cost.ancillas_peak = std::max(out.cost.ancillas_peak, out.ancillas);
    return out;
}

namespace {

struct SharedStages {
    EncodedOperator loaded;
    EncodedOperator branch_enc;
    EncodedOperator sqrted;
    CBranch branch;
};

SharedStages run_shared_stages(const PointSet& points, const PipelineOptions& opts) {
    SharedStages st;
    st.loaded = load_points(points);
    st.branch_enc = normalize_branch(st.loaded, points, &st.branch);
    st.sqrted = sqrt_points(st.branch_enc, points, st.branch, opts);
    return st;
}

void check_pipeline_cap(int count, int n, int p, std::int64_t cap) {
    if (std::int64_t(count) * ipow(n, p) > cap)
        throw DimensionCapError("pipeline dimension N*n^p exceeds the configured cap");
}

void push_branch_factors(ScaleLedger& ledger, CBranch branch, const PointSet& points, int p) {
    if (branch == CBranch::CGe1)
        ledger.push("(1/4)^(p-1)", std::pow(0.25, p - 1));
    else
        ledger.push("(1/(4C^2))^(p-1)", std::pow(0.25 / points.c_squared, p - 1));
}

/// Validated spectral bound on H over the sample points. The provable ceiling
/// for a degree-2p homogeneous function with ||A|| <= 1 is p(2p-1); exceeding
/// it means the input skipped normalization.
double validated_shift_bound(const PolySpec& spec, const PointSet& points, double ceiling) {
    double measured = 0.0;
    for (const auto& x : points.points)
        measured = std::max(measured, spectral_norm_estimate(hessian_analytic(spec, x)));
    if (measured > ceiling * (1.0 + 1e-6))
        throw InputError("Hessian norm exceeds the provable bound; spec normalization "
                         "was skipped");
    return std::max(measured * (1.0 + 1e-6), 1e-9);
}

}  // namespace

MultiPointEncoding multi_point_hessian(const HomogeneousSpec& spec, const PointSet& points,
                                       const PipelineOptions& opts) {
    const int n = spec.n();
    const int p = spec.p();
    check_pipeline_cap(points.count(), n, p, opts.dense_cap);
    auto st = run_shared_stages(points, opts);
    auto tens = tensorize_projectors(st.sqrted, p, n);
    auto mid = middle_hessian_operator(spec, points.count(), opts.eps, opts.dense_cap);
    const double kappa_c = branch_kappa(st.branch, points);
    Carried carried = sandwich_middle(tens, mid, kappa_c, p, spec.norm_scale());

    MultiPointEncoding mp;
    mp.enc = std::move(carried.enc);
    mp.points = points;
    mp.branch = st.branch;
    mp.kind = EncodingKind::HessianHomogeneous;
    mp.n = n;
    mp.p = p;
    push_branch_factors(mp.scale, st.branch, points, p);
    mp.scale.push("1/(2*alpha_mid)", 1.0 / mid.divisor);
    mp.scale.push("1/normA", 1.0 / spec.norm_scale());
    mp.shift_bound = validated_shift_bound(
        PolySpec{spec}, points, double(p) * (2.0 * p - 1.0) * spec.norm_scale());
    return mp;
}

EncodedOperator beta_diagonal(const PointSet& points, const Vec& c,
                              double* subnormalization_out) {
    if (std::abs(c.norm() - 1.0) > 1e-9) throw InputError("beta_diagonal: |c| must be 1");
    const int count = points.count();
    const int n = static_cast<int>(c.size());
    auto loaded = load_points(points);
    CBranch branch;
    auto branch_enc = normalize_branch(loaded, points, &branch);
    const double subnorm = branch == CBranch::CGe1 ? 1.0 : 1.0 / points.c_squared;

    // U_beta = ((+)_i c c^T)((+)_i x_i x_i^T) = (+)_i beta_i c x_i^T, then the
    // basis-state sandwich <i, c| U_beta |j, c> = delta_ij beta_i beta_j.
    auto cc_all = tensor(encode_identity(count), encode_c_vector(c));
    auto u_beta = product(cc_all, branch_enc);
    EncodedOperator out;
    out.block = Mat::Zero(count, count);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) {
            Vec probe = Vec::Zero(std::int64_t(count) * n);
            probe.segment(std::int64_t(j) * n, n) = c;
            Vec image = u_beta.block * probe;
            out.block(i, j) = c.dot(image.segment(std::int64_t(i) * n, n));
        }
    out.alpha = u_beta.alpha;
    out.eps = u_beta.eps;
    out.ancillas = u_beta.ancillas + 1;
    out.cost = u_beta.cost;
    out.cost.primitive_ops += 2;  // U_C load and the SWAP of U_s
    if (subnormalization_out) *subnormalization_out = subnorm;
    return out;
}

namespace {

/// One inhomogeneous term's multi-point chain producing
/// block = sigma * (+)_i proj^{(x) p_q - 1} (x) Hdeg_q(x_i), coefficient-free.
Carried term_hessian_chain(const InhomoTerm& term, const PointSet& points,
                           const SharedStages& st, const PipelineOptions& opts, int n,
                           double* beta_sign_out) {
    const auto lift = homogeneous_lift(term, n);
    const int p = lift.p();
    const int count = points.count();
    auto tens = tensorize_projectors(st.sqrted, p, n);
    auto mid = middle_hessian_operator(lift, count, opts.eps, opts.dense_cap);
    const double kappa_c = branch_kappa(st.branch, points);
    Carried hh = sandwich_middle(tens, mid, kappa_c, p, lift.norm_scale());
    if (!term.c) {
        if (beta_sign_out) *beta_sign_out = 1.0;
        return hh;
    }

    // Uniform-positive beta is required by the negative-power removal; an
    // all-negative overlap set is handled by flipping c and the term sign.
    Vec c = *term.c;
    double sign = 1.0;
    double beta_min_sq = std::numeric_limits<double>::infinity();
    {
        int pos = 0, neg = 0;
        for (const auto& x : points.points) {
            const double beta = x.dot(c);
            if (std::abs(beta) < opts.beta_floor)
                throw DegenerateBetaError("beta = x^T c below the floor at a sample point");
            (beta > 0 ? pos : neg)++;
            beta_min_sq = std::min(beta_min_sq, beta * beta);
        }
        if (pos && neg)
            throw DegenerateBetaError(
                "mixed-sign overlaps: the joint beta removal needs one sign across points");
        if (neg) {
            c = -c;
            sign = -1.0;
        }
    }
    if (beta_sign_out) *beta_sign_out = sign;

    // beta^2 diagonal and its lift over the n^p register.
    double beta_subnorm = 1.0;
    auto bdiag = beta_diagonal(points, c, &beta_subnorm);
    auto blift = tensor(bdiag, encode_identity(ipow(n, p)));

    // Term A: (+)_i beta_i^2 proj (x) H(h)(x_i).
    Carried a_part;
    a_part.enc = product(blift, hh.enc);
    a_part.sigma = beta_subnorm * hh.sigma;

    // Term B: (+)_i beta_i proj (x) grad h (x_i) c^T / 2.
    auto midd = middle_gradient_operator(lift, count, opts.eps, opts.dense_cap);
    Carried dchain = sandwich_middle(tens, midd, kappa_c, p, lift.norm_scale());
    auto xx_lift = blockwise_lift_last(st.branch_enc, count, n, p);
    const double xx_factor = st.branch == CBranch::CGe1 ? 1.0 : 1.0 / points.c_squared;
    auto cc_lift = tensor(encode_identity(count * ipow(n, p - 1)), encode_c_vector(c));
    Carried b_part;
    b_part.enc = scale(product(product(dchain.enc, xx_lift), cc_lift), 0.5);
    b_part.sigma = dchain.sigma * xx_factor * 0.5;

    // Term C: the transpose.
    Carried c_part;
    c_part.enc = transpose(b_part.enc);
    c_part.sigma = b_part.sigma;

    std::vector<Carried> parts = {a_part, b_part, c_part};
    equalize(parts, {1.0, 1.0, 1.0});
    Carried p_op;
    p_op.enc = lcu_sum({parts[0].enc, parts[1].enc, parts[2].enc}, {1, 1, 1});
    p_op.sigma = parts[0].sigma / 3.0;  // block = sigma (+)_i beta_i proj (x) Hdeg(x_i)

    // Remove beta_i via the negative-power transform of the beta^2 diagonal.
    const double delta_beta = std::min(0.5, beta_subnorm * beta_min_sq * (1.0 - 1e-12));
    auto neg = approx_negative_power_loose(0.5, delta_beta, std::min(opts.eps, 1e-6),
                                           opts.degree_cap);
    auto binv = apply_polynomial(blift, neg);  // ~ sqrt(delta)/(2 sqrt(sub) beta_i) per block
    Carried removed;
    removed.enc = product(binv, p_op.enc);
    removed.sigma = p_op.sigma * std::sqrt(delta_beta) / (2.0 * std::sqrt(beta_subnorm));

    double applied = 1.0;
    removed.enc = amplify_feasible(removed.enc, p_op.sigma / removed.sigma, &applied);
    removed.sigma *= applied;
    return removed;
}

MultiPointEncoding zero_hessian_encoding(const PointSet& points, int n,
                                         EncodingKind kind) {
    MultiPointEncoding mp;
    mp.enc.block = Mat::Zero(std::int64_t(points.count()) * n, std::int64_t(points.count()) * n);
    mp.points = points;
    mp.kind = kind;
    mp.n = n;
    mp.p = 1;
    mp.scale.push("identity", 1.0);
    mp.shift_bound = 1.0;
    mp.branch = points.c_norm >= 1.0 ? CBranch::CGe1 : CBranch::CLt1;
    return mp;
}

}  // namespace

MultiPointEncoding multi_point_hessian_inhomo(const InhomogeneousSpec& spec,
                                              const PointSet& points,
                                              const PipelineOptions& opts) {
    const int n = spec.n();
    std::vector<const InhomoTerm*> active;
    for (const auto& term : spec.terms())
        if (term.half_degree() >= 1) active.push_back(&term);
    if (active.empty()) return zero_hessian_encoding(points, n, EncodingKind::HessianInhomogeneous);

    int p_common = 1;
    for (const auto* term : active) p_common = std::max(p_common, term->half_degree());
    check_pipeline_cap(points.count(), n, p_common, opts.dense_cap);

    auto st = run_shared_stages(points, opts);
    EncodedOperator uniform;
    bool have_uniform = false;

    std::vector<Carried> parts;
    std::vector<double> weights;
    std::vector<int> signs;
    double shift_bound = 0.0;
    for (const auto* term : active) {
        double beta_sign = 1.0;
        Carried carried = term_hessian_chain(*term, points, st, opts, n, &beta_sign);
        const int p_q = term->half_degree();
        // Lift to the common tensor shape with ~(1/2) projector factors.
        if (p_q < p_common) {
            if (!have_uniform) {
                uniform = uniform_projector(st.branch_enc, points, st.branch, opts);
                have_uniform = true;
            }
            const int delta_p = p_common - p_q;
            EncodedOperator u_pow = uniform;
            for (int t = 1; t < delta_p; ++t)
                u_pow = blockwise_tensor(u_pow, ipow(n, t), uniform, n, points.count());
            carried.enc = blockwise_tensor(u_pow, ipow(n, delta_p), carried.enc,
                                           ipow(n, p_q), points.count());
            carried.sigma *= std::pow(0.5, delta_p);
        }
        const double coeff = term->coeff * beta_sign;
        parts.push_back(std::move(carried));
        weights.push_back(std::abs(coeff));
        signs.push_back(coeff >= 0.0 ? 1 : -1);
        const double norm_bound = homogeneous_lift(*term, n).norm_scale();
        const double pq = double(p_q);
        // Provable per-term ceiling: p(2p-1) for the even part plus the
        // gradient outer products of the linear factor.
        shift_bound += std::abs(term->coeff) * norm_bound *
                       (pq * (2.0 * pq - 1.0) + (term->c ? 4.0 * pq * pq : 0.0));
    }

    MultiPointEncoding mp;
    mp.points = points;
    mp.branch = st.branch;
    mp.kind = EncodingKind::HessianInhomogeneous;
    mp.n = n;
    mp.p = p_common;
    mp.shift_bound =
        validated_shift_bound(PolySpec{spec}, points, std::max(shift_bound, 1e-12));
    if (parts.size() == 1) {
        mp.enc = std::move(parts.front().enc);
        mp.scale.push("sigma_term", parts.front().sigma);
        mp.scale.push("1/coeff", 1.0 / (signs.front() * weights.front()));
    } else {
        equalize(parts, weights);
        std::vector<EncodedOperator> encs;
        for (auto& part : parts) encs.push_back(std::move(part.enc));
        mp.enc = lcu_sum(encs, signs);
        // After equalization part i has sigma = sigma_star * |coeff_i|; the
        // signed average reconstructs sigma_star/m * sum_q coeff_q Hdeg_q.
        mp.scale.push("sigma_star/m", parts.front().sigma / weights.front() /
                                          double(parts.size()));
    }
    return mp;
}

MultiPointEncoding multi_point_encoding(const PolySpec& spec, const PointSet& points,
                                        const PipelineOptions& opts) {
    if (std::holds_alternative<HomogeneousSpec>(spec))
        return multi_point_hessian(std::get<HomogeneousSpec>(spec), points, opts);
    return multi_point_hessian_inhomo(std::get<InhomogeneousSpec>(spec), points, opts);
}

MultiPointEncoding single_point_hessian(const PolySpec& spec, const Vec& x,
                                        const PipelineOptions& opts) {
    return multi_point_encoding(spec, make_point_set({x}), opts);
}

Mat extract_point_block(const MultiPointEncoding& mp, int point_index) {
    if (point_index < 0 || point_index >= mp.points.count())
        throw InputError("extract_point_block: point index out of range");
    const int n = mp.n;
    const std::int64_t bsize = ipow(n, mp.p);
    const Vec& x = mp.points.points[point_index];
    Vec unit = x / x.norm();
    Mat lift = Mat::Ones(1, 1);
    for (int t = 0; t < mp.p - 1; ++t) lift = kron(lift, Mat(unit));
    const Mat full_lift = kron(lift, Mat::Identity(n, n));
    const Mat block = mp.enc.block.block(point_index * bsize, point_index * bsize, bsize, bsize);
    return (full_lift.transpose() * block * full_lift) / mp.scale_factor();
}

std::pair<EncodedOperator, double> masked_identity(const PointSet& points, CBranch branch,
                                                   const EncodedOperator& branch_enc, int p,
                                                   int n, const PipelineOptions& opts) {
    if (p == 1) return {encode_identity(std::int64_t(points.count()) * n), 1.0};
    auto uniform = uniform_projector(branch_enc, points, branch, opts);
    auto lifted = tensorize_projectors(uniform, p, n);
    return {lifted, std::pow(0.5, p - 1)};
}

bool has_identically_zero_hessian(const PolySpec& spec) {
    if (std::holds_alternative<HomogeneousSpec>(spec))
        return std::get<HomogeneousSpec>(spec).entries().empty();
    for (const auto& term : std::get<InhomogeneousSpec>(spec).terms())
        if (term.half_degree() >= 1) return false;
    return true;
}

}  // namespace qconvex
