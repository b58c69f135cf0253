#include "qconvex/newton.hpp"

#include <cmath>

namespace qconvex {
namespace {

struct StateView {
    Vec unit;        // principal eigenvector of the x x^T block
    double norm_sq;  // |x|^2, the block's trace
};

/// The outer product loses the iterate's sign; for odd terms the Hessian
/// depends on it, so all chains of one step must share a frame. The hint
/// (newton_run's classical reference) picks it; otherwise the sign is
/// canonicalized on the largest component.
StateView view_state(const EncodedOperator& x_enc, const Vec* frame_hint) {
    StateView out;
    out.norm_sq = x_enc.block.trace();
    if (out.norm_sq < 1e-300) throw SingularOperatorError("iterate collapsed to zero");
    Eigen::SelfAdjointEigenSolver<Mat> eig(x_enc.block);
    const Eigen::Index top = x_enc.block.rows() - 1;  // eigenvalues ascending
    out.unit = eig.eigenvectors().col(top);
    double orientation = 0.0;
    if (frame_hint && frame_hint->size() == out.unit.size())
        orientation = out.unit.dot(*frame_hint);
    if (orientation == 0.0) {
        Eigen::Index imax = 0;
        out.unit.cwiseAbs().maxCoeff(&imax);
        orientation = out.unit[imax];
    }
    if (orientation < 0.0) out.unit = -out.unit;
    return out;
}

EncodedOperator encode_state_outer(const Vec& x) {
    EncodedOperator out;
    out.block = x * x.transpose();
    out.alpha = 1.0;
    out.eps = 0.0;
    out.cost.primitive_ops =
        std::ceil(std::log2(double(std::max<Eigen::Index>(x.size(), 2))));
    return out;
}

EncodedOperator encode_c_outer(const Vec& c) {
    EncodedOperator out;
    out.block = c * c.transpose();
    out.alpha = 1.0;
    out.eps = 0.0;
    out.cost.primitive_ops =
        std::ceil(std::log2(double(std::max<Eigen::Index>(c.size(), 2))));
    return out;
}

/// (x x^T)^{(x) k} via repeated tensor composition; k = 0 gives the 1x1 one.
EncodedOperator tensor_power(const EncodedOperator& x_enc, int k) {
    EncodedOperator out;
    out.block = Mat::Ones(1, 1);
    out.alpha = 1.0;
    for (int i = 0; i < k; ++i) out = tensor(out, x_enc);
    return out;
}

/// Contract the leading p-1 tensor slots against x_hat (projector removal)
/// and amplify the known |x|^{2(p-1)} away. Returns an n x n encoding whose
/// block equals `gain_adjusted * inner operator`.
EncodedOperator remove_leading_slots(const EncodedOperator& big, const StateView& st, int n,
                                     int p, double* residual) {
    *residual = 1.0;
    if (p == 1) return big;
    Mat lift = Mat::Ones(1, 1);
    for (int t = 0; t < p - 1; ++t) lift = kron(lift, Mat(st.unit));
    const Mat full_lift = kron(lift, Mat::Identity(n, n));
    EncodedOperator out = big;
    out.block = full_lift.transpose() * big.block * full_lift;
    out.cost = big.cost.repeated(std::pow(4.0, p - 1));  // gamma^{2(p-1)} envelope
    const double prefactor = std::pow(st.norm_sq, p - 1);
    const double gain = 1.0 / prefactor;
    const double norm = spectral_norm_estimate(out.block);
    if (norm * gain <= 1.0 + kBlockNormTol) {
        out = amplify(out, gain);
    } else {
        // Keep the feasible part of the removal; the remainder stays in scale.
        const double partial = std::max(1.0, 1.0 / std::max(norm, 1e-300));
        out = amplify(out, partial);
        *residual = partial * prefactor;
    }
    return out;
}

/// sigma * D_true(x), n x n, from the M_D sandwich of one homogeneous block.
KnownEncoding gradient_operator_encoding(const HomogeneousSpec& lift,
                                         const EncodedOperator& x_enc, const StateView& st,
                                         const NewtonConfig& cfg) {
    const int n = lift.n();
    const int p = lift.p();
    const double s = lift.sparsity();
    auto md = encode_sparse(build_MD(lift), cfg.pipeline.eps, s * p, cfg.pipeline.dense_cap);
    auto tens = tensor(tensor_power(x_enc, p - 1), encode_identity(n));
    auto big = product(tens, product(md, tens));
    double residual = 1.0;
    auto reduced = remove_leading_slots(big, st, n, p, &residual);
    KnownEncoding out;
    out.enc = std::move(reduced);
    out.scale = residual / (s * p * lift.norm_scale());
    return out;
}

/// sigma * h_true(x) x x^T from the full (x x^T)^{(x)p} sandwich of A/(2s).
KnownEncoding h_value_outer_encoding(const HomogeneousSpec& lift,
                                     const EncodedOperator& x_enc, const StateView& st,
                                     const NewtonConfig& cfg) {
    const int n = lift.n();
    const int p = lift.p();
    const double s = lift.sparsity();
    auto a_enc =
        encode_sparse(as_operator(lift), cfg.pipeline.eps, 2.0 * s, cfg.pipeline.dense_cap);
    auto tp = tensor_power(x_enc, p);
    auto big = product(tp, product(a_enc, tp));
    double residual = 1.0;
    auto reduced = remove_leading_slots(big, st, n, p, &residual);
    KnownEncoding out;
    out.enc = std::move(reduced);
    out.scale = residual / (s * lift.norm_scale());
    return out;
}

struct TermPiece {
    EncodedOperator enc;
    double sigma = 1.0;
    double coeff = 1.0;  // signed, after any c-flip
};

void equalize_pieces(std::vector<TermPiece>& pieces, bool weight_by_coeff) {
    double sigma_target = std::numeric_limits<double>::infinity();
    double alpha_common = 1.0;
    for (const auto& piece : pieces) {
        const double w = weight_by_coeff ? std::abs(piece.coeff) : 1.0;
        sigma_target = std::min(sigma_target, piece.sigma / w);
        alpha_common = std::max(alpha_common, piece.enc.alpha);
    }
    for (auto& piece : pieces) {
        const double w = weight_by_coeff ? std::abs(piece.coeff) : 1.0;
        const double f = sigma_target * w / piece.sigma;
        if (f < 1.0 - 1e-15) piece.enc = scale(piece.enc, f);
        piece.enc.alpha = alpha_common;
        piece.sigma = sigma_target * w;
    }
}

/// Flip c (and the term sign) so the overlap beta = x^T c is positive; the
/// represented objects are invariant under the joint flip.
struct OrientedTerm {
    Vec c;
    double coeff;
    double beta;  // >= beta_floor
};

OrientedTerm orient_term(const InhomoTerm& term, const StateView& st, double beta_floor) {
    OrientedTerm out;
    out.c = *term.c;
    out.coeff = term.coeff;
    const double beta = std::sqrt(st.norm_sq) * st.unit.dot(out.c);
    if (std::abs(beta) < beta_floor)
        throw DegenerateBetaError("newton: |x^T c| below the beta floor");
    if (beta < 0) {
        out.c = -out.c;
        out.coeff = -out.coeff;
        out.beta = -beta;
    } else {
        out.beta = beta;
    }
    return out;
}

std::vector<TermPiece> gradient_term_pieces(const PolySpec& spec,
                                            const EncodedOperator& x_enc, const StateView& st,
                                            const NewtonConfig& cfg) {
    std::vector<TermPiece> pieces;
    if (std::holds_alternative<HomogeneousSpec>(spec)) {
        const auto& homo = std::get<HomogeneousSpec>(spec);
        auto d_enc = gradient_operator_encoding(homo, x_enc, st, cfg);
        TermPiece piece;
        piece.enc = product(d_enc.enc, x_enc);
        piece.sigma = d_enc.scale;
        piece.coeff = 1.0;
        pieces.push_back(std::move(piece));
        return pieces;
    }
    const auto& inhomo = std::get<InhomogeneousSpec>(spec);
    const int n = inhomo.n();
    for (const auto& term : inhomo.terms()) {
        if (term.coeff == 0.0) continue;
        if (!term.c) {
            const auto lift = homogeneous_lift(term, n);
            auto d_enc = gradient_operator_encoding(lift, x_enc, st, cfg);
            TermPiece piece;
            piece.enc = product(d_enc.enc, x_enc);
            piece.sigma = d_enc.scale;
            piece.coeff = term.coeff;
            pieces.push_back(std::move(piece));
            continue;
        }
        auto oriented = orient_term(term, st, cfg.pipeline.beta_floor);
        auto cc = encode_c_outer(oriented.c);
        if (term.half_degree() == 0) {
            // Pure linear: (c c^T)(x x^T) = beta c x^T, then the beta removal.
            TermPiece piece;
            piece.enc = amplify(product(cc, x_enc), 1.0 / oriented.beta);
            piece.sigma = 1.0;
            piece.coeff = oriented.coeff;
            pieces.push_back(std::move(piece));
            continue;
        }
        const auto lift = homogeneous_lift(term, n);
        auto d_enc = gradient_operator_encoding(lift, x_enc, st, cfg);
        auto xc = product(x_enc, cc);             // beta x c^T
        auto e1 = product(d_enc.enc, xc);         // sigma beta grad-h c^T
        auto cx = product(cc, x_enc);             // beta c x^T
        TermPiece grad_part;                      // structure beta^2 grad-h x^T
        grad_part.enc = product(e1, cx);
        grad_part.sigma = d_enc.scale;

        auto hv = h_value_outer_encoding(lift, x_enc, st, cfg);
        TermPiece value_part;                     // structure beta h(x) c x^T
        value_part.enc = product(cc, hv.enc);
        if (lift.p() > 1) value_part.enc = scale(value_part.enc, 1.0 / lift.p());
        value_part.sigma = hv.scale * (lift.p() > 1 ? 1.0 / lift.p() : 1.0);

        // Summed structure: beta (beta grad-h + h c) x^T = beta grad-g x^T.
        std::vector<TermPiece> two = {grad_part, value_part};
        equalize_pieces(two, false);
        TermPiece sum;
        sum.enc = lcu_sum({two[0].enc, two[1].enc}, {1, 1});
        sum.sigma = two[0].sigma / 2.0;
        sum.enc = amplify(sum.enc, 1.0 / oriented.beta);  // the known-overlap removal
        sum.coeff = oriented.coeff;
        pieces.push_back(std::move(sum));
    }
    return pieces;
}

std::vector<TermPiece> hessian_term_pieces(const PolySpec& spec, const EncodedOperator& x_enc,
                                           const StateView& st, const NewtonConfig& cfg) {
    std::vector<TermPiece> pieces;
    auto hessian_of_lift = [&](const HomogeneousSpec& lift) {
        const int n = lift.n();
        const int p = lift.p();
        const double s = lift.sparsity();
        EncodedOperator mid;
        double divisor = 1.0;
        if (p == 1) {
            mid = scale(encode_sparse(build_MD(lift), cfg.pipeline.eps, s,
                                      cfg.pipeline.dense_cap),
                        0.5);
            divisor = 2.0 * s;
        } else {
            auto mh_op = build_MH(lift);
            const double budget_h =
                std::max(2.0 * s * p * (p - 1), mh_op.max_abs_row_sum());
            const double alpha_mid = std::max(budget_h, s * double(p) * double(p));
            auto mh = rescale_alpha(encode_sparse(mh_op, cfg.pipeline.eps, budget_h,
                                                  cfg.pipeline.dense_cap),
                                    alpha_mid);
            auto md = rescale_alpha(encode_sparse(build_MD(lift), cfg.pipeline.eps, s * p,
                                                  cfg.pipeline.dense_cap),
                                    alpha_mid);
            mid = lcu_sum({mh, md}, {1, 1});
            divisor = 2.0 * alpha_mid;
        }
        auto tens = tensor(tensor_power(x_enc, p - 1), encode_identity(n));
        auto big = product(tens, product(mid, tens));
        double residual = 1.0;
        auto reduced = remove_leading_slots(big, st, n, p, &residual);
        KnownEncoding out;
        out.enc = std::move(reduced);
        out.scale = residual / (divisor * lift.norm_scale());
        return out;
    };

    if (std::holds_alternative<HomogeneousSpec>(spec)) {
        auto h = hessian_of_lift(std::get<HomogeneousSpec>(spec));
        TermPiece piece;
        piece.enc = std::move(h.enc);
        piece.sigma = h.scale;
        piece.coeff = 1.0;
        pieces.push_back(std::move(piece));
        return pieces;
    }
    const auto& inhomo = std::get<InhomogeneousSpec>(spec);
    const int n = inhomo.n();
    for (const auto& term : inhomo.terms()) {
        if (term.coeff == 0.0 || term.half_degree() == 0) continue;  // linear: H = 0
        const auto lift = homogeneous_lift(term, n);
        auto hh = hessian_of_lift(lift);
        if (!term.c) {
            TermPiece piece;
            piece.enc = std::move(hh.enc);
            piece.sigma = hh.scale;
            piece.coeff = term.coeff;
            pieces.push_back(std::move(piece));
            continue;
        }
        auto oriented = orient_term(term, st, cfg.pipeline.beta_floor);
        auto cc = encode_c_outer(oriented.c);

        TermPiece beta_h;  // structure beta H(h): the known overlap enters by scaling
        beta_h.enc = scale(hh.enc, oriented.beta);
        beta_h.sigma = hh.scale;

        auto d_enc = gradient_operator_encoding(lift, x_enc, st, cfg);
        auto xc = product(x_enc, cc);
        auto e1 = product(d_enc.enc, xc);  // sigma beta grad-h c^T
        TermPiece ghc;
        ghc.enc = amplify(e1, 1.0 / oriented.beta);
        ghc.sigma = d_enc.scale;
        TermPiece cgh;
        cgh.enc = transpose(ghc.enc);
        cgh.sigma = ghc.sigma;

        std::vector<TermPiece> three = {beta_h, ghc, cgh};
        equalize_pieces(three, false);
        TermPiece sum;
        sum.enc = lcu_sum({three[0].enc, three[1].enc, three[2].enc}, {1, 1, 1});
        sum.sigma = three[0].sigma / 3.0;
        sum.coeff = oriented.coeff;
        pieces.push_back(std::move(sum));
    }
    return pieces;
}

KnownEncoding assemble_pieces(std::vector<TermPiece> pieces, int n) {
    KnownEncoding out;
    if (pieces.empty()) {
        out.enc.block = Mat::Zero(n, n);
        out.scale = 1.0;
        return out;
    }
    if (pieces.size() == 1) {
        out.enc = std::move(pieces.front().enc);
        out.scale = pieces.front().sigma / pieces.front().coeff;
        return out;
    }
    equalize_pieces(pieces, true);
    std::vector<EncodedOperator> encs;
    std::vector<int> signs;
    for (auto& piece : pieces) {
        signs.push_back(piece.coeff >= 0.0 ? 1 : -1);
        encs.push_back(std::move(piece.enc));
    }
    const double sigma_star = pieces.front().sigma / std::abs(pieces.front().coeff);
    out.enc = lcu_sum(encs, signs);
    out.scale = sigma_star / double(pieces.size());
    return out;
}

}  // namespace

KnownEncoding gradient_outer_encoding(const PolySpec& spec, const EncodedOperator& x_enc,
                                      const NewtonConfig& cfg, const Vec* frame_hint) {
    const auto st = view_state(x_enc, frame_hint);
    return assemble_pieces(gradient_term_pieces(spec, x_enc, st, cfg), spec_n(spec));
}

KnownEncoding hessian_encoding_from_state(const PolySpec& spec, const EncodedOperator& x_enc,
                                          const NewtonConfig& cfg, const Vec* frame_hint) {
    const auto st = view_state(x_enc, frame_hint);
    return assemble_pieces(hessian_term_pieces(spec, x_enc, st, cfg), spec_n(spec));
}

KnownEncoding hessian_inverse_encoding(const PolySpec& spec, const EncodedOperator& x_enc,
                                       double kappa, const NewtonConfig& cfg,
                                       const Vec* frame_hint) {
    auto h = hessian_encoding_from_state(spec, x_enc, cfg, frame_hint);
    if (h.scale <= 0.0) throw SingularOperatorError("hessian encoding has nonpositive scale");
    const double kappa_block = kappa / h.scale;
    auto inv = pseudo_inverse(h.enc, kappa_block, cfg.pipeline.eps);
    KnownEncoding out;
    out.enc = std::move(inv);
    out.scale = 1.0 / kappa;  // block = H^{-1} / kappa on the kept subspace
    return out;
}

EncodedOperator newton_step(const EncodedOperator& x_enc, const KnownEncoding& grad_outer,
                            const KnownEncoding& h_inv, double eta,
                            double* amplification_out) {
    if (!(eta > 0.0) || eta > 1.0) throw InputError("newton_step: eta must be in (0, 1]");
    if (x_enc.block.rows() != grad_outer.enc.block.rows() ||
        x_enc.block.rows() != h_inv.enc.block.rows())
        throw InputError("newton_step: dimension mismatch");

    const double norm_sq = x_enc.block.trace();
    TermPiece t1;
    t1.enc = x_enc;
    t1.sigma = 1.0;

    TermPiece t2;
    t2.enc = product(h_inv.enc, grad_outer.enc);
    t2.sigma = h_inv.scale * grad_outer.scale;
    TermPiece t3;
    t3.enc = transpose(t2.enc);
    t3.sigma = t2.sigma;

    TermPiece t4;
    t4.enc = product(t2.enc, t3.enc);  // sigma^2 |x|^2 u u^T
    {
        const double gain = 1.0 / std::max(norm_sq, 1e-12);
        const double norm = spectral_norm_estimate(t4.enc.block);
        if (norm * gain <= 1.0 + kBlockNormTol) {
            t4.enc = amplify(t4.enc, gain);
            t4.sigma = t2.sigma * t2.sigma;
        } else {
            t4.sigma = t2.sigma * t2.sigma * norm_sq;
        }
    }

    // Common scale with weights (1, eta, eta, eta^2), then the signed average
    // reconstructs (sigma*/4) x' x'^T.
    std::vector<TermPiece> parts = {t1, t2, t3, t4};
    const std::vector<double> weights = {1.0, eta, eta, eta * eta};
    {
        double sigma_target = std::numeric_limits<double>::infinity();
        double alpha_common = 1.0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            sigma_target = std::min(sigma_target, parts[i].sigma / weights[i]);
            alpha_common = std::max(alpha_common, parts[i].enc.alpha);
        }
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double f = sigma_target * weights[i] / parts[i].sigma;
            if (f < 1.0 - 1e-15) parts[i].enc = scale(parts[i].enc, f);
            parts[i].enc.alpha = alpha_common;
            parts[i].sigma = sigma_target * weights[i];
        }
        auto next = lcu_sum({parts[0].enc, parts[1].enc, parts[2].enc, parts[3].enc},
                            {1, -1, -1, 1});
        // Remove the tracked (sigma*/4) residue; infeasibility here means the
        // iterate left the unit ball.
        if (amplification_out) *amplification_out = 4.0 / sigma_target;
        return amplify(next, 4.0 / sigma_target);
    }
}

std::vector<Vec> classical_newton_oracle(const PolySpec& spec, const Vec& x0,
                                         const NewtonConfig& cfg) {
    std::vector<Vec> iterates = {x0};
    Vec x = x0;
    for (int t = 0; t < cfg.max_steps; ++t) {
        const Vec grad = gradient_analytic(spec, x);
        if (grad.norm() <= cfg.grad_tol) break;
        const Mat hess = hessian_analytic(spec, x);
        Eigen::SelfAdjointEigenSolver<Mat> eig(hess);
        double min_abs = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
            if (std::abs(eig.eigenvalues()[i]) > 1e-14)
                min_abs = std::min(min_abs, std::abs(eig.eigenvalues()[i]));
        if (!std::isfinite(min_abs)) throw SingularOperatorError("classical oracle: H = 0");
        const double kappa = std::min((1.0 + 1e-3) / min_abs, cfg.kappa_cap);
        const double cutoff = (1.0 - 1e-6) / kappa;
        Vec inv_vals = eig.eigenvalues();
        int kept = 0;
        for (Eigen::Index i = 0; i < inv_vals.size(); ++i) {
            if (std::abs(inv_vals[i]) >= cutoff) {
                inv_vals[i] = 1.0 / inv_vals[i];
                ++kept;
            } else {
                inv_vals[i] = 0.0;
            }
        }
        if (kept == 0) throw SingularOperatorError("classical oracle: singular Hessian");
        const Mat hinv =
            eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
        x = x - cfg.eta * (hinv * grad);
        iterates.push_back(x);
    }
    return iterates;
}

NewtonTrace newton_run(const PolySpec& spec, const Vec& x0, const NewtonConfig& cfg) {
    if (x0.squaredNorm() > 1.0 + 1e-12)
        throw InputError("newton_run: x0 must lie in the unit ball");
    NewtonTrace trace;
    trace.classical = classical_newton_oracle(spec, x0, cfg);

    EncodedOperator x_enc = encode_state_outer(x0);
    Cost accumulated = x_enc.cost;
    for (int t = 0; t <= cfg.max_steps; ++t) {
        const Vec& ref =
            trace.classical[std::min<std::size_t>(t, trace.classical.size() - 1)];
        Vec x;
        if (x_enc.block.trace() < 1e-24) {
            x = Vec::Zero(x_enc.block.rows());  // minimizer at the origin
        } else {
            // Frame fixed by the classical reference: the outer product loses
            // the sign, and the chains below must share one representative.
            const auto st = view_state(x_enc, &ref);
            x = st.unit * std::sqrt(st.norm_sq);
        }

        NewtonStepRecord rec;
        rec.step = t;
        rec.x = x;
        rec.f_value = eval(spec, x);
        rec.grad_norm = gradient_analytic(spec, x).norm();
        rec.kappa = 1.0;
        rec.gamma_scale = 1.0;

        if (rec.grad_norm <= cfg.grad_tol) {
            trace.steps.push_back(std::move(rec));
            trace.converged = true;
            break;
        }
        if (t == cfg.max_steps) {
            trace.steps.push_back(std::move(rec));
            break;
        }

        try {
            auto h = hessian_encoding_from_state(spec, x_enc, cfg, &x);
            Cost eig_cost;
            const double min_block =
                min_eigenvalue_magnitude(h.enc, cfg.delta_eig * h.scale, cfg.seed + t,
                                         &eig_cost);
            accumulated = accumulated.merged(eig_cost);
            const double min_abs = min_block / h.scale;
            if (min_abs < 1e-12) throw SingularOperatorError("newton: singular Hessian");
            rec.kappa = std::min((1.0 + 1e-3) / min_abs, cfg.kappa_cap);

            auto grad_outer = gradient_outer_encoding(spec, x_enc, cfg, &x);
            auto h_inv = hessian_inverse_encoding(spec, x_enc, rec.kappa, cfg, &x);
            double applied_gain = 1.0;
            auto next = newton_step(x_enc, grad_outer, h_inv, cfg.eta, &applied_gain);
            rec.gamma_scale = applied_gain;
            trace.steps.push_back(std::move(rec));
            x_enc = std::move(next);
            accumulated = accumulated.merged(x_enc.cost);
        } catch (const AmplificationError& e) {
            trace.steps.push_back(std::move(rec));
            trace.diverged = true;
            trace.divergence_reason = e.what();
            break;
        } catch (const SingularOperatorError& e) {
            trace.steps.push_back(std::move(rec));
            trace.diverged = true;
            trace.divergence_reason = e.what();
            break;
        } catch (const DegenerateBetaError& e) {
            trace.steps.push_back(std::move(rec));
            trace.diverged = true;
            trace.divergence_reason = e.what();
            break;
        }
    }
    trace.cost = accumulated;
    return trace;
}

}  // namespace qconvex
