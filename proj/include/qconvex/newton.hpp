#pragma once

#include "qconvex/spectral_test.hpp"

namespace qconvex {

struct NewtonConfig {
    double eta = 0.5;       // step size, (0, 1]
    int max_steps = 10;
    double grad_tol = 1e-9;
    double kappa_cap = 1e8;
    double delta_eig = 1e-3;  // accuracy charged for the min-eigenvalue estimate
    std::uint64_t seed = 0;
    PipelineOptions pipeline;
};

/// Encoding plus the known constant relating its block to the object it
/// carries: block = scale * object.
struct KnownEncoding {
    EncodedOperator enc;
    double scale = 1.0;
};

struct NewtonStepRecord {
    int step = 0;
    Vec x;             // sign aligned with the classical oracle for reporting
    double grad_norm = 0.0;
    double f_value = 0.0;
    double kappa = 1.0;
    double gamma_scale = 1.0;  // tracked per-step amplification residue
};

struct NewtonTrace {
    std::vector<NewtonStepRecord> steps;
    std::vector<Vec> classical;  // oracle iterates from the same x0
    bool converged = false;
    bool diverged = false;
    std::string divergence_reason;
    Cost cost;
};

/// Encoding of grad g(x) x^T / p from the encoding of x x^T, via the M_D
/// sandwich chain and the c-overlap removal for inhomogeneous terms.
/// The outer product leaves the iterate's sign free; `frame_hint` selects the
/// representative (for odd terms the result depends on it; the construction
/// assumes a positive c-overlap). Without a hint the sign is canonicalized.
KnownEncoding gradient_outer_encoding(const PolySpec& spec, const EncodedOperator& x_enc,
                                      const NewtonConfig& cfg = {},
                                      const Vec* frame_hint = nullptr);

/// Encoding of H(x) (well-conditioned subspace inverted downstream).
KnownEncoding hessian_encoding_from_state(const PolySpec& spec, const EncodedOperator& x_enc,
                                          const NewtonConfig& cfg = {},
                                          const Vec* frame_hint = nullptr);

/// block = H(x)^{-1} / (scale * Gamma) on the kept eigenspace.
KnownEncoding hessian_inverse_encoding(const PolySpec& spec, const EncodedOperator& x_enc,
                                       double kappa, const NewtonConfig& cfg = {},
                                       const Vec* frame_hint = nullptr);

/// One iterate of the four-term outer-product expansion
/// x' x'^T = (x - eta H^{-1} grad)(x - eta H^{-1} grad)^T. The final
/// amplification gain (where the per-step scale growth lives) is reported via
/// `amplification_out` when requested.
EncodedOperator newton_step(const EncodedOperator& x_enc, const KnownEncoding& grad_outer,
                            const KnownEncoding& h_inv, double eta,
                            double* amplification_out = nullptr);

NewtonTrace newton_run(const PolySpec& spec, const Vec& x0, const NewtonConfig& cfg);

/// Dense analytic-gradient/Hessian Newton iteration with the same
/// well-conditioned-subspace inversion rule; the truth oracle for newton_run.
std::vector<Vec> classical_newton_oracle(const PolySpec& spec, const Vec& x0,
                                         const NewtonConfig& cfg);

}  // namespace qconvex
