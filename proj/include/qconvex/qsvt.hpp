#pragma once

#include "qconvex/block_encoding.hpp"

namespace qconvex {

enum class PowerTarget { PosPower, NegPower };

/// Even polynomial approximant P(x) = Q(x^2) with Q held in the shifted
/// Chebyshev basis on [0,1]. Targets:
///   pos_power(c): 0.5 x^c          on [delta, 1], |P| <= 1  on [-1, 1]
///   neg_power(c): (delta^c/2) x^-c on [delta, 1], |P| <= 1/2 on [-1, 1]
/// Below delta the target is blended smoothly to zero, so P(0) ~ 0.
struct ApproxPoly {
    std::vector<double> coeffs;  // Chebyshev coefficients of Q on [0,1]
    int degree = 0;              // degree of P, = 2*(coeffs.size()-1)
    double domain_floor = 0.0;   // delta
    PowerTarget target = PowerTarget::PosPower;
    double power = 0.5;          // c
    double sup_error = 0.0;      // measured on [delta, 1]

    double evaluate(double x) const;
    double max_abs_on_grid(double lo, double hi, int samples = 2001) const;
    double max_derivative_on_grid(double lo, double hi, int samples = 2001) const;
};

ApproxPoly approx_positive_power(double c, double delta, double eps, int degree_cap = 32768);
ApproxPoly approx_negative_power(double c, double delta, double eps, int degree_cap = 32768);

/// Negative-power approximant without the 1/2 cap below delta (smooth blend,
/// much lower degree). Valid whenever the transformed operator has no
/// eigenvalues under delta, which holds for the beta-diagonal removal.
ApproxPoly approx_negative_power_loose(double c, double delta, double eps,
                                       int degree_cap = 32768);

/// Eigenvalue transform of a Hermitian block (singular value transformation
/// semantics):
/// block -> P(block), alpha -> 1, eps -> min(4 d sqrt(eps/alpha), L_P eps) +
/// sup_error, cost multiplied by the degree (d applications of U).
EncodedOperator apply_polynomial(const EncodedOperator& a, const ApproxPoly& poly);

/// Well-conditioned-subspace inversion: block -> (1/Gamma) block^+ with
/// Gamma = kappa; eigenvalues below (1 - 1e-6)/kappa are zeroed.
EncodedOperator pseudo_inverse(const EncodedOperator& a, double kappa, double eps);

}  // namespace qconvex
