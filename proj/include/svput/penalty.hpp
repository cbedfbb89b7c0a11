#pragma once

#include "svput/errors.hpp"

namespace svput {

/// Parameters of the penalty term beta_eps. The depth C0 = 2 r (K+1) is
/// exactly the value required for the smoothed payoff to stay a subsolution
/// of the penalized equation.
struct PenaltyParams {
    double epsilon = 1e-3; ///< smoothing scale, > 0
    double C0 = 0.0;       ///< penalty depth, 2 r (K+1)

    PenaltyParams(double eps, double r, double strike)
        : epsilon(eps), C0(2.0 * r * (strike + 1.0)) {
        if (!(eps > 0.0)) throw parameter_error("penalty: epsilon must be > 0");
    }
    static PenaltyParams with_depth(double eps, double c0) {
        PenaltyParams p(eps, 0.0, 0.0);
        p.C0 = c0;
        return p;
    }
};

/// Penalty function beta_eps(xi) = -C0 * exp(-xi/eps).
///
/// Satisfies beta <= 0, beta(0) = -C0, beta' >= 0, beta'' <= 0,
/// beta -> 0 as xi -> +inf, and beta(xi) -> -inf as eps -> 0 for xi < 0.
/// For xi/eps < -700 the exponential would overflow; returns -inf as a
/// saturation sentinel, which the solver treats as an obstacle-violation flag.
double beta(double xi, const PenaltyParams& p);

/// Exact derivative of beta: (C0/eps) * exp(-xi/eps). Saturates to +inf
/// together with beta.
double beta_prime(double xi, const PenaltyParams& p);

/// C^1 smoothing of the positive part: xi for xi >= eps, 0 for xi <= -eps,
/// (xi+eps)^2/(4 eps) on the blend. Nondecreasing, convex on the blend,
/// pi' in [0,1], and |pi(xi) - xi^+| <= eps/4 everywhere.
double pi_smooth(double xi, double epsilon);

/// Exact derivative of pi_smooth.
double pi_prime(double xi, double epsilon);

} // namespace svput
