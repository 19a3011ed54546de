#pragma once

// The geometric family u^(n) = eps q^n: the integral equation F(mu,q) = 0 for its negative
// eigenvalue -mu, and cross-checks against the matrix spectrum.

#include "bo/counterexample_params.hpp"
#include "bo/hardy.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bo {

struct FParts {
    double plus = 0.0;
    double minus = 0.0;
    int order = 0;  ///< Gauss-Jacobi order at which both integrals converged
};

/// F_+ and F_- after the substitution t = q s:
///   F_+ = mu q^mu     int_0^1 s^{eps+mu-1} (1-q^2 s)^eps     (1-s)^{-eps} ds
///   F_- = eps q^{mu+2} int_0^1 s^{eps+mu}   (1-q^2 s)^{eps-1} (1-s)^{-eps} ds
FParts F_parts(double mu, const CounterexampleParams& params, int quad_order = 32);

/// F(mu,q) / q^mu, which has the sign of F and does not underflow for large mu.
double F_scaled(double mu, const CounterexampleParams& params, int quad_order = 32);

struct MuSearch {
    std::optional<double> mu;
    std::string diagnostic;
    int sign_changes = 0;     ///< in the log-spaced pre-scan
    double residual = 0.0;    ///< |F(mu_q, q)|
    double derivative = 0.0;  ///< d F / d mu at the root (central difference)
};

/// Root of F(., q) in [lo, hi]: 200-point log-spaced scan, bisection, secant polish.
MuSearch find_mu(const CounterexampleParams& params, std::pair<double, double> bracket = {1e-3, 1e3},
                 double tol = 1e-12);

struct Lambda0Check {
    double minus_mu = 0.0;
    double lambda0 = 0.0;
    double relative_gap = 0.0;
    int negative_count = 0;
    double gamma1 = 0.0;  ///< lambda_1 - lambda_0 - 1
    int M = 0;
};

/// Compares -mu_q with the lowest eigenvalue of the Lax matrix; M is raised to the decay order
/// of the coefficients (tail below 1e-12) when smaller.
Lambda0Check cross_validate_lambda0(const CounterexampleParams& params, double mu, int M = 0);

struct TrendRow {
    double q = 0.0;
    double eps = 0.0;
    double norm_sqrtlog = 0.0;  ///< ||u_{0,q}||_{-1/2, sqrt(log)}
    double first_coeff = 0.0;   ///< u^(1) = eps q
};

/// Norm and first Fourier coefficient of the family along `qgrid`.
std::vector<TrendRow> norm_and_weak_trend(double beta, const std::vector<double>& qgrid);

}  // namespace bo
