#pragma once

// Numerical inverse of the Birkhoff map posed as a nonlinear least-squares problem.

#include "bo/birkhoff.hpp"

#include <optional>
#include <vector>

namespace bo {

struct InverseOptions {
    int n_max = 0;              ///< number of unknown modes; 0 picks min(K, 16)
    int max_iterations = 50;
    double residual_tol = 1e-10;
    double gradient_tol = 1e-12;
    double fd_relative_step = 1e-6;
    double fd_min_step = 1e-8;
    int max_halvings = 30;
    /// Start here instead of the linearization -sqrt(n) zeta_n.
    std::optional<PotentialSpectrum> initial_guess;
    /// Start from this Jacobian (2K x 2 n_max) and update it with Broyden steps; a fresh
    /// finite-difference Jacobian replaces it whenever a step fails to reduce the residual.
    std::optional<Eigen::MatrixXd> initial_jacobian;
    /// With false, a failed Broyden step ends the solve instead of rebuilding the Jacobian.
    /// Continuation uses this to retry with a shorter step, which is far cheaper at large M.
    bool refresh_jacobian = true;
};

struct InverseIteration {
    int iteration;
    double residual;
    double step_norm;
};

struct InverseResult {
    PotentialSpectrum u;
    double residual = 0.0;  ///< ||Phi(u) - zeta_target||_{l^2}
    bool converged = false;
    int iterations = 0;
    int forward_evaluations = 0;
    std::vector<InverseIteration> log;
    Eigen::MatrixXd jacobian;  ///< last Jacobian, reusable for a nearby target
};

/// Damped Gauss-Newton for  min_u ||Phi(u) - zeta_target||^2  over u^(1..n_max), at truncation M.
/// Non-convergence is not an error: the best iterate is returned with converged = false.
InverseResult birkhoff_inverse(const CVector<double>& zeta_target, int M, const InverseOptions& options = {});

inline InverseResult birkhoff_inverse(const BirkhoffCoordinates& target, int M, const InverseOptions& options = {}) {
    return birkhoff_inverse(target.zetas, M, options);
}

}  // namespace bo
