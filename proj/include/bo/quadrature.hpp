#pragma once

// Gauss-Jacobi rules on [0,1] for integrands with algebraic endpoint singularities.

#include "bo/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bo {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Nodes and weights for  int_0^1 f(s) (1-s)^alpha s^beta ds  (Golub-Welsch).
inline QuadratureRule gauss_jacobi01(int order, double alpha, double beta) {
    if (order < 1) throw ValidationError("quadrature order must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw ValidationError("Jacobi exponents must exceed -1");
    const double a = alpha, b = beta, ab = a + b;

    // Jacobi matrix of the monic recurrence on [-1,1] with weight (1-x)^a (1+x)^b
    Eigen::VectorXd diag(order), sub(std::max(order - 1, 1));
    diag[0] = (b - a) / (ab + 2.0);
    for (int n = 1; n < order; ++n) {
        const double t = 2.0 * n + ab;
        diag[n] = (b * b - a * a) / (t * (t + 2.0));
        if (n == 1) {
            // closed form avoids 0/0 at a + b = -1
            sub[0] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab)));
        } else {
            sub[n - 1] = std::sqrt(4.0 * n * (n + a) * (n + b) * (n + ab) / (t * t * (t + 1.0) * (t - 1.0)));
        }
    }

    QuadratureRule rule;
    // B(alpha+1, beta+1) is the total mass of the weight on [0,1]
    const double mass = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
    if (order == 1) {
        rule.nodes = Eigen::VectorXd::Constant(1, 0.5 * (1.0 + diag[0]));
        rule.weights = Eigen::VectorXd::Constant(1, mass);
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(order - 1), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed");
    rule.nodes = (solver.eigenvalues().array() + 1.0) * 0.5;
    rule.weights = mass * solver.eigenvectors().row(0).transpose().array().square();
    return rule;
}

/// Integral with the rule of the given order.
template <typename F>
double integrate(const QuadratureRule& rule, F&& f) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

struct AdaptiveResult {
    double value = 0.0;
    int order = 0;
    double relative_change = 0.0;
};

/// Doubles the order from `start_order` until successive values agree to `rel_tol`.
template <typename F>
AdaptiveResult integrate_jacobi(F&& f, double alpha, double beta, int start_order = 32, double rel_tol = 1e-10,
                                int max_order = 2048) {
    int order = std::max(start_order, 2);
    double prev = integrate(gauss_jacobi01(order, alpha, beta), f);
    while (order < max_order) {
        order *= 2;
        const double next = integrate(gauss_jacobi01(order, alpha, beta), f);
        const double change = std::abs(next - prev) / std::max(std::abs(next), 1e-300);
        if (change < rel_tol) return {next, order, change};
        prev = next;
    }
    throw NumericalError("Gauss-Jacobi quadrature did not converge to the requested tolerance");
}

}  // namespace bo
