#include "bo/inverse.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace bo {
namespace {

class Residual {
public:
    Residual(const CVector<double>& target, int M, int n_max) : M_(M), n_max_(n_max), K_(M / 2) {
        if (target.size() > K_) throw ValidationError("target has more coordinates than the truncation resolves");
        target_ = CVector<double>::Zero(K_);
        target_.head(target.size()) = target;
    }

    int rows() const { return 2 * K_; }
    int cols() const { return 2 * n_max_; }
    int evaluations() const { return evaluations_; }

    PotentialSpectrum potential(const Eigen::VectorXd& x) const {
        CVector<double> c(n_max_);
        for (int j = 0; j < n_max_; ++j) c[j] = {x[2 * j], x[2 * j + 1]};
        return PotentialSpectrum(std::move(c));
    }

    Eigen::VectorXd parameters(const PotentialSpectrum& u) const {
        Eigen::VectorXd x(cols());
        for (int j = 0; j < n_max_; ++j) {
            const auto c = u[j + 1];
            x[2 * j] = c.real();
            x[2 * j + 1] = c.imag();
        }
        return x;
    }

    /// Stacked real and imaginary parts of Phi(u) - target; nullopt when the spectral
    /// pipeline rejects the point (degenerate truncation).
    std::optional<Eigen::VectorXd> operator()(const Eigen::VectorXd& x) {
        ++evaluations_;
        try {
            const auto bc = birkhoff_forward(potential(x), M_);
            Eigen::VectorXd r(rows());
            for (int n = 0; n < K_; ++n) {
                const auto d = bc.zetas[n] - target_[n];
                r[2 * n] = d.real();
                r[2 * n + 1] = d.imag();
            }
            return r;
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0, double rel, double floor) {
        Eigen::MatrixXd J(rows(), cols());
        for (int j = 0; j < cols(); ++j) {
            const double h = std::max(rel * std::abs(x[j]), floor);
            Eigen::VectorXd xp = x;
            xp[j] += h;
            const auto rp = (*this)(xp);
            if (!rp) throw NumericalError("Birkhoff map undefined at a finite-difference probe");
            J.col(j) = (*rp - r0) / h;
        }
        return J;
    }

private:
    int M_, n_max_, K_;
    CVector<double> target_;
    int evaluations_ = 0;
};

}  // namespace

InverseResult birkhoff_inverse(const CVector<double>& zeta_target, int M, const InverseOptions& options) {
    if (M < 2) throw ValidationError("inverse map needs M >= 2");
    if (!all_finite(zeta_target)) throw ValidationError("target coordinates must be finite");
    const int K = M / 2;
    const int n_max = options.n_max > 0 ? options.n_max : std::min(K, 16);
    if (n_max > K) throw ValidationError("n_max exceeds the number of resolved coordinates M/2");

    Residual residual(zeta_target, M, n_max);

    Eigen::VectorXd x;
    if (options.initial_guess) {
        x = residual.parameters(*options.initial_guess);
    } else {
        // invert d_0 Phi: u^(n) = -sqrt(n) zeta_n
        x = Eigen::VectorXd::Zero(residual.cols());
        for (int n = 1; n <= std::min<int>(n_max, static_cast<int>(zeta_target.size())); ++n) {
            const auto c = -std::sqrt(double(n)) * zeta_target[n - 1];
            x[2 * (n - 1)] = c.real();
            x[2 * (n - 1) + 1] = c.imag();
        }
    }

    auto r0 = residual(x);
    if (!r0) throw NumericalError("Birkhoff map undefined at the initial guess");
    Eigen::VectorXd r = *r0;
    double rnorm = r.norm();

    InverseResult result;
    result.log.push_back({0, rnorm, 0.0});

    Eigen::MatrixXd J;
    bool fresh = false;
    if (options.initial_jacobian) {
        if (options.initial_jacobian->rows() != residual.rows() || options.initial_jacobian->cols() != residual.cols())
            throw ValidationError("initial Jacobian has the wrong shape");
        J = *options.initial_jacobian;
    }
    const bool broyden = options.initial_jacobian.has_value();

    int it = 0;
    while (rnorm >= options.residual_tol && it < options.max_iterations) {
        if (!broyden || J.size() == 0) {
            J = residual.jacobian(x, r, options.fd_relative_step, options.fd_min_step);
            fresh = true;
        }
        if ((J.transpose() * r).norm() < options.gradient_tol) break;

        const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
        double alpha = 1.0;
        std::optional<Eigen::VectorXd> r_new;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
            x_new = x + alpha * delta;
            r_new = residual(x_new);
            if (r_new && r_new->norm() < rnorm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (broyden && !fresh && options.refresh_jacobian) {
                // stale quasi-Newton model: rebuild it and retry from the same point
                J = residual.jacobian(x, r, options.fd_relative_step, options.fd_min_step);
                fresh = true;
                continue;
            }
            break;
        }

        ++it;
        const Eigen::VectorXd s = x_new - x;
        if (broyden) {
            J += ((*r_new - r) - J * s) * s.transpose() / s.squaredNorm();
            fresh = false;
        }
        x = x_new;
        r = *r_new;
        rnorm = r.norm();
        result.log.push_back({it, rnorm, s.norm()});
    }

    result.u = residual.potential(x);
    result.residual = rnorm;
    result.converged = rnorm < options.residual_tol || (J.size() > 0 && (J.transpose() * r).norm() < options.gradient_tol);
    result.iterations = it;
    result.forward_evaluations = residual.evaluations();
    result.jacobian = std::move(J);
    return result;
}

}  // namespace bo
