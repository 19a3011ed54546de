#include "bo/flow.hpp"

#include "bo/counterexample.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <optional>

namespace bo {

Eigen::VectorXd frequencies(const Eigen::VectorXd& gammas) {
    const int K = static_cast<int>(gammas.size());
    Eigen::VectorXd g = gammas;
    for (int k = 0; k < K; ++k) {
        if (!std::isfinite(g[k])) throw ValidationError("actions must be finite");
        if (g[k] < -kGapTolerance) throw ValidationError("negative action beyond the clamp tolerance");
        g[k] = std::max(g[k], 0.0);
    }
    // sum_k min(k,n) g_k = sum_{k<=n} k g_k + n sum_{k>n} g_k
    Eigen::VectorXd omega(K);
    double weighted_head = 0.0, tail = g.sum();
    for (int n = 1; n <= K; ++n) {
        weighted_head += n * g[n - 1];
        tail -= g[n - 1];
        omega[n - 1] = double(n) * n - 2.0 * (weighted_head + n * tail);
    }
    return omega;
}

CVector<double> ActionAngle::zetas() const {
    CVector<double> z(moduli.size());
    for (Eigen::Index n = 0; n < z.size(); ++n) z[n] = std::polar(moduli[n], angles[n]);
    return z;
}

ActionAngle rotate_coordinates(const BirkhoffCoordinates& bc, const Eigen::VectorXd& omega, double t) {
    if (omega.size() != bc.size()) throw ValidationError("frequency count must match the coordinate count");
    ActionAngle aa;
    aa.moduli = bc.zetas.cwiseAbs();
    aa.angles.resize(bc.size());
    for (int n = 0; n < bc.size(); ++n) aa.angles[n] = std::arg(bc.zetas[n]) + omega[n] * t;
    return aa;
}

namespace {

int default_modes(const PotentialSpectrum& u0, int M, int requested) {
    if (requested > 0) return requested;
    return std::min(M / 2, std::max(u0.n_max(), 16));
}

/// Lawson RK4 on the full complex spectrum in FFT order.
class DirectIntegrator {
public:
    DirectIntegrator(const PotentialSpectrum& u0, int grid_size) : N_(grid_size), cutoff_((grid_size - 1) / 3) {
        if (cutoff_ < u0.n_max())
            throw ValidationError("grid too small: the 2/3 rule needs grid_size > 3 n_max");
        v_ = Eigen::VectorXcd::Zero(N_);
        for (int n = 1; n <= u0.n_max(); ++n) {
            v_[n] = u0[n];
            v_[N_ - n] = u0[-n];
        }
        fft_.SetFlag(Eigen::FFT<double>::Unscaled);
        grid_.resize(N_);
        spec_.resize(N_);
        initial_norm_ = v_.norm();
    }

    void advance(double t, double dt) {
        if (!(dt > 0.0)) throw ValidationError("dt must be positive");
        if (!(t >= 0.0)) throw ValidationError("direct integration runs forward in time only");
        if (t == 0.0) return;
        const long steps = static_cast<long>(std::ceil(t / dt - 1e-12));
        const double h = t / steps;
        Eigen::VectorXcd E(N_);
        for (int j = 0; j < N_; ++j) {
            const double k = wavenumber(j);
            E[j] = std::abs(k) > cutoff_ ? std::complex<double>(0) : std::polar(1.0, k * std::abs(k) * h / 2.0);
        }
        const Eigen::VectorXcd E2 = E.cwiseProduct(E);
        for (long s = 0; s < steps; ++s) {
            const Eigen::VectorXcd a = nonlinear(v_);
            const Eigen::VectorXcd b = nonlinear(E.cwiseProduct(v_ + (h / 2.0) * a));
            const Eigen::VectorXcd c = nonlinear(E.cwiseProduct(v_) + (h / 2.0) * b);
            const Eigen::VectorXcd d = nonlinear(E2.cwiseProduct(v_) + h * E.cwiseProduct(c));
            v_ = E2.cwiseProduct(v_) + (h / 6.0) * (E2.cwiseProduct(a) + 2.0 * E.cwiseProduct(b + c) + d);
            symmetrize();
            const double norm = v_.norm();
            if (!std::isfinite(norm) || (initial_norm_ > 0.0 && norm > 1e6 * initial_norm_))
                throw NumericalError("direct integration blew up (norm growth beyond 1e6); reduce dt");
        }
    }

    PotentialSpectrum state() const {
        CVector<double> c(cutoff_);
        for (int n = 1; n <= cutoff_; ++n) c[n - 1] = v_[n];
        return PotentialSpectrum(std::move(c));
    }

    /// |u^(0)|; the nonlinear term has no k = 0 component, so this stays at its initial zero.
    double mean_abs() const { return std::abs(v_[0]); }

private:
    double wavenumber(int j) const { return j <= N_ / 2 ? double(j) : double(j - N_); }

    // -i k (u^2)^, dealiased
    Eigen::VectorXcd nonlinear(const Eigen::VectorXcd& v) {
        for (int j = 0; j < N_; ++j) spec_[j] = v[j];
        fft_.inv(grid_, spec_);
        for (auto& x : grid_) x = std::complex<double>(x.real() * x.real(), 0.0);
        fft_.fwd(spec_, grid_);
        Eigen::VectorXcd out(N_);
        const double scale = 1.0 / N_;
        for (int j = 0; j < N_; ++j) {
            const double k = wavenumber(j);
            out[j] = std::abs(k) > cutoff_ ? std::complex<double>(0) : std::complex<double>(0, -k) * spec_[j] * scale;
        }
        return out;
    }

    void symmetrize() {
        for (int n = 1; n < (N_ + 1) / 2; ++n) {
            const auto avg = 0.5 * (v_[n] + std::conj(v_[N_ - n]));
            v_[n] = avg;
            v_[N_ - n] = std::conj(avg);
        }
        if (N_ % 2 == 0) v_[N_ / 2] = 0.0;
    }

    int N_;
    int cutoff_;
    Eigen::VectorXcd v_;
    Eigen::FFT<double> fft_;
    std::vector<std::complex<double>> grid_, spec_;
    double initial_norm_ = 0.0;
};

int default_grid(const PotentialSpectrum& u0, int grid_size) {
    if (grid_size > 0) {
        if (grid_size < 4 * u0.n_max()) throw ValidationError("grid_size must be at least 4 n_max");
        return grid_size;
    }
    int n = 16;
    while (n < 4 * u0.n_max()) n *= 2;
    return n;
}

void check_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw ValidationError("sample times must be finite");
        if (i > 0 && !(times[i] > times[i - 1])) throw ValidationError("sample times must increase");
    }
}

}  // namespace

BirkhoffEvolution evolve_birkhoff(const PotentialSpectrum& u0, double t, int M, InverseOptions options) {
    if (!std::isfinite(t)) throw ValidationError("time must be finite");
    const auto bc = birkhoff_forward(u0, M);
    const Eigen::VectorXd omega = frequencies(bc.actions);
    BirkhoffEvolution out;
    out.coordinates = rotate_coordinates(bc, omega, t);
    out.zetas = out.coordinates.zetas();
    options.n_max = default_modes(u0, M, options.n_max);
    out.inverse = birkhoff_inverse(out.zetas, M, options);
    out.u = out.inverse.u;
    return out;
}

PotentialSpectrum evolve_direct(const PotentialSpectrum& u0, double t, double dt, int grid_size) {
    DirectIntegrator integ(u0, default_grid(u0, grid_size));
    integ.advance(t, dt);
    return integ.state();
}

FlowTrajectory trajectory_birkhoff(const PotentialSpectrum& u0, const std::vector<double>& times, int M,
                                   const BirkhoffMarchOptions& options) {
    check_times(times);
    if (!(options.min_step > 0.0)) throw ValidationError("min_step must be positive");
    const auto bc = birkhoff_forward(u0, M);
    const Eigen::VectorXd omega = frequencies(bc.actions);
    const auto target = [&](double t) { return rotate_coordinates(bc, omega, t).zetas(); };

    FlowTrajectory traj;
    traj.method = FlowMethod::birkhoff;
    if (times.empty()) return traj;

    InverseOptions inv;
    inv.n_max = default_modes(u0, M, options.n_max);
    inv.residual_tol = options.residual_tol;
    inv.max_iterations = options.max_iterations;
    inv.initial_guess = u0.resized(inv.n_max);

    // Anchor at t = 0, where u0 itself is the answer up to the truncation of the unknowns.
    auto anchor = birkhoff_inverse(target(0.0), M, inv);
    if (!anchor.converged) {
        traj.complete = false;
        return traj;
    }
    double t = 0.0, residual = anchor.residual;
    PotentialSpectrum u = anchor.u;
    Eigen::MatrixXd J = std::move(anchor.jacobian);
    std::optional<std::pair<double, PotentialSpectrum>> previous;

    const auto predict = [&](double t_new) {
        if (!previous || previous->first == t) return u;
        const double r = (t_new - t) / (t - previous->first);
        return PotentialSpectrum(u.coeffs() + r * (u.coeffs() - previous->second.coeffs()));
    };

    double h = INFINITY;
    for (double T : times) {
        bool refreshed = false;
        while (t != T) {
            const double step = std::min(h, std::abs(T - t));
            double t_new = T > t ? t + step : t - step;
            if (std::abs(T - t_new) <= 1e-12 * std::max(1.0, std::abs(T))) t_new = T;

            inv.initial_guess = predict(t_new);
            if (J.size() > 0) inv.initial_jacobian = J;
            inv.refresh_jacobian = refreshed;
            auto res = birkhoff_inverse(target(t_new), M, inv);
            if (res.converged) {
                previous.emplace(t, u);
                t = t_new;
                u = std::move(res.u);
                residual = res.residual;
                if (res.jacobian.size() > 0) J = std::move(res.jacobian);
                h = res.iterations <= 8 ? std::max(h, 2.0 * step) : step;
                refreshed = false;
                continue;
            }
            if (step / 4.0 >= options.min_step) {
                h = step / 4.0;
            } else if (!refreshed) {
                refreshed = true;  // last resort: allow a fresh finite-difference Jacobian
            } else {
                traj.complete = false;
                return traj;
            }
        }
        traj.times.push_back(T);
        traj.states.push_back(u);
        traj.residuals.push_back(residual);
    }
    return traj;
}

FlowTrajectory trajectory_direct(const PotentialSpectrum& u0, const std::vector<double>& times, double dt,
                                 int grid_size) {
    check_times(times);
    if (!times.empty() && times.front() < 0.0) throw ValidationError("direct integration runs forward in time only");
    DirectIntegrator integ(u0, default_grid(u0, grid_size));
    FlowTrajectory traj;
    traj.method = FlowMethod::direct;
    double now = 0.0;
    for (double t : times) {
        integ.advance(t - now, dt);
        now = t;
        traj.times.push_back(t);
        traj.states.push_back(integ.state());
        traj.max_mean = std::max(traj.max_mean, integ.mean_abs());
    }
    return traj;
}

std::vector<double> observable_time_grid(double t0, double t1, double mu, int min_points) {
    if (!(t1 > t0)) throw ValidationError("observable window must have positive length");
    const double rate = std::abs(1.0 - 2.0 * mu);
    const int steps = std::max(min_points - 1, static_cast<int>(std::floor(rate * (t1 - t0) / (std::numbers::pi / 8))) + 1);
    std::vector<double> t(steps + 1);
    for (int i = 0; i <= steps; ++i) t[i] = t0 + (t1 - t0) * i / steps;
    return t;
}

ObservableReport windowed_observable(const PotentialSpectrum& u0, double mu, const std::vector<double>& times, int M,
                                     const BirkhoffMarchOptions& options) {
    if (times.size() < 2) throw ValidationError("observable needs at least two sample times");
    ObservableReport rep;
    rep.mu = mu;
    const auto traj = trajectory_birkhoff(u0, times, M, options);
    rep.converged = traj.complete;
    rep.times = traj.times;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        rep.xi.push_back(traj.states[i][1]);
        rep.max_residual = std::max(rep.max_residual, traj.residuals[i]);
    }
    std::complex<double> integral(0.0);
    const double rate = 1.0 - 2.0 * mu;
    for (std::size_t i = 0; i + 1 < rep.times.size(); ++i) {
        const auto g0 = rep.xi[i] * std::polar(1.0, -rate * rep.times[i]);
        const auto g1 = rep.xi[i + 1] * std::polar(1.0, -rate * rep.times[i + 1]);
        integral += 0.5 * (rep.times[i + 1] - rep.times[i]) * (g0 + g1);
    }
    rep.windowed_abs = std::abs(integral);
    rep.target = std::sqrt(2.0) * (times.back() - times.front());
    rep.ratio = rep.windowed_abs / rep.target;
    return rep;
}

ObservableReport weak_limit_observable(double beta, double q, const std::vector<double>& times, int M,
                                       const BirkhoffMarchOptions& options) {
    const CounterexampleParams params(beta, q);
    const auto search = find_mu(params);
    if (!search.mu) throw NumericalError("no negative eigenvalue root: " + search.diagnostic);
    const auto u0 = make_potential(CounterexampleFamily{beta, q}, M);
    return windowed_observable(u0, *search.mu, times, M, options);
}

}  // namespace bo
