#pragma once

// Truncated Fourier representation of real mean-zero potentials and of Hardy-space
// functions, log-weighted Sobolev norms, the Toeplitz product and the dyadic
// (Littlewood-Paley) decomposition.

#include "bo/counterexample_params.hpp"
#include "bo/types.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

namespace bo {

/// Real, mean-zero potential u(x) = sum_{n=1}^{n_max} (c_n e^{inx} + conj(c_n) e^{-inx}).
/// Only the positive modes are stored; u^(0) = 0 and u^(-n) = conj(u^(n)).
template <typename Real>
class BasicPotential {
public:
    using Scalar = std::complex<Real>;

    BasicPotential() : coeffs_(CVector<Real>::Zero(1)) {}

    explicit BasicPotential(CVector<Real> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() < 1) throw ValidationError("potential needs n_max >= 1");
        if (!all_finite(coeffs_)) throw ValidationError("potential has non-finite coefficients");
    }

    static BasicPotential zero(int n_max) {
        if (n_max < 1) throw ValidationError("n_max must be >= 1");
        return BasicPotential(CVector<Real>::Zero(n_max));
    }

    int n_max() const { return static_cast<int>(coeffs_.size()); }

    /// Coefficients u^(1..n_max), stored at index n-1.
    const CVector<Real>& coeffs() const { return coeffs_; }

    /// u^(n) for any integer n: zero at n = 0 and beyond the truncation.
    Scalar operator[](int n) const {
        if (n == 0 || std::abs(n) > n_max()) return Scalar(0);
        return n > 0 ? coeffs_[n - 1] : std::conj(coeffs_[-n - 1]);
    }

    /// Same potential with truncation order `n_max` (zero padded or cut).
    BasicPotential resized(int n_max) const {
        if (n_max < 1) throw ValidationError("n_max must be >= 1");
        CVector<Real> c = CVector<Real>::Zero(n_max);
        const int keep = std::min(n_max, this->n_max());
        c.head(keep) = coeffs_.head(keep);
        return BasicPotential(std::move(c));
    }

    BasicPotential scaled(Real factor) const { return BasicPotential(coeffs_ * factor); }

    /// u(. + theta): u^(n) -> e^{in theta} u^(n).
    BasicPotential translated(Real theta) const {
        CVector<Real> c = coeffs_;
        for (int n = 1; n <= n_max(); ++n) c[n - 1] *= std::polar(Real(1), Real(n) * theta);
        return BasicPotential(std::move(c));
    }

    friend BasicPotential operator-(const BasicPotential& a, const BasicPotential& b) {
        const int n = std::max(a.n_max(), b.n_max());
        return BasicPotential(a.resized(n).coeffs_ - b.resized(n).coeffs_);
    }

private:
    CVector<Real> coeffs_;
};

/// Function in the truncated Hardy space: f = sum_{n=0}^{n_max} f^(n) e^{inx}.
template <typename Real>
class BasicHardyFunction {
public:
    using Scalar = std::complex<Real>;

    BasicHardyFunction() : coeffs_(CVector<Real>::Zero(1)) {}

    explicit BasicHardyFunction(CVector<Real> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() < 1) throw ValidationError("Hardy function needs at least the constant mode");
        if (!all_finite(coeffs_)) throw ValidationError("Hardy function has non-finite coefficients");
    }

    static BasicHardyFunction zero(int n_max) { return BasicHardyFunction(CVector<Real>::Zero(n_max + 1)); }

    static BasicHardyFunction basis(int k, int n_max) {
        CVector<Real> c = CVector<Real>::Zero(n_max + 1);
        c[k] = Scalar(1);
        return BasicHardyFunction(std::move(c));
    }

    int n_max() const { return static_cast<int>(coeffs_.size()) - 1; }

    /// Coefficients f^(0..n_max).
    const CVector<Real>& coeffs() const { return coeffs_; }

    Scalar operator[](int n) const { return (n < 0 || n > n_max()) ? Scalar(0) : coeffs_[n]; }

private:
    CVector<Real> coeffs_;
};

using PotentialSpectrum = BasicPotential<double>;
using HardyFunction = BasicHardyFunction<double>;

enum class LogMode { none, sqrt_log, inv_sqrt_log };

/// Weight <n>^{2s} (log(<n>+1))^{+-1} of the space H^{s}, H^{s,sqrt(log)} or H^{s,1/sqrt(log)}.
struct WeightSpec {
    double s = 0.0;
    LogMode log_mode = LogMode::none;
};

template <typename Real = double>
Real weight(int n, const WeightSpec& w) {
    using std::log;
    using std::pow;
    const Real b = static_cast<Real>(bracket(n));
    Real value = pow(b, Real(2) * static_cast<Real>(w.s));
    switch (w.log_mode) {
        case LogMode::none: break;
        case LogMode::sqrt_log: value *= log(b + 1); break;
        case LogMode::inv_sqrt_log: value /= log(b + 1); break;
    }
    return value;
}

/// Weighted norm of a two-sided coefficient sequence: coefficient i carries mode first_mode + i.
template <typename Real>
Real weighted_norm(const CVector<Real>& coeffs, int first_mode, const WeightSpec& w) {
    if (!all_finite(coeffs)) throw ValidationError("weighted_norm: non-finite input");
    Real sum = 0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        sum += weight<Real>(first_mode + static_cast<int>(i), w) * std::norm(coeffs[i]);
    using std::sqrt;
    return sqrt(sum);
}

/// Norm of the real potential over all represented modes (both signs).
template <typename Real>
Real weighted_norm(const BasicPotential<Real>& u, const WeightSpec& w) {
    Real sum = 0;
    for (int n = 1; n <= u.n_max(); ++n) sum += Real(2) * weight<Real>(n, w) * std::norm(u[n]);
    using std::sqrt;
    return sqrt(sum);
}

template <typename Real>
Real weighted_norm(const BasicHardyFunction<Real>& f, const WeightSpec& w) {
    return weighted_norm(f.coeffs(), 0, w);
}

/// L^2 norm with the normalised measure dx / 2pi.
template <typename Real>
Real l2_norm(const BasicPotential<Real>& u) {
    return weighted_norm(u, WeightSpec{0.0, LogMode::none});
}

// ---------------------------------------------------------------------------
// Potential families

struct ZeroFamily {};
/// amplitude * cos(mode x).
struct CosineFamily {
    double amplitude = 1.0;
    int mode = 1;
};
/// |u^(n)| = amplitude * n^{-decay} with phases uniform on [0, 2pi) from a seeded 64-bit stream.
struct RandomFamily {
    std::uint64_t seed = 1;
    double decay = 2.0;
    double amplitude = 1.0;
};
/// Geometric family u^(n) = eps q^n, eps = beta / |log(1-q)|.
struct CounterexampleFamily {
    double beta = 2.0;
    double q = 0.9;
};
struct ExplicitFamily {
    std::vector<std::complex<double>> coeffs;
};

using PotentialFamily = std::variant<ZeroFamily, CosineFamily, RandomFamily, CounterexampleFamily, ExplicitFamily>;

/// Unit-modulus phases for modes 1..n_max; the first k phases do not depend on n_max.
inline std::vector<double> random_phases(std::uint64_t seed, std::uint64_t stream, int n_max) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<double> phases(n_max);
    for (auto& p : phases) {
        // 53-bit uniform in [0,1), independent of the distribution implementation
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        p = 2.0 * std::numbers::pi * unit;
    }
    return phases;
}

template <typename Real = double>
BasicPotential<Real> make_potential(const PotentialFamily& family, int n_max) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    CVector<Real> c = CVector<Real>::Zero(n_max);
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, ZeroFamily>) {
            } else if constexpr (std::is_same_v<F, CosineFamily>) {
                if (!std::isfinite(f.amplitude)) throw ValidationError("cosine amplitude must be finite");
                if (f.mode < 1) throw ValidationError("cosine mode must be >= 1");
                if (f.mode <= n_max) c[f.mode - 1] = Real(f.amplitude / 2.0);
            } else if constexpr (std::is_same_v<F, RandomFamily>) {
                if (!std::isfinite(f.amplitude) || !std::isfinite(f.decay))
                    throw ValidationError("random family needs finite amplitude and decay");
                const auto phases = random_phases(f.seed, 0, n_max);
                for (int n = 1; n <= n_max; ++n) {
                    const double r = f.amplitude * std::pow(double(n), -f.decay);
                    c[n - 1] = std::polar(Real(r), Real(phases[n - 1]));
                }
            } else if constexpr (std::is_same_v<F, CounterexampleFamily>) {
                const CounterexampleParams p(f.beta, f.q);
                for (int n = 1; n <= n_max; ++n) c[n - 1] = Real(p.eps() * std::pow(p.q(), n));
            } else if constexpr (std::is_same_v<F, ExplicitFamily>) {
                for (int n = 1; n <= n_max && n <= static_cast<int>(f.coeffs.size()); ++n)
                    c[n - 1] = std::complex<Real>(Real(f.coeffs[n - 1].real()), Real(f.coeffs[n - 1].imag()));
            }
        },
        family);
    return BasicPotential<Real>(std::move(c));
}

// ---------------------------------------------------------------------------
// Grid transforms (x_j = 2 pi j / N)

/// Values of the two-sided spectrum `mode -> coefficient` on an N-point grid.
template <typename Real, typename Spectrum>
std::vector<std::complex<Real>> synthesize(Spectrum&& coefficient, int max_mode, int grid_size) {
    if (2 * max_mode >= grid_size) throw ValidationError("grid too small for the represented modes");
    std::vector<std::complex<Real>> spec(grid_size, std::complex<Real>(0)), values;
    for (int n = -max_mode; n <= max_mode; ++n) spec[(n + grid_size) % grid_size] = coefficient(n);
    Eigen::FFT<Real> fft;
    fft.SetFlag(Eigen::FFT<Real>::Unscaled);
    fft.inv(values, spec);
    return values;
}

/// Fourier coefficients of grid samples: result[k] is mode k for k < N/2 and mode k - N otherwise.
template <typename Real>
std::vector<std::complex<Real>> analyze(const std::vector<std::complex<Real>>& values) {
    std::vector<std::complex<Real>> spec;
    Eigen::FFT<Real> fft;
    fft.fwd(spec, values);
    const Real scale = Real(1) / static_cast<Real>(values.size());
    for (auto& s : spec) s *= scale;
    return spec;
}

template <typename Real>
std::vector<std::complex<Real>> to_grid(const BasicPotential<Real>& u, int grid_size) {
    return synthesize<Real>([&](int n) { return u[n]; }, u.n_max(), grid_size);
}

// ---------------------------------------------------------------------------
// Toeplitz operator T_u f = Pi(u f)

/// (T_u f)^(m) = sum_n u^(m-n) f^(n), for 0 <= m <= f.n_max().
template <typename Real>
BasicHardyFunction<Real> toeplitz_apply(const BasicPotential<Real>& u, const BasicHardyFunction<Real>& f) {
    const int m_max = f.n_max();
    CVector<Real> out = CVector<Real>::Zero(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        const int lo = std::max(0, m - u.n_max());
        const int hi = std::min(m_max, m + u.n_max());
        std::complex<Real> acc(0);
        for (int n = lo; n <= hi; ++n) acc += u[m - n] * f[n];
        out[m] = acc;
    }
    return BasicHardyFunction<Real>(std::move(out));
}

// ---------------------------------------------------------------------------
// Dyadic decomposition

/// C^2 cutoff: 1 on |xi| <= 1/2, 0 on |xi| >= 1, quintic smoothstep in between.
template <typename Real = double>
Real smooth_cutoff(Real xi) {
    using std::abs;
    const Real a = abs(xi);
    if (a <= Real(0.5)) return Real(1);
    if (a >= Real(1)) return Real(0);
    const Real t = (a - Real(0.5)) / Real(0.5);
    return Real(1) - t * t * t * (t * (t * Real(6) - Real(15)) + Real(10));
}

/// phi(xi) = psi(xi/2) - psi(xi), supported in 1/2 < |xi| < 2.
template <typename Real = double>
Real dyadic_bump(Real xi) {
    return smooth_cutoff<Real>(xi / Real(2)) - smooth_cutoff<Real>(xi);
}

/// Littlewood-Paley blocks. blocks[0] is the constant part f_{-1}; blocks[n+1] = f_n collects
/// the modes 2^{n-1} < k < 2^{n+1} weighted by phi(k / 2^n). The blocks sum to f.
template <typename Real>
std::vector<BasicHardyFunction<Real>> dyadic_decompose(const BasicHardyFunction<Real>& f) {
    const int n_max = f.n_max();
    int levels = 0;
    while ((1 << levels) < n_max) ++levels;  // block `levels` reaches modes up to 2^levels

    std::vector<BasicHardyFunction<Real>> blocks;
    blocks.reserve(levels + 2);
    CVector<Real> low = CVector<Real>::Zero(n_max + 1);
    low[0] = f[0];
    blocks.emplace_back(std::move(low));
    for (int n = 0; n <= levels; ++n) {
        CVector<Real> c = CVector<Real>::Zero(n_max + 1);
        const Real scale = std::ldexp(Real(1), n);
        for (int k = 1; k <= n_max; ++k) {
            const Real phi = dyadic_bump<Real>(Real(k) / scale);
            if (phi != Real(0)) c[k] = phi * f[k];
        }
        blocks.emplace_back(std::move(c));
    }
    return blocks;
}

}  // namespace bo
