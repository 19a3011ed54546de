#pragma once

// Norming constants, Birkhoff coordinates and their structural identities.

#include "bo/lax.hpp"

#include <cmath>
#include <sstream>

namespace bo {

/// kappa_0..kappa_K with K = sd.reliable_count; the products are truncated at K.
template <typename Real>
RVector<Real> norming_constants(const BasicSpectralData<Real>& sd) {
    const int K = sd.reliable_count;
    const auto& lam = sd.lambdas;
    const auto& gam = sd.gaps;
    RVector<Real> kappa(K + 1);
    auto factor = [&](int p, int n) {
        const Real f = Real(1) - gam[p] / (lam[p] - lam[n]);
        if (!(f > Real(0))) {
            std::ostringstream os;
            os << "norming-constant factor (p=" << p << ", n=" << n << ") is " << f << "; gaps are corrupted";
            throw NumericalError(os.str());
        }
        return f;
    };
    for (int n = 0; n <= K; ++n) {
        Real prod = n == 0 ? Real(1) : Real(1) / (lam[n] - lam[0]);
        for (int p = 1; p <= K; ++p)
            if (p != n) prod *= factor(p, n);
        kappa[n] = prod;
    }
    return kappa;
}

template <typename Real>
struct BasicBirkhoffCoordinates {
    CVector<Real> zetas;   ///< zeta_1..zeta_K at index n-1
    RVector<Real> kappas;  ///< kappa_0..kappa_K
    RVector<Real> actions; ///< |zeta_n|^2 at index n-1

    int size() const { return static_cast<int>(zetas.size()); }
};

using BirkhoffCoordinates = BasicBirkhoffCoordinates<double>;

/// Coordinates carrying only zeta (kappas unknown), e.g. a rotated target for the inverse map.
template <typename Real>
BasicBirkhoffCoordinates<Real> coordinates_from_zetas(CVector<Real> zetas) {
    BasicBirkhoffCoordinates<Real> bc;
    bc.actions = zetas.cwiseAbs2();
    bc.zetas = std::move(zetas);
    return bc;
}

template <typename Real>
BasicBirkhoffCoordinates<Real> birkhoff_from_spectrum(const BasicSpectralData<Real>& sd) {
    BasicBirkhoffCoordinates<Real> bc;
    bc.kappas = norming_constants(sd);
    const int K = sd.reliable_count;
    bc.zetas.resize(K);
    using std::sqrt;
    for (int n = 1; n <= K; ++n) bc.zetas[n - 1] = sd.inner1[n] / sqrt(bc.kappas[n]);
    bc.actions = bc.zetas.cwiseAbs2();
    return bc;
}

/// zeta_n = <1|f_n> / sqrt(kappa_n), n = 1..M/2.
template <typename Real>
BasicBirkhoffCoordinates<Real> birkhoff_forward(const BasicPotential<Real>& u, int M) {
    return birkhoff_from_spectrum(spectral_data(u, M));
}

template <typename Real>
struct BasicGeneratingFunctionCheck {
    Real lhs;       ///< resolvent form <(L+lambda)^{-1} 1 | 1>
    Real rhs;       ///< 1/(lambda_0+lambda) prod_{n<=K} (1 - gamma_n/(lambda_n+lambda))
    Real imag_lhs;  ///< imaginary part of the resolvent form (zero by self-adjointness)
    Real relative_gap;
};

template <typename Real>
BasicGeneratingFunctionCheck<Real> generating_function_check(const BasicPotential<Real>& u, Real lambda, int M) {
    const auto sd = spectral_data(u, M);
    const std::complex<Real> h = resolvent_form(u, lambda, M);
    Real rhs = Real(1) / (sd.lambdas[0] + lambda);
    for (int n = 1; n <= sd.reliable_count; ++n) rhs *= Real(1) - sd.gaps[n] / (sd.lambdas[n] + lambda);
    using std::abs;
    return {h.real(), rhs, h.imag(), abs(h - rhs) / abs(h)};
}

/// Applies D_{u, lambda_0 - 1} to v = -Pi u - lambda_0 + 1 in the eigenbasis and returns the
/// h^{1/2, sqrt(log)} norm of its difference with (<1|f_n>)_{n <= K}.
template <typename Real>
Real diagonal_identity_residual(const BasicSpectralData<Real>& sd, const BasicPotential<Real>& u) {
    const int M = sd.modes();
    CVector<Real> v = CVector<Real>::Zero(M + 1);
    v[0] = Real(1) - sd.lambdas[0];
    for (int n = 1; n <= std::min(M, u.n_max()); ++n) v[n] = -u[n];

    const WeightSpec w{0.5, LogMode::sqrt_log};
    Real sum = 0;
    for (int n = 0; n <= sd.reliable_count; ++n) {
        const std::complex<Real> c = sd.eigvecs.col(n).dot(v) / (sd.lambdas[n] - sd.lambdas[0] + Real(1));
        sum += weight<Real>(n, w) * std::norm(c - sd.inner1[n]);
    }
    using std::sqrt;
    return sqrt(sum);
}

template <typename Real>
Real diagonal_identity_residual(const BasicPotential<Real>& u, int M) {
    return diagonal_identity_residual(spectral_data(u, M), u);
}

/// d_0 Phi(xi)_n = -xi^(n)/sqrt(n), n = 1..n_max.
template <typename Real>
CVector<Real> differential_at_zero(const BasicPotential<Real>& xi) {
    CVector<Real> out(xi.n_max());
    using std::sqrt;
    for (int n = 1; n <= xi.n_max(); ++n) out[n - 1] = -xi[n] / sqrt(Real(n));
    return out;
}

/// Quadratic Taylor coefficient of Phi at zero, so that Phi(t xi) = t d_0Phi(xi) + t^2 Q(xi) + O(t^3):
///   Q(xi)_n = -(1/sqrt(n)) sum_{k>=0, k!=n} xi^(k) xi^(n-k) / (k-n),   n = 1..2 n_max.
template <typename Real>
CVector<Real> second_differential_at_zero(const BasicPotential<Real>& xi) {
    const int N = xi.n_max();
    CVector<Real> out = CVector<Real>::Zero(2 * N);
    using std::sqrt;
    for (int n = 1; n <= 2 * N; ++n) {
        std::complex<Real> acc(0);
        for (int k = std::max(1, n - N); k <= N; ++k) {
            if (k == n) continue;
            acc += xi[k] * xi[n - k] / Real(k - n);
        }
        out[n - 1] = -acc / sqrt(Real(n));
    }
    return out;
}

}  // namespace bo
