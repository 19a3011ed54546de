#pragma once

// Truncated Lax operator L_u = D - T_u on the modes 0..M, its ordered spectrum,
// phase-normalized eigenbasis, gaps and resolvent quadratic form.

#include "bo/hardy.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <sstream>

namespace bo {

inline constexpr double kGapTolerance = 1e-8;
inline constexpr double kCollisionTolerance = 1e-10;
inline constexpr double kPhaseFloor = 1e-13;

/// Hermitian matrix of L_u restricted to span{e^{i0x}, ..., e^{iMx}}.
template <typename Real>
class BasicLaxMatrix {
public:
    explicit BasicLaxMatrix(CMatrix<Real> entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 2)
            throw ValidationError("Lax matrix must be square with at least two modes");
        using std::abs;
        const Real scale = std::max(Real(1), entries_.cwiseAbs().maxCoeff());
        if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > Real(1e-12) * scale)
            throw ValidationError("Lax matrix is not Hermitian");
    }

    /// Largest mode M; the matrix is (M+1) x (M+1).
    int modes() const { return static_cast<int>(entries_.rows()) - 1; }
    const CMatrix<Real>& entries() const { return entries_; }

private:
    CMatrix<Real> entries_;
};

using LaxMatrix = BasicLaxMatrix<double>;

/// entry(m,n) = m delta_{mn} - u^(m-n).
template <typename Real>
BasicLaxMatrix<Real> assemble_lax_matrix(const BasicPotential<Real>& u, int M) {
    if (M < 1) throw ValidationError("Lax matrix needs M >= 1");
    if (!all_finite(u.coeffs())) throw ValidationError("potential has non-finite coefficients");
    CMatrix<Real> A(M + 1, M + 1);
    for (int n = 0; n <= M; ++n)
        for (int m = 0; m <= M; ++m) A(m, n) = -u[m - n];
    for (int m = 0; m <= M; ++m) A(m, m) = std::complex<Real>(Real(m), Real(0));
    return BasicLaxMatrix<Real>(std::move(A));
}

template <typename Real>
struct BasicSpectralData {
    RVector<Real> lambdas;    ///< lambda_0 < ... < lambda_M
    CMatrix<Real> eigvecs;    ///< column n is f_n in the Fourier basis
    RVector<Real> gaps;       ///< gaps[n] = gamma_n for n >= 1, clamped at zero; gaps[0] = 0
    CVector<Real> inner1;     ///< <1|f_n> = conj(f_n^(0))
    int reliable_count = 0;   ///< modes 0..reliable_count are trusted

    int modes() const { return static_cast<int>(lambdas.size()) - 1; }
};

using SpectralData = BasicSpectralData<double>;

/// <f_n | S f_{n-1}> with the shift (S f)^(k) = f^(k-1).
template <typename Real>
std::complex<Real> shift_pairing(const CMatrix<Real>& V, int n) {
    const Eigen::Index len = V.rows() - 1;
    // Eigen's dot conjugates its left operand: sum_k conj(f_{n-1}^(k-1)) f_n^(k)
    return V.col(n - 1).head(len).dot(V.col(n).tail(len));
}

/// Fixes the phase of every eigenvector so that <f_0|1> > 0 and <f_n|S f_{n-1}> > 0.
/// The floor is enforced on the reliable modes only; above them the truncation may
/// legitimately produce tiny pairings, which are then left untouched when exactly zero.
template <typename Real>
BasicSpectralData<Real> normalize_phases(BasicSpectralData<Real> sd) {
    using std::abs;
    auto& V = sd.eigvecs;
    const int M = sd.modes();
    const std::complex<Real> c0 = V(0, 0);
    if (abs(c0) < Real(kPhaseFloor))
        throw NumericalError("degenerate phase normalization: |<1|f_0>| below floor (truncation artifact)");
    V.col(0) *= std::conj(c0) / abs(c0);

    for (int n = 1; n <= M; ++n) {
        const std::complex<Real> ip = shift_pairing(V, n);
        const Real mag = abs(ip);
        if (n <= sd.reliable_count && mag < Real(kPhaseFloor)) {
            std::ostringstream os;
            os << "degenerate phase normalization: |<f_" << n << "|S f_" << n - 1
               << ">| = " << mag << " below floor (truncation artifact)";
            throw NumericalError(os.str());
        }
        if (mag > Real(0)) V.col(n) *= std::conj(ip) / mag;
    }
    sd.inner1 = V.row(0).transpose().conjugate();
    return sd;
}

/// gamma_n from the commutator identity (L S - S L - S) h = -(u h)^(-1) + (truncation edge term),
/// which is exact for the truncated matrix. Unlike lambda_n - lambda_{n-1} - 1 it carries no
/// eps * ||L|| cancellation, so tiny gaps keep their relative accuracy. Needs normalized phases.
template <typename Real>
Real commutator_gap(const BasicLaxMatrix<Real>& A, const BasicSpectralData<Real>& sd, int n) {
    const auto& L = A.entries();
    const auto& V = sd.eigvecs;
    const int M = sd.modes();
    // Off the diagonal L(a, b) = -u^(a-b): u^(-1-k) = -L(0, k+1) and u^(m-1-M) = -L(m-1, M).
    std::complex<Real> head(0), edge(0);
    for (int k = 0; k < M; ++k) head += L(0, k + 1) * V(k, n - 1);
    for (int m = 1; m <= M; ++m) edge -= std::conj(V(m, n)) * L(m - 1, M);
    edge *= V(M, n - 1);
    const std::complex<Real> rhs = std::conj(V(0, n)) * head + edge;
    return rhs.real() / shift_pairing(V, n).real();
}

/// Ascending spectrum, phase-normalized eigenvectors, clamped gaps and <1|f_n>.
template <typename Real>
BasicSpectralData<Real> eigendecompose(const BasicLaxMatrix<Real>& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(A.entries());
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");

    BasicSpectralData<Real> sd;
    sd.lambdas = solver.eigenvalues();
    sd.eigvecs = solver.eigenvectors();
    const int M = A.modes();
    sd.reliable_count = M / 2;

    for (int n = 1; n <= M; ++n) {
        if (sd.lambdas[n] - sd.lambdas[n - 1] < Real(kCollisionTolerance)) {
            std::ostringstream os;
            os << "eigenvalue collision between lambda_" << n - 1 << " and lambda_" << n
               << " (truncation M=" << M << " too small)";
            throw NumericalError(os.str());
        }
    }

    sd = normalize_phases(std::move(sd));
    sd.gaps = RVector<Real>::Zero(M + 1);
    for (int n = 1; n <= M; ++n) {
        Real g = n <= sd.reliable_count ? commutator_gap(A, sd, n) : sd.lambdas[n] - sd.lambdas[n - 1] - Real(1);
        if (g < Real(0)) {
            if (n <= sd.reliable_count && g < -Real(kGapTolerance)) {
                std::ostringstream os;
                os << "negative gap gamma_" << n << " = " << g << " beyond tolerance";
                throw NumericalError(os.str());
            }
            g = Real(0);
        }
        sd.gaps[n] = g;
    }
    return sd;
}

template <typename Real>
BasicSpectralData<Real> spectral_data(const BasicPotential<Real>& u, int M) {
    return eigendecompose(assemble_lax_matrix(u, M));
}

template <typename Real>
struct BasicGapsAndTrace {
    RVector<Real> gaps;  ///< gamma_1..gamma_K at index n-1
    Real trace_residual; ///< |sum_{n<=K} gamma_n + lambda_0|
};

/// Reliable gaps and the trace-formula residual, computed from the unclamped eigenvalues.
template <typename Real>
BasicGapsAndTrace<Real> gaps_and_trace(const BasicSpectralData<Real>& sd) {
    const int K = sd.reliable_count;
    BasicGapsAndTrace<Real> out;
    out.gaps = sd.gaps.segment(1, K);
    Real sum = sd.lambdas[0];
    for (int n = 1; n <= K; ++n) sum += sd.lambdas[n] - sd.lambdas[n - 1] - Real(1);
    using std::abs;
    out.trace_residual = abs(sum);
    return out;
}

/// Eigenvalues only. Real coefficients give a real symmetric matrix, which is solved as such.
template <typename Real>
RVector<Real> lax_eigenvalues(const BasicPotential<Real>& u, int M) {
    if (M < 1) throw ValidationError("Lax matrix needs M >= 1");
    const bool real_case = (u.coeffs().imag().array() == Real(0)).all();
    if (real_case) {
        RMatrix<Real> A(M + 1, M + 1);
        for (int n = 0; n <= M; ++n)
            for (int m = 0; m <= M; ++m) A(m, n) = m == n ? Real(m) : -u[m - n].real();
        Eigen::SelfAdjointEigenSolver<RMatrix<Real>> solver(A, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
        return solver.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(assemble_lax_matrix(u, M).entries(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    return solver.eigenvalues();
}

/// H_lambda(u) at truncation M: g_0 where (A + lambda) g = e_0.
template <typename Real>
std::complex<Real> resolvent_form(const BasicPotential<Real>& u, Real lambda, int M) {
    using std::abs;
    const auto A = assemble_lax_matrix(u, M);
    const RVector<Real> ev = lax_eigenvalues(u, M);
    for (int n = 0; n <= M; ++n) {
        if (abs(ev[n] + lambda) < Real(1e-8)) {
            std::ostringstream os;
            os << "resolvent is singular: -lambda is within 1e-8 of lambda_" << n << " = " << ev[n];
            throw NumericalError(os.str());
        }
    }
    CMatrix<Real> shifted = A.entries();
    shifted.diagonal().array() += lambda;
    CVector<Real> e0 = CVector<Real>::Zero(M + 1);
    e0[0] = Real(1);
    const CVector<Real> g = shifted.partialPivLu().solve(e0);
    return g[0];
}

}  // namespace bo
