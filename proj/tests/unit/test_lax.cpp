#include "bo/lax.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Lax matrix assembly", "[lax]") {
    SECTION("free operator") {
        const auto A = assemble_lax_matrix(PotentialSpectrum::zero(1), 3);
        CMatrix<double> expected = CMatrix<double>::Zero(4, 4);
        expected.diagonal() << 0, 1, 2, 3;
        REQUIRE(A.entries() == expected);
    }
    SECTION("cos x") {
        const auto A = assemble_lax_matrix(make_potential(CosineFamily{1.0, 1}, 1), 2);
        CMatrix<double> expected(3, 3);
        expected << 0, -0.5, 0, -0.5, 1, -0.5, 0, -0.5, 2;
        REQUIRE(A.entries() == expected);
    }
    SECTION("geometric family") {
        const double eps = 2.0 / std::abs(std::log(0.1));
        const auto A = assemble_lax_matrix(make_potential(CounterexampleFamily{2.0, 0.9}, 8), 2);
        for (int m = 0; m <= 2; ++m)
            for (int n = 0; n <= 2; ++n)
                if (m != n) REQUIRE_THAT(A.entries()(m, n).real(), WithinRel(-eps * std::pow(0.9, std::abs(m - n)), 1e-15));
    }
    SECTION("rejects non-Hermitian input") {
        CMatrix<double> B = CMatrix<double>::Identity(3, 3);
        B(0, 1) = 1.0;
        REQUIRE_THROWS_AS(LaxMatrix(B), ValidationError);
    }
}

TEST_CASE("free spectrum", "[lax]") {
    const auto sd = spectral_data(PotentialSpectrum::zero(4), 16);
    for (int n = 0; n <= 16; ++n) {
        REQUIRE_THAT(sd.lambdas[n], WithinAbs(n, 1e-14));
        REQUIRE_THAT(std::abs(sd.eigvecs(n, n) - 1.0), WithinAbs(0.0, 1e-14));
        REQUIRE_THAT(std::abs(sd.inner1[n] - (n == 0 ? 1.0 : 0.0)), WithinAbs(0.0, 1e-14));
    }
    const auto gt = gaps_and_trace(sd);
    REQUIRE(gt.gaps.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(gt.trace_residual == 0.0);
}

TEST_CASE("refinement and bounds for 0.2 cos x", "[lax]") {
    const auto u = make_potential(CosineFamily{0.2, 1}, 1);
    const auto a = spectral_data(u, 128), b = spectral_data(u, 256);
    REQUIRE(a.lambdas[0] < 0.0);
    REQUIRE((a.lambdas.head(65) - b.lambdas.head(65)).cwiseAbs().maxCoeff() < 1e-8);
    for (int n = 1; n <= a.reliable_count; ++n) {
        REQUIRE(a.lambdas[n] <= n + 1e-6);
        REQUIRE(a.lambdas[n] >= n + a.lambdas[0] - 1e-6);
        REQUIRE(a.gaps[n] >= 0.0);
    }
    REQUIRE(gaps_and_trace(b).trace_residual <= 1e-6);
}

TEST_CASE("gaps agree with eigenvalue differences", "[lax]") {
    // Reliable gaps come from the commutator identity; the eigenvalue difference is an
    // independent evaluation that is exact up to eps * ||L||.
    const auto sd = spectral_data(make_potential(RandomFamily{2, 1.0, 0.3}, 24), 128);
    for (int n = 1; n <= sd.reliable_count; ++n)
        REQUIRE_THAT(sd.gaps[n], WithinAbs(std::max(0.0, sd.lambdas[n] - sd.lambdas[n - 1] - 1.0), 1e-12));
}

TEST_CASE("gap decay for geometric coefficients", "[lax]") {
    const auto sd = spectral_data(make_potential(CounterexampleFamily{0.3, 0.5}, 60), 128);
    const double rho = std::pow(sd.gaps[12] / sd.gaps[1], 1.0 / 11.0);
    UNSCOPED_INFO("fitted ratio " << rho);
    REQUIRE(rho < 1.0);
    for (int n = 2; n <= 12; ++n) REQUIRE(sd.gaps[n] < sd.gaps[n - 1]);
}

TEST_CASE("phase normalization", "[lax]") {
    const auto sd = spectral_data(make_potential(RandomFamily{9, 1.5, 0.4}, 16), 64);
    REQUIRE(std::abs(sd.eigvecs(0, 0).imag()) < 1e-12);
    REQUIRE(sd.eigvecs(0, 0).real() > 0.0);
    for (int n = 1; n <= sd.reliable_count; ++n) {
        const auto p = shift_pairing(sd.eigvecs, n);
        REQUIRE(std::abs(p.imag()) < 1e-12);
        REQUIRE(p.real() > 0.0);
    }
    SECTION("idempotent") {
        const auto again = normalize_phases(sd);
        REQUIRE((again.eigvecs - sd.eigvecs).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("orthonormal") {
        const CMatrix<double> G = sd.eigvecs.adjoint() * sd.eigvecs;
        REQUIRE((G - CMatrix<double>::Identity(65, 65)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("resolvent form", "[lax]") {
    const auto zero = PotentialSpectrum::zero(2);
    REQUIRE_THAT(resolvent_form(zero, 1.0, 8).real(), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(resolvent_form(zero, 2.5, 8).real(), WithinAbs(0.4, 1e-15));

    const auto u = make_potential(RandomFamily{4, 1.0, 0.4}, 16);
    const auto sd = spectral_data(u, 64);
    const double lambda = -sd.lambdas[0] + 2.0;
    std::complex<double> expansion(0);
    for (int n = 0; n <= 64; ++n) expansion += std::norm(sd.inner1[n]) / (sd.lambdas[n] + lambda);
    REQUIRE(std::abs(resolvent_form(u, lambda, 64) - expansion) < 1e-10);

    REQUIRE_THROWS_AS(resolvent_form(u, -sd.lambdas[3], 64), NumericalError);
}

TEST_CASE("real and complex eigenvalue paths agree", "[lax]") {
    const auto u = make_potential(CounterexampleFamily{0.3, 0.5}, 40);
    const auto full = spectral_data(u, 80).lambdas;
    REQUIRE((lax_eigenvalues(u, 80) - full).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("extended precision instantiation", "[lax]") {
    using LD = long double;
    const auto u = make_potential<LD>(CosineFamily{0.2, 1}, 1);
    const auto sd = spectral_data(u, 48);
    const auto ref = spectral_data(make_potential(CosineFamily{0.2, 1}, 1), 48);
    for (int n = 0; n <= 24; ++n) REQUIRE(std::abs(double(sd.lambdas[n]) - ref.lambdas[n]) < 1e-12);
    REQUIRE(gaps_and_trace(sd).trace_residual < 1e-15L);
}

TEST_CASE("small truncation is rejected", "[lax]") {
    REQUIRE_THROWS_AS(assemble_lax_matrix(PotentialSpectrum::zero(1), 0), ValidationError);
}
