#include "bo/birkhoff.hpp"
#include "bo/inverse.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PotentialSpectrum smooth(std::uint64_t seed) { return make_potential(RandomFamily{seed, 2.0, 0.15}, 8); }

}  // namespace

TEST_CASE("norming constants of the free operator", "[birkhoff]") {
    const auto kappa = norming_constants(spectral_data(PotentialSpectrum::zero(2), 128));
    REQUIRE_THAT(kappa[0], WithinAbs(1.0, 1e-12));
    for (int n = 1; n < kappa.size(); ++n) REQUIRE_THAT(n * kappa[n], WithinAbs(1.0, 1e-12));
    REQUIRE(birkhoff_forward(PotentialSpectrum::zero(2), 128).zetas.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kappa window for 0.2 cos x", "[birkhoff]") {
    const auto kappa = norming_constants(spectral_data(make_potential(CosineFamily{0.2, 1}, 1), 256));
    double lo = INFINITY, hi = 0.0;
    for (int n = 1; n < kappa.size(); ++n) {
        lo = std::min(lo, n * kappa[n]);
        hi = std::max(hi, n * kappa[n]);
    }
    UNSCOPED_INFO("n kappa_n in [" << lo << ", " << hi << "]");
    REQUIRE(lo > 0.0);
    REQUIRE(std::isfinite(hi));
}

TEST_CASE("action and norming identities", "[birkhoff]") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto sd = spectral_data(smooth(s), 128);
        const auto bc = birkhoff_from_spectrum(sd);
        REQUIRE_THAT(std::norm(sd.inner1[0]), WithinRel(bc.kappas[0], 1e-8));
        for (int n = 1; n <= bc.size(); ++n) {
            if (sd.gaps[n] <= 1e-10) continue;
            REQUIRE_THAT(bc.actions[n - 1], WithinRel(sd.gaps[n], 1e-8));
            REQUIRE_THAT(std::norm(sd.inner1[n]), WithinRel(sd.gaps[n] * bc.kappas[n], 1e-8));
        }
    }
}

TEST_CASE("first coordinate of a small cosine", "[birkhoff]") {
    const double eps = 1e-3;
    const auto bc = birkhoff_forward(make_potential(CosineFamily{eps, 1}, 1), 64);
    REQUIRE(std::abs(bc.zetas[0] + eps / 2) <= 1e-5);
}

TEST_CASE("gauge invariance of the actions", "[birkhoff]") {
    const auto u = smooth(3);
    const auto a = birkhoff_forward(u, 128), b = birkhoff_forward(u.translated(0.7), 128);
    REQUIRE((a.actions - b.actions).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generating function", "[birkhoff]") {
    const auto free = generating_function_check(PotentialSpectrum::zero(1), 1.0, 32);
    REQUIRE_THAT(free.lhs, WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(free.rhs, WithinAbs(1.0, 1e-15));

    const auto u = make_potential(CosineFamily{0.2, 1}, 1);
    const double lambda = -spectral_data(u, 256).lambdas[0] + 2.0;
    const auto g = generating_function_check(u, lambda, 256);
    REQUIRE(g.relative_gap <= 1e-7);
    REQUIRE(std::abs(g.imag_lhs) < 1e-14);
}

TEST_CASE("diagonal identity", "[birkhoff]") {
    REQUIRE(diagonal_identity_residual(PotentialSpectrum::zero(1), 32) < 1e-15);
    REQUIRE(diagonal_identity_residual(make_potential(CosineFamily{0.2, 1}, 1), 256) <= 1e-8);
    REQUIRE(diagonal_identity_residual(smooth(5), 128) <= 1e-8);
}

TEST_CASE("differentials at zero", "[birkhoff]") {
    SECTION("zero direction") {
        REQUIRE(differential_at_zero(PotentialSpectrum::zero(3)).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(second_differential_at_zero(PotentialSpectrum::zero(3)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("cos x by hand") {
        const auto xi = make_potential(CosineFamily{1.0, 1}, 1);
        const auto d1 = differential_at_zero(xi);
        REQUIRE(d1.size() == 1);
        REQUIRE_THAT(d1[0].real(), WithinAbs(-0.5, 1e-15));
        const auto d2 = second_differential_at_zero(xi);
        // Only k = 1 contributes at n = 2: -(1/sqrt 2) (1/2)(1/2)/(1 - 2).
        REQUIRE_THAT(d2[1].real(), WithinAbs(1.0 / (4.0 * std::sqrt(2.0)), 1e-10));
        REQUIRE_THAT(d2[1].real(), WithinAbs(0.176777, 1e-6));
        REQUIRE(std::abs(d2[0]) == 0.0);
    }
    SECTION("central differences of the full map") {
        const auto xi = make_potential(CosineFamily{1.0, 1}, 1);
        const auto phi = [&](double e) { return birkhoff_forward(xi.scaled(e), 64).zetas; };
        const auto d1 = differential_at_zero(xi);
        const double e = 1e-4;
        const CVector<double> fd = (phi(e) - phi(-e)) / (2 * e);
        REQUIRE(std::abs(fd[0] - d1[0]) < 1e-7);
        REQUIRE(fd.tail(fd.size() - 1).cwiseAbs().maxCoeff() < 1e-7);

        const double e2 = 1e-3;
        const CVector<double> fd2 = (phi(e2) + phi(-e2)) / (2 * e2 * e2);
        const auto d2 = second_differential_at_zero(xi);
        REQUIRE((fd2.head(d2.size()) - d2).norm() <= 1e-3 * d2.norm());
    }
    SECTION("complex direction fixes the conjugation convention") {
        const auto xi = make_potential(ExplicitFamily{{{0.3, 0.4}, {0.0, -0.2}}}, 2);
        const auto phi = [&](double e) { return birkhoff_forward(xi.scaled(e), 64).zetas; };
        const double e = 1e-3;
        const CVector<double> fd2 = (phi(e) + phi(-e)) / (2 * e * e);
        const auto d2 = second_differential_at_zero(xi);
        REQUIRE((fd2.head(d2.size()) - d2).norm() <= 1e-3 * d2.norm());
    }
}

TEST_CASE("inverse map", "[birkhoff][inverse]") {
    SECTION("zero target") {
        const auto r = birkhoff_inverse(CVector<double>::Zero(4), 32);
        REQUIRE(r.converged);
        REQUIRE(r.iterations <= 1);
        REQUIRE(r.u.coeffs().cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("0.1 cos x roundtrip") {
        const auto u = make_potential(CosineFamily{0.1, 1}, 1);
        InverseOptions opt;
        opt.n_max = 8;
        const auto r = birkhoff_inverse(birkhoff_forward(u, 64), 64, opt);
        REQUIRE(r.converged);
        REQUIRE_THAT(r.u[1].real(), WithinAbs(0.05, 1e-6));
        REQUIRE(std::abs(r.u[1].imag()) < 1e-6);
    }
    SECTION("linearization of a single coordinate") {
        CVector<double> z = CVector<double>::Zero(4);
        z[0] = 1e-3;
        const auto r = birkhoff_inverse(z, 32);
        REQUIRE(r.converged);
        REQUIRE(std::abs(r.u[1] - std::complex<double>(-1e-3, 0.0)) < 1e-5);
    }
    SECTION("smooth ensemble roundtrip") {
        for (std::uint64_t s = 1; s <= 10; ++s) {
            const auto u = smooth(s);
            REQUIRE(l2_norm(u) <= 0.5);
            InverseOptions opt;
            opt.n_max = u.n_max();
            const auto r = birkhoff_inverse(birkhoff_forward(u, 128), 128, opt);
            REQUIRE(weighted_norm(r.u - u, {-0.5, LogMode::sqrt_log}) <= 1e-6);
        }
    }
    SECTION("log is recorded") {
        InverseOptions opt;
        opt.n_max = 4;
        const auto r = birkhoff_inverse(birkhoff_forward(smooth(2), 64), 64, opt);
        REQUIRE(!r.log.empty());
        REQUIRE(r.log.back().residual == r.residual);
    }
    SECTION("invalid requests") {
        REQUIRE_THROWS_AS(birkhoff_inverse(CVector<double>::Zero(40), 32), ValidationError);
        CVector<double> z = CVector<double>::Zero(2);
        z[0] = std::complex<double>(NAN, 0.0);
        REQUIRE_THROWS_AS(birkhoff_inverse(z, 32), ValidationError);
    }
}
