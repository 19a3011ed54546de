#include "bo/flow.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace bo;
using Catch::Matchers::WithinAbs;

TEST_CASE("frequencies", "[flow]") {
    const auto free = frequencies(Eigen::VectorXd::Zero(5));
    for (int n = 1; n <= 5; ++n) REQUIRE(free[n - 1] == double(n * n));

    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[0] = 0.1;
    const auto w = frequencies(g);
    REQUIRE_THAT(w[0], WithinAbs(0.8, 1e-15));
    REQUIRE_THAT(w[1], WithinAbs(3.8, 1e-15));
    REQUIRE_THAT(w[2], WithinAbs(8.8, 1e-15));

    SECTION("prefix sums equal the double sum") {
        Eigen::VectorXd h(6);
        h << 0.3, 0.01, 0.2, 0.0, 0.05, 1e-4;
        const auto fast = frequencies(h);
        for (int n = 1; n <= 6; ++n) {
            double s = 0.0;
            for (int k = 1; k <= 6; ++k) s += std::min(k, n) * h[k - 1];
            REQUIRE_THAT(fast[n - 1], WithinAbs(n * n - 2 * s, 1e-14));
        }
    }
    SECTION("negative action") {
        Eigen::VectorXd bad = Eigen::VectorXd::Zero(2);
        bad[1] = -1e-6;
        REQUIRE_THROWS_AS(frequencies(bad), ValidationError);
    }
}

TEST_CASE("free and trivial evolutions", "[flow]") {
    const auto zero = PotentialSpectrum::zero(4);
    REQUIRE(evolve_birkhoff(zero, 1.3, 32).u.coeffs().cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(evolve_direct(zero, 0.5, 1e-2).coeffs().cwiseAbs().maxCoeff() == 0.0);

    const auto u = make_potential(CosineFamily{0.1, 1}, 1);
    const auto same = evolve_birkhoff(u, 0.0, 64);
    REQUIRE(l2_norm(same.u - u) < 1e-6);
}

TEST_CASE("direct integrator reproduces the linear flow", "[flow]") {
    const double delta = 1e-6;
    const auto u = make_potential(CosineFamily{delta, 1}, 1);
    const auto v = evolve_direct(u, 1.0, 1e-3);
    // Linear symbol i n|n|: u^(1)(t) = e^{it} u^(1)(0).
    REQUIRE(std::abs(v[1] - std::polar(delta / 2, 1.0)) < 1e-10);
    REQUIRE(v.coeffs().tail(v.n_max() - 1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("birkhoff and direct flows agree", "[flow]") {
    const auto u = make_potential(CosineFamily{0.1, 1}, 1);
    const std::vector<double> times{0.25, 0.5};
    const auto tb = trajectory_birkhoff(u, times, 64);
    const auto td = trajectory_direct(u, times, 1e-3, 64);
    REQUIRE(tb.complete);
    for (std::size_t i = 0; i < times.size(); ++i) REQUIRE(l2_norm(tb.states[i] - td.states[i]) < 1e-6);
    REQUIRE(td.max_mean == 0.0);
}

TEST_CASE("action-angle rotation keeps the moduli", "[flow]") {
    const auto bc = birkhoff_forward(make_potential(RandomFamily{1, 2.0, 0.15}, 8), 64);
    const auto omega = frequencies(bc.actions);
    const auto a = rotate_coordinates(bc, omega, 0.0), b = rotate_coordinates(bc, omega, 17.5);
    REQUIRE(a.moduli == b.moduli);
    const CVector<double> z0 = a.zetas();
    REQUIRE((z0 - bc.zetas).cwiseAbs().maxCoeff() < 1e-16);
    const CVector<double> z1 = b.zetas();
    for (int n = 0; n < bc.size(); ++n)
        REQUIRE(std::abs(z1[n] - bc.zetas[n] * std::polar(1.0, omega[n] * 17.5)) < 1e-12);
}

TEST_CASE("observable time grid resolves the phase", "[flow]") {
    const double mu = 3.2;
    const auto t = observable_time_grid(0.0, 1.0, mu);
    REQUIRE(t.front() == 0.0);
    REQUIRE(t.back() == 1.0);
    for (std::size_t i = 1; i < t.size(); ++i) REQUIRE(std::abs(1 - 2 * mu) * (t[i] - t[i - 1]) < std::numbers::pi / 8);
    REQUIRE(observable_time_grid(0.0, 1.0, 0.5).size() == 17);
    REQUIRE_THROWS_AS(observable_time_grid(1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("observable of the zero potential vanishes", "[flow]") {
    const auto rep = windowed_observable(PotentialSpectrum::zero(2), 0.0, observable_time_grid(0.0, 1.0, 0.0), 32);
    REQUIRE(rep.converged);
    for (const auto& x : rep.xi) REQUIRE(std::abs(x) == 0.0);
    REQUIRE(rep.windowed_abs == 0.0);
}

TEST_CASE("invalid flow requests", "[flow]") {
    const auto u = make_potential(CosineFamily{0.1, 1}, 1);
    REQUIRE_THROWS_AS(evolve_direct(u, 1.0, 0.0), ValidationError);
    REQUIRE_THROWS_AS(evolve_direct(u, -1.0, 1e-3), ValidationError);
    REQUIRE_THROWS_AS(evolve_direct(make_potential(CosineFamily{0.1, 8}, 8), 1.0, 1e-3, 16), ValidationError);
    REQUIRE_THROWS_AS(trajectory_birkhoff(u, {0.5, 0.25}, 32), ValidationError);
}

TEST_CASE("continuation through negative times", "[flow]") {
    const auto u = make_potential(CosineFamily{0.1, 1}, 1);
    const auto traj = trajectory_birkhoff(u, {-0.5, 0.0, 0.5}, 64);
    REQUIRE(traj.complete);
    REQUIRE(traj.states.size() == 3);
    REQUIRE(l2_norm(traj.states[0] - evolve_birkhoff(u, -0.5, 64).u) < 1e-8);
    REQUIRE(l2_norm(traj.states[1] - u.resized(traj.states[1].n_max())) < 1e-8);
    REQUIRE(l2_norm(traj.states[2] - evolve_direct(u, 0.5, 1e-3, 64)) < 1e-6);
}

TEST_CASE("geometric family in the smooth regime: both methods agree on xi", "[flow]") {
    // beta = 0.3, q = 0.5 gives eps = 0.433 < q; the coefficients fall below 1e-12 by n = 39.
    const int M = 96;
    const auto u0 = make_potential(CounterexampleFamily{0.3, 0.5}, 40);
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    const auto tb = trajectory_birkhoff(u0, times, M);
    const auto td = trajectory_direct(u0, times, 1e-4, 256);
    REQUIRE(tb.complete);
    for (std::size_t i = 0; i < times.size(); ++i) REQUIRE(std::abs(tb.states[i][1] - td.states[i][1]) < 1e-3);
}
