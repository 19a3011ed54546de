#include "bo/probes.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid product of two cosines", "[probes]") {
    const auto c = make_potential(CosineFamily{1.0, 1}, 1);
    const auto p = grid_product(c, c);  // modes -2..2
    REQUIRE(p.size() == 5);
    REQUIRE_THAT(p[2].real(), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(p[0].real(), WithinAbs(0.25, 1e-15));
    REQUIRE_THAT(p[4].real(), WithinAbs(0.25, 1e-15));
    REQUIRE(std::abs(p[1]) + std::abs(p[3]) < 1e-15);
}

TEST_CASE("bilinear probe on one pair", "[probes]") {
    // cos^2 x = 1/2 + cos(2x)/2: modes 0 and +-2 with coefficients 1/2 and 1/4.
    const double uv_minus = 0.25 + 2 * 0.0625 / 2;                             // ||uv||^2_{-1/2}
    const double uv_plus = 0.25 / std::log(2.0) + 2 * 0.0625 * 2 / std::log(3.0);  // ||uv||^2_{1/2,1/sqrt(log)}
    const double u_log = 2 * 0.25 * std::log(2.0);                               // ||u||^2_{-1/2,sqrt(log)}
    const double v_half = 2 * 0.25;                                              // ||v||^2_{1/2}
    REQUIRE_THAT(uv_minus, WithinAbs(0.3125, 1e-15));

    const auto c = make_potential(CosineFamily{1.0, 1}, 1);
    const auto r = bilinear_constant_probe(std::vector<PotentialPair>{{c, c}});
    REQUIRE(r.skipped == 0);
    REQUIRE(r.corollary.count == 1);
    REQUIRE_THAT(r.corollary.max, WithinRel(std::sqrt(uv_minus / (u_log * v_half)), 1e-13));
    REQUIRE_THAT(r.corollary.max, WithinAbs(1.3429, 1e-4));
    REQUIRE_THAT(r.lemma.max, WithinRel(std::sqrt(uv_plus / (v_half * v_half)), 1e-13));
}

TEST_CASE("bilinear probe skips vanishing pairs", "[probes]") {
    const auto c = make_potential(CosineFamily{1.0, 1}, 1);
    const auto r = bilinear_constant_probe(std::vector<PotentialPair>{{PotentialSpectrum::zero(1), c}, {c, c}});
    REQUIRE(r.skipped == 1);
    REQUIRE(r.corollary.count == 1);
}

TEST_CASE("bilinear constants are stable under refinement", "[probes]") {
    ProbeEnsembleSpec spec;
    spec.count = 100;
    spec.seed = 1;
    spec.n_max = 128;
    const auto a = bilinear_constant_probe(spec);
    spec.n_max = 256;
    const auto b = bilinear_constant_probe(spec);
    UNSCOPED_INFO("corollary max " << a.corollary.max << " -> " << b.corollary.max);
    REQUIRE(std::isfinite(a.corollary.max));
    REQUIRE(std::abs(b.corollary.max / a.corollary.max - 1.0) <= 0.05);
    REQUIRE(a.corollary.p05 <= a.corollary.median);
    REQUIRE(a.corollary.median <= a.corollary.p95);
    REQUIRE(a.corollary.p95 <= a.corollary.max);
}

TEST_CASE("quadratic form Q", "[probes]") {
    REQUIRE(q_form(Eigen::VectorXd::Zero(6), 6).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd delta = Eigen::VectorXd::Zero(6);
    delta[0] = 1.0;
    const auto q = q_form(delta, 6);
    REQUIRE(q[0] == 0.0);
    REQUIRE_THAT(q[1], WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    REQUIRE(q.tail(4).cwiseAbs().maxCoeff() == 0.0);

    const auto x = obstruction_sequence(400);
    REQUIRE((q_form(x, 400) - q_form_fft(x, 400)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence witness", "[probes]") {
    const auto w3 = divergence_witness(1000);
    REQUIRE(w3.a[0] == 0.0);
    const double l3 = std::log(3.0);
    REQUIRE_THAT(w3.a[1], WithinRel(1.0 / (std::sqrt(2 * l3) * std::pow(std::log(l3), 0.75)), 1e-14));
    REQUIRE_THAT(w3.a[1], WithinAbs(3.97238, 1e-5));

    const auto w4 = divergence_witness(10000);
    REQUIRE(w4.S > w3.S);
    REQUIRE(w4.l2_sq > w3.l2_sq);
    REQUIRE(w4.S - w3.S > w4.l2_sq - w3.l2_sq);
    REQUIRE_THROWS_AS(divergence_witness(5), ValidationError);

    const auto x = obstruction_sequence(10);
    REQUIRE(x[0] == 0.0);
    REQUIRE_THAT(x[1], WithinRel(1.0 / (l3 * std::pow(std::log(l3), 0.75)), 1e-14));
}

TEST_CASE("probe report CSV", "[probes]") {
    const auto c = make_potential(CosineFamily{1.0, 1}, 1);
    const auto csv = probe_report_csv(bilinear_constant_probe(std::vector<PotentialPair>{{c, c}}));
    REQUIRE(csv.rfind("probe,count,skipped,max,mean,p05,median,p95\n", 0) == 0);
}
