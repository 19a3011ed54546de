#include "bo/counterexample.hpp"

#include "bo/lax.hpp"
#include "bo/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace bo {
namespace {

struct ScaledParts {
    double plus;   // mu I_+
    double minus;  // eps q^2 I_-
    int order;
};

ScaledParts scaled_parts(double mu, const CounterexampleParams& p, int quad_order) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive and finite");
    const double eps = p.eps(), q2 = p.q() * p.q();
    if (!(eps < 1.0)) throw ValidationError("F integrals need eps < 1");
    const auto ip = integrate_jacobi([&](double s) { return std::pow(1.0 - q2 * s, eps); }, -eps, eps + mu - 1.0,
                                     quad_order);
    const auto im = integrate_jacobi([&](double s) { return std::pow(1.0 - q2 * s, eps - 1.0); }, -eps, eps + mu,
                                     quad_order);
    return {mu * ip.value, eps * q2 * im.value, std::max(ip.order, im.order)};
}

}  // namespace

FParts F_parts(double mu, const CounterexampleParams& params, int quad_order) {
    const auto s = scaled_parts(mu, params, quad_order);
    const double qmu = std::pow(params.q(), mu);
    return {qmu * s.plus, qmu * s.minus, s.order};
}

double F_scaled(double mu, const CounterexampleParams& params, int quad_order) {
    const auto s = scaled_parts(mu, params, quad_order);
    return s.plus - s.minus;
}

MuSearch find_mu(const CounterexampleParams& params, std::pair<double, double> bracket, double tol) {
    auto [lo, hi] = bracket;
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw ValidationError("invalid bracket for mu");

    constexpr int kScan = 200;
    std::vector<double> mus(kScan), g(kScan);
    for (int i = 0; i < kScan; ++i) {
        mus[i] = lo * std::pow(hi / lo, double(i) / (kScan - 1));
        g[i] = F_scaled(mus[i], params);
    }

    MuSearch out;
    int first = -1;
    for (int i = 0; i + 1 < kScan; ++i) {
        if ((g[i] < 0.0) != (g[i + 1] < 0.0)) {
            ++out.sign_changes;
            if (first < 0) first = i;
        }
    }
    if (first < 0) {
        std::ostringstream os;
        os << "no sign change of F in [" << lo << ", " << hi << "]: F/q^mu = " << g.front() << " at lo, " << g.back()
           << " at hi";
        out.diagnostic = os.str();
        return out;
    }

    double a = mus[first], b = mus[first + 1], ga = g[first], gb = g[first + 1];
    while (b - a > 1e-9 * b) {
        const double m = 0.5 * (a + b);
        const double gm = F_scaled(m, params);
        if (gm == 0.0) {
            a = b = m;
            ga = gb = 0.0;
            break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    // secant polish, kept inside the bracket
    double x0 = a, x1 = b, g0 = ga, g1 = gb;
    double mu = std::abs(ga) < std::abs(gb) ? a : b;
    for (int it = 0; it < 8 && g1 != g0; ++it) {
        const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if (!(x2 >= a && x2 <= b)) break;
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = F_scaled(x1, params);
        mu = x1;
        if (std::abs(g1) * std::pow(params.q(), x1) < tol) break;
    }

    out.mu = mu;
    const double qmu = std::pow(params.q(), mu);
    out.residual = std::abs(F_scaled(mu, params)) * qmu;
    const double h = 1e-5 * mu;
    const double fp = F_scaled(mu + h, params) * std::pow(params.q(), mu + h);
    const double fm = F_scaled(mu - h, params) * std::pow(params.q(), mu - h);
    out.derivative = (fp - fm) / (2.0 * h);
    std::ostringstream os;
    os << "root found; " << out.sign_changes << " sign change(s) in the scan";
    out.diagnostic = os.str();
    return out;
}

Lambda0Check cross_validate_lambda0(const CounterexampleParams& params, double mu, int M) {
    Lambda0Check out;
    out.M = std::max(M, params.decay_order(1e-12));
    const auto u = make_potential(CounterexampleFamily{params.beta(), params.q()}, out.M);
    const auto ev = lax_eigenvalues(u, out.M);
    out.minus_mu = -mu;
    out.lambda0 = ev[0];
    out.relative_gap = std::abs(ev[0] + mu) / mu;
    out.negative_count = static_cast<int>((ev.array() < 0.0).count());
    out.gamma1 = ev[1] - ev[0] - 1.0;
    return out;
}

std::vector<TrendRow> norm_and_weak_trend(double beta, const std::vector<double>& qgrid) {
    std::vector<TrendRow> rows;
    rows.reserve(qgrid.size());
    for (double q : qgrid) {
        const CounterexampleParams p(beta, q);
        const auto u = make_potential(CounterexampleFamily{beta, q}, std::max(1, p.decay_order(1e-17)));
        rows.push_back({q, p.eps(), weighted_norm(u, WeightSpec{-0.5, LogMode::sqrt_log}), p.eps() * q});
    }
    return rows;
}

}  // namespace bo
