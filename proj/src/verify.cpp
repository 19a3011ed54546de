#include "bo/verify.hpp"

#include "bo/bo.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

namespace bo {
namespace {

using Check = std::function<CheckResult()>;

CheckResult result(bool pass, double value, double tol, std::string detail = {}) {
    CheckResult r;
    r.pass = pass;
    r.value = value;
    r.tolerance = tol;
    r.detail = std::move(detail);
    return r;
}

CheckResult at_most(double value, double tol, std::string detail = {}) {
    return result(value <= tol, value, tol, std::move(detail));
}

PotentialSpectrum smooth_member(std::uint64_t seed) {
    return make_potential(RandomFamily{seed, 2.0, 0.15}, 8);
}

HardyFunction random_hardy(std::uint64_t seed, std::uint64_t stream, int n_max) {
    const auto ph = random_phases(seed, stream, n_max + 1);
    CVector<double> c(n_max + 1);
    for (int n = 0; n <= n_max; ++n) c[n] = std::polar(1.0 / (1.0 + n), ph[n]);
    return HardyFunction(std::move(c));
}

std::complex<double> pair(const HardyFunction& f, const HardyFunction& g) { return g.coeffs().dot(f.coeffs()); }

// -------------------------------------------------------------------------------------------
std::vector<std::pair<std::string, Check>> hardy_checks(const VerifyOptions& o) {
    std::vector<std::pair<std::string, Check>> c;
    c.emplace_back("reality of grid samples", [o] {
        const auto u = make_potential(RandomFamily{o.seed, 1.5}, 32);
        const auto g = to_grid(u, 4 * u.n_max());
        double worst = 0.0;
        for (const auto& x : g) worst = std::max(worst, std::abs(x.imag()));
        return at_most(worst / l2_norm(u), 1e-12);
    });
    c.emplace_back("Toeplitz adjoint symmetry", [o] {
        const auto u = make_potential(RandomFamily{o.seed, 1.0}, 24);
        const auto f = random_hardy(o.seed, 11, 48), g = random_hardy(o.seed, 12, 48);
        const auto lhs = pair(toeplitz_apply(u, f), g), rhs = pair(f, toeplitz_apply(u, g));
        return at_most(std::abs(lhs - rhs) / std::abs(lhs), 1e-12);
    });
    c.emplace_back("dyadic reconstruction", [o] {
        const auto f = random_hardy(o.seed, 13, 256);
        CVector<double> sum = CVector<double>::Zero(257);
        for (const auto& b : dyadic_decompose(f)) sum += b.coeffs();
        return at_most((sum - f.coeffs()).norm() / f.coeffs().norm(), 1e-14);
    });
    c.emplace_back("norm ordering in the log weight", [o] {
        // log(<n>+1) >= 1 only from n = 2 on, so the plain chain needs u^(1) = 0; in general
        // the weights compare up to the factor log 2.
        bool ok = true;
        const double ln2 = std::log(2.0);
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto u = make_potential(RandomFamily{o.seed + s, 1.0}, 64);
            CVector<double> tail = u.coeffs();
            tail[0] = 0.0;
            const PotentialSpectrum v(tail);
            for (double e : {-0.5, 0.0, 0.5}) {
                const double a = weighted_norm(v, {e, LogMode::sqrt_log});
                const double b = weighted_norm(v, {e, LogMode::none});
                const double d = weighted_norm(v, {e, LogMode::inv_sqrt_log});
                ok = ok && a >= b && b >= d;
                const double au = weighted_norm(u, {e, LogMode::sqrt_log});
                const double bu = weighted_norm(u, {e, LogMode::none});
                const double du = weighted_norm(u, {e, LogMode::inv_sqrt_log});
                ok = ok && au * au >= ln2 * bu * bu && bu * bu >= ln2 * du * du;
            }
        }
        return result(ok, ok ? 0.0 : 1.0, 0.0);
    });
    c.emplace_back("q_form equals a literal triple loop", [o] {
        const auto ph = random_phases(o.seed, 14, 6);
        Eigen::VectorXd x(6);
        for (int k = 0; k < 6; ++k) x[k] = std::cos(ph[k]);
        const int N = 14;
        const Eigen::VectorXd Q = q_form(x, N);
        auto at = [&](int k) { return (k == 0 || std::abs(k) > 6) ? 0.0 : x[std::abs(k) - 1]; };
        double worst = 0.0;
        for (int n = 1; n <= N; ++n) {
            double acc = 0.0;
            for (int k = 0; k <= 6; ++k)
                for (int j = -6; j <= 6; ++j)
                    if (j == n - k && k != n) acc += at(k) * at(j) / double(n - k);
            worst = std::max(worst, std::abs(Q[n - 1] - acc / std::sqrt(double(n))));
        }
        return at_most(worst, 0.0);
    });
    c.emplace_back("q_form FFT path matches direct sum", [] {
        const Eigen::VectorXd x = obstruction_sequence(400);
        return at_most((q_form_fft(x, 400) - q_form(x, 400)).cwiseAbs().maxCoeff(), 1e-12);
    });
    return c;
}

// -------------------------------------------------------------------------------------------
std::vector<std::pair<std::string, Check>> lax_checks(const VerifyOptions& o) {
    const int M = o.modes;
    const auto cosu = make_potential(CosineFamily{0.2}, 1);
    std::vector<std::pair<std::string, Check>> c;
    c.emplace_back("Lax matrix Hermitian with diagonal 0..M", [o, M] {
        const auto A = assemble_lax_matrix(make_potential(RandomFamily{o.seed, 2.0}, 16), M);
        const double herm = (A.entries() - A.entries().adjoint()).cwiseAbs().maxCoeff();
        double diag = 0.0;
        for (int m = 0; m <= M; ++m) diag = std::max(diag, std::abs(A.entries()(m, m) - double(m)));
        return at_most(std::max(herm, diag), 0.0);
    });
    c.emplace_back("orthonormal eigenvectors and phase conditions", [o, M] {
        const auto sd = spectral_data(smooth_member(o.seed), M);
        const int n = sd.modes() + 1;
        const double orth = (sd.eigvecs.adjoint() * sd.eigvecs - CMatrix<double>::Identity(n, n)).cwiseAbs().maxCoeff();
        double phase = std::abs(sd.eigvecs(0, 0).imag());
        bool positive = sd.eigvecs(0, 0).real() > 0.0;
        for (int k = 1; k <= sd.reliable_count; ++k) {
            const auto ip = shift_pairing(sd.eigvecs, k);
            phase = std::max(phase, std::abs(ip.imag()));
            positive = positive && ip.real() > 0.0;
        }
        std::ostringstream os;
        os << "orthonormality " << orth << ", phase imag " << phase;
        return result(positive && orth <= 1e-10 && phase <= 1e-12, std::max(orth, phase), 1e-12, os.str());
    });
    c.emplace_back("bound chain n+lambda_0 <= lambda_n <= n", [cosu, M] {
        const auto sd = spectral_data(cosu, M);
        double viol = 0.0;
        for (int n = 0; n <= sd.reliable_count; ++n) {
            viol = std::max(viol, sd.lambdas[n] - n);
            viol = std::max(viol, n + sd.lambdas[0] - sd.lambdas[n]);
        }
        return at_most(viol, 1e-6);
    });
    c.emplace_back("gap positivity", [o, M] {
        const auto sd = spectral_data(smooth_member(o.seed), M);
        double worst = 0.0;
        for (int n = 1; n <= sd.reliable_count; ++n)
            worst = std::max(worst, -(sd.lambdas[n] - sd.lambdas[n - 1] - 1.0));
        return at_most(worst, 1e-8);
    });
    c.emplace_back("trace residual monotone under doubling", [cosu, M] {
        const double r1 = gaps_and_trace(spectral_data(cosu, M)).trace_residual;
        const double r2 = gaps_and_trace(spectral_data(cosu, 2 * M)).trace_residual;
        std::ostringstream os;
        os << "r(M)=" << r1 << ", r(2M)=" << r2;
        return at_most(r2 - r1, 1e-9, os.str());
    });
    c.emplace_back("resolvent form is real", [o, M] {
        const auto u = smooth_member(o.seed);
        const double l0 = spectral_data(u, M).lambdas[0];
        const auto h = resolvent_form(u, -l0 + 2.0, M);
        return at_most(std::abs(h.imag()) / std::abs(h), 1e-12);
    });
    c.emplace_back("refinement stability lambda_n(M) vs lambda_n(2M)", [cosu, M] {
        const auto a = spectral_data(cosu, M), b = spectral_data(cosu, 2 * M);
        return at_most((a.lambdas.head(M / 2 + 1) - b.lambdas.head(M / 2 + 1)).cwiseAbs().maxCoeff(), 1e-8);
    });
    return c;
}

// -------------------------------------------------------------------------------------------
double relative_action_error(const SpectralData& sd, const BirkhoffCoordinates& bc) {
    double worst = 0.0;
    for (int n = 1; n <= bc.size(); ++n)
        if (sd.gaps[n] > 1e-10) worst = std::max(worst, std::abs(bc.actions[n - 1] - sd.gaps[n]) / sd.gaps[n]);
    return worst;
}

std::vector<std::pair<std::string, Check>> birkhoff_checks(const VerifyOptions& o) {
    const int M = o.modes;
    std::vector<std::pair<std::string, Check>> c;
    c.emplace_back("action identity |zeta_n|^2 = gamma_n", [o, M] {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto sd = spectral_data(smooth_member(o.seed + s), M);
            worst = std::max(worst, relative_action_error(sd, birkhoff_from_spectrum(sd)));
        }
        return at_most(worst, 1e-8);
    });
    c.emplace_back("norming identity |<1|f_n>|^2 = gamma_n kappa_n", [o, M] {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto sd = spectral_data(smooth_member(o.seed + s), M);
            const auto kappa = norming_constants(sd);
            worst = std::max(worst, std::abs(std::norm(sd.inner1[0]) - kappa[0]) / kappa[0]);
            for (int n = 1; n <= sd.reliable_count; ++n)
                if (sd.gaps[n] > 1e-10)
                    worst = std::max(worst, std::abs(std::norm(sd.inner1[n]) - sd.gaps[n] * kappa[n]) /
                                                (sd.gaps[n] * kappa[n]));
        }
        return at_most(worst, 1e-8);
    });
    c.emplace_back("kappa window: n kappa_n positive and finite", [o, M] {
        const auto kappa = norming_constants(spectral_data(smooth_member(o.seed), M));
        double lo = INFINITY, hi = 0.0;
        for (int n = 1; n < kappa.size(); ++n) {
            lo = std::min(lo, n * kappa[n]);
            hi = std::max(hi, n * kappa[n]);
        }
        std::ostringstream os;
        os << "n kappa_n in [" << lo << ", " << hi << "]";
        return result(lo > 0.0 && std::isfinite(hi) && kappa[0] > 0.0, lo, 0.0, os.str());
    });
    c.emplace_back("differentials agree with finite differences", [M] {
        const std::vector<PotentialSpectrum> xis{
            make_potential(CosineFamily{1.0, 1}, 3), make_potential(CosineFamily{1.0, 2}, 3),
            make_potential(ExplicitFamily{{{0.5, 0.0}, {0.0, 0.0}, {0.25, 0.0}}}, 3)};
        double worst_order = INFINITY, worst_second = 0.0;
        for (const auto& xi : xis) {
            const CVector<double> d1 = differential_at_zero(xi);
            const CVector<double> d2 = second_differential_at_zero(xi);
            auto phi = [&](double e) { return birkhoff_forward(xi.scaled(e), M).zetas; };
            auto err1 = [&](double e) {
                const CVector<double> fd = (phi(e) - phi(-e)) / (2 * e);
                return (fd.head(d1.size()) - d1).norm();
            };
            worst_order = std::min(worst_order, std::log2(err1(1e-2) / err1(5e-3)));
            const double e = 1e-3;
            const CVector<double> fd2 = (phi(e) + phi(-e)) / (2 * e * e);  // Phi(0) = 0
            worst_second = std::max(worst_second, (fd2.head(d2.size()) - d2).norm() / d2.norm());
        }
        std::ostringstream os;
        os << "first-order rate " << worst_order << ", second relative error " << worst_second;
        return result(worst_order >= 1.9 && worst_second <= 1e-3, worst_second, 1e-3, os.str());
    });
    c.emplace_back("gauge invariance of actions", [o, M] {
        const auto u = smooth_member(o.seed);
        const auto a = birkhoff_forward(u, M), b = birkhoff_forward(u.translated(0.7), M);
        return at_most((a.actions - b.actions).cwiseAbs().maxCoeff(), 1e-12);
    });
    c.emplace_back("inverse roundtrip", [o, M] {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto u = smooth_member(o.seed + s);
            InverseOptions opt;
            opt.n_max = u.n_max();
            const auto inv = birkhoff_inverse(birkhoff_forward(u, M), M, opt);
            worst = std::max(worst, weighted_norm(inv.u - u, {-0.5, LogMode::sqrt_log}));
        }
        return at_most(worst, 1e-6);
    });
    return c;
}

// -------------------------------------------------------------------------------------------
std::vector<std::pair<std::string, Check>> flow_checks(const VerifyOptions& o) {
    const int M = o.modes;
    const auto u0 = make_potential(CosineFamily{0.1}, 1);
    const std::vector<double> times{0.25, 0.5, 1.0};
    std::vector<std::pair<std::string, Check>> c;
    c.emplace_back("action conservation under phase rotation", [u0, M] {
        const auto bc = birkhoff_forward(u0, M);
        const auto omega = frequencies(bc.actions);
        const Eigen::VectorXd start = rotate_coordinates(bc, omega, 0.0).moduli;
        double worst = 0.0;
        for (double t : {0.5, 1.0, 10.0, -3.0})
            worst = std::max(worst, (rotate_coordinates(bc, omega, t).moduli - start).cwiseAbs().maxCoeff());
        return result(worst == 0.0, worst, 0.0, "bitwise comparison of |zeta_n| across times");
    });
    c.emplace_back("direct-method isospectrality", [u0, M] {
        const auto g0 = spectral_data(u0, M).gaps;
        const auto traj = trajectory_direct(u0, {0.25, 0.5, 0.75, 1.0}, 1e-4, 256);
        double worst = 0.0;
        for (const auto& s : traj.states)
            worst = std::max(worst, (spectral_data(s, M).gaps - g0).head(M / 2 + 1).cwiseAbs().maxCoeff());
        return at_most(worst, 1e-5);
    });
    c.emplace_back("birkhoff vs direct evolution (L2)", [u0, M, times] {
        const auto tb = trajectory_birkhoff(u0, times, M);
        const auto td = trajectory_direct(u0, times, 1e-4, 256);
        if (!tb.complete) return result(false, INFINITY, 1e-4, "inverse map did not converge");
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, l2_norm(tb.states[i] - td.states[i]));
        return at_most(worst, 1e-4);
    });
    c.emplace_back("time reversibility of the birkhoff flow", [u0, M] {
        const auto fwd = evolve_birkhoff(u0, 0.5, M);
        const auto back = evolve_birkhoff(fwd.u, -0.5, M);
        return at_most(weighted_norm(back.u - u0, {-0.5, LogMode::sqrt_log}), 1e-6);
    });
    c.emplace_back("mean conservation in the direct method", [u0] {
        const auto traj = trajectory_direct(u0, {0.5, 1.0}, 1e-4, 256);
        return at_most(traj.max_mean, 0.0);
    });
    return c;
}

// -------------------------------------------------------------------------------------------
std::vector<std::pair<std::string, Check>> counterexample_checks(const VerifyOptions&) {
    std::vector<std::pair<std::string, Check>> c;
    c.emplace_back("root uniqueness on [1e-3, 1e3]", [] {
        int worst = 0;
        bool found = true;
        for (double q : {0.9, 0.99}) {
            const auto s = find_mu(CounterexampleParams(2.0, q));
            worst = std::max(worst, s.sign_changes);
            found = found && s.mu.has_value();
        }
        return result(found && worst == 1, worst, 1);
    });
    c.emplace_back("quadrature refinement of F+-", [] {
        const CounterexampleParams p(2.0, 0.9);
        const auto a = F_parts(1.0, p, 64), b = F_parts(1.0, p, 128);
        return at_most(std::max(std::abs(a.plus - b.plus) / b.plus, std::abs(a.minus - b.minus) / b.minus), 1e-10);
    });
    c.emplace_back("matrix vs integral lambda_0 (beta=2, q=0.9)", [] {
        const CounterexampleParams p(2.0, 0.9);
        const auto mu = find_mu(p).mu.value();
        const auto chk = cross_validate_lambda0(p, mu);
        std::ostringstream os;
        os << "mu=" << mu << ", lambda_0=" << chk.lambda0 << ", M=" << chk.M;
        return at_most(chk.relative_gap, 1e-3, os.str());
    });
    c.emplace_back("one negative eigenvalue; gamma_1 grows with q", [] {
        double prev = -INFINITY;
        bool ok = true;
        std::ostringstream os;
        for (double q : {0.9, 0.99}) {
            const CounterexampleParams p(2.0, q);
            const auto chk = cross_validate_lambda0(p, find_mu(p).mu.value());
            ok = ok && chk.negative_count == 1 && chk.gamma1 > prev;
            prev = chk.gamma1;
            os << "q=" << q << ": negatives " << chk.negative_count << ", gamma_1 " << chk.gamma1 << "; ";
        }
        return result(ok, prev, 0.0, os.str());
    });
    return c;
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
    if (options.modes < 8) throw ValidationError("verify needs --modes >= 8");
    const std::vector<std::pair<std::string, decltype(&hardy_checks)>> suites{
        {"hardy", &hardy_checks},
        {"lax", &lax_checks},
        {"birkhoff", &birkhoff_checks},
        {"flow", &flow_checks},
        {"counterexample", &counterexample_checks}};
    bool known = options.suite == "all";
    for (const auto& s : suites) known = known || s.first == options.suite;
    if (!known) throw ValidationError("unknown verify suite: " + options.suite);

    std::vector<CheckResult> out;
    for (const auto& [suite, make] : suites) {
        if (options.suite != "all" && options.suite != suite) continue;
        for (auto& [name, check] : make(options)) {
            CheckResult r;
            try {
                r = check();
            } catch (const std::exception& e) {
                r = result(false, NAN, NAN, std::string("exception: ") + e.what());
            }
            r.suite = suite;
            r.name = name;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string format_verify_table(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "status" << "  " << std::setw(15) << "suite" << std::setw(52) << "check"
       << std::setw(14) << "value" << std::setw(12) << "tolerance" << "detail\n";
    int failed = 0;
    for (const auto& r : results) {
        failed += !r.pass;
        os << std::left << std::setw(6) << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(15) << r.suite
           << std::setw(52) << r.name << std::setw(14) << std::setprecision(4) << r.value << std::setw(12)
           << r.tolerance << r.detail << '\n';
    }
    os << results.size() - failed << "/" << results.size() << " checks passed\n";
    return os.str();
}

}  // namespace bo
