#include "bo/probes.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace bo {
namespace {

double two_sided_norm(const std::vector<std::complex<double>>& c, int max_mode, const WeightSpec& w) {
    double sum = 0.0;
    for (int n = -max_mode; n <= max_mode; ++n) sum += weight(n, w) * std::norm(c[n + max_mode]);
    return std::sqrt(sum);
}

double quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

RatioStats summarize(std::vector<double> r) {
    RatioStats s;
    s.count = static_cast<int>(r.size());
    if (r.empty()) return s;
    std::sort(r.begin(), r.end());
    s.max = r.back();
    s.mean = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
    s.p05 = quantile(r, 0.05);
    s.median = quantile(r, 0.5);
    s.p95 = quantile(r, 0.95);
    return s;
}

PotentialSpectrum random_member(std::uint64_t seed, std::uint64_t stream, int n_max, double decay) {
    const auto phases = random_phases(seed, stream, n_max);
    CVector<double> c(n_max);
    for (int n = 1; n <= n_max; ++n) c[n - 1] = std::polar(std::pow(double(n), -decay), phases[n - 1]);
    return PotentialSpectrum(std::move(c));
}

}  // namespace

std::vector<std::complex<double>> grid_product(const PotentialSpectrum& u, const PotentialSpectrum& v) {
    const int top = u.n_max() + v.n_max();
    int N = 8;
    while (N <= 4 * std::max(u.n_max(), v.n_max())) N *= 2;
    const auto gu = to_grid(u, N);
    const auto gv = to_grid(v, N);
    std::vector<std::complex<double>> prod(N);
    for (int j = 0; j < N; ++j) prod[j] = gu[j] * gv[j];
    const auto spec = analyze(prod);
    std::vector<std::complex<double>> out(2 * top + 1);
    for (int n = -top; n <= top; ++n) out[n + top] = spec[(n + N) % N];
    return out;
}

BilinearProbeReport bilinear_constant_probe(const std::vector<PotentialPair>& pairs) {
    BilinearProbeReport rep;
    std::vector<double> cor, lem;
    for (const auto& [u, v] : pairs) {
        const double u_log = weighted_norm(u, WeightSpec{-0.5, LogMode::sqrt_log});
        const double u_half = weighted_norm(u, WeightSpec{0.5, LogMode::none});
        const double v_half = weighted_norm(v, WeightSpec{0.5, LogMode::none});
        if (u_log == 0.0 || u_half == 0.0 || v_half == 0.0) {
            ++rep.skipped;
            continue;
        }
        const auto uv = grid_product(u, v);
        const int top = u.n_max() + v.n_max();
        cor.push_back(two_sided_norm(uv, top, {-0.5, LogMode::none}) / (u_log * v_half));
        lem.push_back(two_sided_norm(uv, top, {0.5, LogMode::inv_sqrt_log}) / (u_half * v_half));
    }
    rep.corollary = summarize(std::move(cor));
    rep.lemma = summarize(std::move(lem));
    return rep;
}

std::vector<PotentialPair> make_probe_ensemble(const ProbeEnsembleSpec& spec) {
    if (spec.count < 0 || spec.n_max < 1) throw ValidationError("invalid probe ensemble");
    std::vector<PotentialPair> pairs;
    pairs.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        pairs.emplace_back(random_member(spec.seed, 2 * i + 1, spec.n_max, spec.decay_u),
                           random_member(spec.seed, 2 * i + 2, spec.n_max, spec.decay_v));
    }
    return pairs;
}

Eigen::VectorXd q_form(const Eigen::VectorXd& x, int N) {
    if (N < 1) throw ValidationError("q_form needs N >= 1");
    const int L = static_cast<int>(x.size());
    auto at = [&](int k) { return (k == 0 || std::abs(k) > L) ? 0.0 : x[std::abs(k) - 1]; };
    Eigen::VectorXd Q = Eigen::VectorXd::Zero(N);
    for (int n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (int k = 1; k <= std::min(L, n + L); ++k) {
            if (k == n) continue;
            acc += at(k) * at(n - k) / double(n - k);
        }
        Q[n - 1] = acc / std::sqrt(double(n));
    }
    return Q;
}

Eigen::VectorXd q_form_fft(const Eigen::VectorXd& x, int N) {
    if (N < 1) throw ValidationError("q_form needs N >= 1");
    const int L = static_cast<int>(x.size());
    // sum_k x_k y_{n-k} with y_j = x_|j| / j (y_0 = 0); y is stored shifted by L
    int size = 2;
    while (size < 3 * L + 2 + N) size *= 2;
    std::vector<double> a(size, 0.0), b(size, 0.0);
    for (int k = 1; k <= L; ++k) a[k] = x[k - 1];
    for (int j = -L; j <= L; ++j)
        if (j != 0) b[j + L] = x[std::abs(j) - 1] / j;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fa, fb;
    fft.fwd(fa, a);
    fft.fwd(fb, b);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    std::vector<double> conv;
    fft.inv(conv, fa);
    Eigen::VectorXd Q = Eigen::VectorXd::Zero(N);
    for (int n = 1; n <= N; ++n) {
        const int idx = n + L;
        const double s = idx < size ? conv[idx] : 0.0;
        Q[n - 1] = s / std::sqrt(double(n));
    }
    return Q;
}

Eigen::VectorXd obstruction_sequence(int N) {
    if (N < 1) throw ValidationError("sequence length must be >= 1");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    for (int n = 2; n <= N; ++n) {
        const double l = std::log(n + 1.0);
        x[n - 1] = 1.0 / (l * std::pow(std::log(l), 0.75));
    }
    return x;
}

DivergenceWitness divergence_witness(int N) {
    if (N < 10) throw ValidationError("divergence witness needs N >= 10");
    DivergenceWitness w;
    w.a = Eigen::VectorXd::Zero(N);
    for (int n = 2; n <= N; ++n) {
        const double l = std::log(n + 1.0);
        const double ll = std::log(l);
        const double an = 1.0 / (std::sqrt(n * l) * std::pow(ll, 0.75));
        w.a[n - 1] = an;
        w.S += std::sqrt(ll) * an * an;
        w.l2_sq += an * an;
    }
    return w;
}

std::string probe_report_csv(const BilinearProbeReport& report) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "probe,count,skipped,max,mean,p05,median,p95\n";
    auto row = [&](const char* name, const RatioStats& s) {
        os << name << ',' << s.count << ',' << report.skipped << ',' << s.max << ',' << s.mean << ',' << s.p05 << ','
           << s.median << ',' << s.p95 << '\n';
    };
    row("corollary", report.corollary);
    row("lemma", report.lemma);
    return os.str();
}

}  // namespace bo
