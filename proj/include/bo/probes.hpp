#pragma once

// Sequence-space probes: empirical bilinear constants, the quadratic form Q and the
// divergent sequences behind the smoothness obstruction.

#include "bo/hardy.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bo {

struct RatioStats {
    int count = 0;
    double max = 0.0;
    double mean = 0.0;
    double p05 = 0.0;
    double median = 0.0;
    double p95 = 0.0;
};

struct BilinearProbeReport {
    RatioStats corollary;  ///< ||uv||_{-1/2} / (||u||_{-1/2,sqrt(log)} ||v||_{1/2})
    RatioStats lemma;      ///< ||uv||_{1/2,1/sqrt(log)} / (||u||_{1/2} ||v||_{1/2})
    int skipped = 0;       ///< pairs with a vanishing denominator
};

using PotentialPair = std::pair<PotentialSpectrum, PotentialSpectrum>;

/// Ratios over explicit pairs; products are formed on an oversampled grid.
BilinearProbeReport bilinear_constant_probe(const std::vector<PotentialPair>& pairs);

/// Seeded random pairs with |u^(n)| = n^{-decay_u}, |v^(n)| = n^{-decay_v} and uniform phases.
struct ProbeEnsembleSpec {
    int count = 100;
    std::uint64_t seed = 1;
    int n_max = 128;
    double decay_u = 1.0;
    double decay_v = 2.0;
};

std::vector<PotentialPair> make_probe_ensemble(const ProbeEnsembleSpec& spec);

inline BilinearProbeReport bilinear_constant_probe(const ProbeEnsembleSpec& spec) {
    return bilinear_constant_probe(make_probe_ensemble(spec));
}

/// Fourier coefficients of u v at modes -(nu+nv)..(nu+nv), from an oversampled grid product.
std::vector<std::complex<double>> grid_product(const PotentialSpectrum& u, const PotentialSpectrum& v);

/// Q(x)_n = (1/sqrt(n)) sum_{k>=0, k!=n} x_k x_{n-k}/(n-k), n = 1..N, for the real even sequence
/// with x_0 = 0 and x_k = x[k-1] (k >= 1). Direct double sum.
Eigen::VectorXd q_form(const Eigen::VectorXd& x, int N);

/// Same values through one FFT convolution; for long sequences.
Eigen::VectorXd q_form_fft(const Eigen::VectorXd& x, int N);

/// x_n = 1/(log(n+1) (log log(n+1))^{3/4}) for 2 <= n <= N, x_1 = 0 (log log 2 < 0).
Eigen::VectorXd obstruction_sequence(int N);

struct DivergenceWitness {
    Eigen::VectorXd a;   ///< a_1..a_N, a_1 = 0
    double S = 0.0;      ///< sum_n (log log(n+1))^{1/2} a_n^2
    double l2_sq = 0.0;  ///< sum_n a_n^2
};

/// a_n = 1/(sqrt(n log(n+1)) (log log(n+1))^{3/4}) and the two partial sums, for N >= 10.
DivergenceWitness divergence_witness(int N);

/// CSV with header; one line per probe statistic.
std::string probe_report_csv(const BilinearProbeReport& report);

}  // namespace bo
