#pragma once

#include "bo/types.hpp"

#include <cmath>
#include <sstream>

namespace bo {

/// Amplitude of the geometric family u(x) = v(e^{ix}) + conj(v(e^{ix})), v(z) = eps q z / (1 - q z),
/// with eps tied to (beta, q) so that the log-weighted norm tends to beta as q -> 1.
inline double epsilon_of(double beta, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must lie in (0,1)");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive and finite");
    const double eps = beta / std::abs(std::log1p(-q));
    if (!(eps < q)) {
        std::ostringstream os;
        os << "family requires 0 < eps < q, got eps=" << eps << " for beta=" << beta << ", q=" << q;
        throw ValidationError(os.str());
    }
    return eps;
}

/// (beta, q) with the derived amplitude eps; construction enforces 0 < eps < q < 1.
class CounterexampleParams {
public:
    CounterexampleParams(double beta, double q) : beta_(beta), q_(q), eps_(epsilon_of(beta, q)) {}

    double beta() const { return beta_; }
    double q() const { return q_; }
    double eps() const { return eps_; }

    /// Smallest truncation order at which eps q^n has decayed below `tail`.
    int decay_order(double tail = 1e-12) const {
        return static_cast<int>(std::ceil(std::log(tail / eps_) / std::log(q_)));
    }

private:
    double beta_;
    double q_;
    double eps_;
};

}  // namespace bo
