#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bo {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Invalid input or violated precondition (CLI exit status 1).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that could not be completed to the required accuracy (CLI exit status 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Japanese bracket <n> = max(1, |n|).
inline int bracket(int n) { return std::max(1, std::abs(n)); }

template <typename Real>
bool all_finite(const CVector<Real>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        using std::isfinite;
        if (!isfinite(v[i].real()) || !isfinite(v[i].imag())) return false;
    }
    return true;
}

}  // namespace bo
