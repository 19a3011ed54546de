#pragma once

// Benjamin-Ono evolution: linear phase rotation in Birkhoff coordinates, and a direct
// pseudo-spectral integrator used as an independent oracle.

#include "bo/inverse.hpp"

#include <string>
#include <vector>

namespace bo {

/// omega_n = n^2 - 2 sum_{k<=K} min(k,n) gamma_k for n = 1..K (gammas[n-1] = gamma_n).
Eigen::VectorXd frequencies(const Eigen::VectorXd& gammas);

/// Action-angle form of the rotated coordinates: the moduli are copied from t = 0, so they
/// are bitwise constant in time, and only the angles advance.
struct ActionAngle {
    Eigen::VectorXd moduli;  ///< |zeta_n(0)|
    Eigen::VectorXd angles;  ///< arg zeta_n(0) + omega_n t
    CVector<double> zetas() const;
};

ActionAngle rotate_coordinates(const BirkhoffCoordinates& bc, const Eigen::VectorXd& omega, double t);

struct BirkhoffEvolution {
    PotentialSpectrum u;
    ActionAngle coordinates;
    CVector<double> zetas;  ///< rotated target coordinates
    InverseResult inverse;
};

/// zeta_n(t) = zeta_n(0) e^{i omega_n t}, pulled back with the inverse map. When options.n_max
/// is 0 the solve uses min(M/2, max(u0.n_max, 16)) modes.
BirkhoffEvolution evolve_birkhoff(const PotentialSpectrum& u0, double t, int M, InverseOptions options = {});

/// Integrating-factor RK4 for u_t = (|D|u)_x - (u^2)_x with the 2/3 dealiasing rule.
/// The result carries the modes 1..(grid_size-1)/3 that the dealiased grid represents.
PotentialSpectrum evolve_direct(const PotentialSpectrum& u0, double t, double dt = 1e-4, int grid_size = 0);

enum class FlowMethod { birkhoff, direct };

struct FlowTrajectory {
    std::vector<double> times;
    std::vector<PotentialSpectrum> states;
    FlowMethod method = FlowMethod::birkhoff;
    std::vector<double> residuals;  ///< inverse-map residual per sample (birkhoff only)
    bool complete = true;           ///< false when an inverse solve failed and the trajectory was cut
    double max_mean = 0.0;          ///< largest |u^(0)| seen by the direct integrator
};

struct BirkhoffMarchOptions {
    int n_max = 0;  ///< unknown modes in each inverse solve; 0 as in evolve_birkhoff
    double residual_tol = 1e-10;
    int max_iterations = 50;
    double min_step = 1e-6;  ///< continuation gives up below this time step
};

/// Samples at increasing `times` by continuation in t from u0 at t = 0. Each inverse solve is
/// warm started by secant extrapolation of the last two states and reuses the Jacobian with
/// Broyden updates; a step that does not converge is retried at a quarter of its length.
FlowTrajectory trajectory_birkhoff(const PotentialSpectrum& u0, const std::vector<double>& times, int M,
                                   const BirkhoffMarchOptions& options = {});

/// Samples at increasing nonnegative `times` from one continued integration.
FlowTrajectory trajectory_direct(const PotentialSpectrum& u0, const std::vector<double>& times, double dt = 1e-4,
                                 int grid_size = 0);

struct ObservableReport {
    double mu = 0.0;
    std::vector<double> times;
    std::vector<std::complex<double>> xi;  ///< xi(t) = <u(t)|e^{ix}> = u^(1)(t)
    double windowed_abs = 0.0;              ///< |int_I xi(t) e^{-it(1-2mu)} dt| by the trapezoid rule
    double target = 0.0;                    ///< sqrt(2) |I|
    double ratio = 0.0;                     ///< windowed_abs / target
    bool converged = true;
    double max_residual = 0.0;
};

/// Uniform grid on [t0,t1] fine enough that the phase (1-2mu)t advances by less than pi/8 per step.
std::vector<double> observable_time_grid(double t0, double t1, double mu, int min_points = 17);

/// Windowed observable for arbitrary initial data and rotation rate 1-2mu.
ObservableReport windowed_observable(const PotentialSpectrum& u0, double mu, const std::vector<double>& times, int M,
                                     const BirkhoffMarchOptions& options = {});

/// Observable for the geometric family: mu from the integral equation, birkhoff evolution.
ObservableReport weak_limit_observable(double beta, double q, const std::vector<double>& times, int M,
                                       const BirkhoffMarchOptions& options = {});

}  // namespace bo
