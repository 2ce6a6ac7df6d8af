#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rsgame/model.hpp"
#include "rsgame/saddle.hpp"
#include "rsgame/value_coefficients.hpp"

namespace rsgame {

// Full generator of the controlled problem applied to the quadratic value
// function, at arbitrary controls:
//
//   A^{h,gamma} u = du/dt + (b + Bx - (theta/2) Lambda (Sigma'h - gamma))' Du
//                   + 1/2 tr(Lambda Lambda' D2u) - (theta/4) Du' Lambda Lambda' Du
//                   - g(x, h, gamma)
//
// du/dt is evaluated analytically from the coefficient ODE right-hand side at
// the interpolated (Q_t, q_t), not by differencing the node grid, so the
// returned residual isolates saddle/extraction error from interpolation
// error.  Throws TimeOutOfRange for t outside [0, T].
double apply_generator(const ValueCoefficients& coeffs, const MarketModel& model, double theta,
                       double t, const Eigen::VectorXd& x, const ControlPair& c);

struct VerifyGridSpec {
    int n_time = 9;       // evenly spaced times including both endpoints
    int n_random_x = 20;  // random factor draws in addition to 0 and +-axis points
    double x_scale = 1.0; // multiplier on the noise-implied per-axis scale
};

// Certificate data for the saddle-point conditions: the equation residual at
// the saddle controls and the inequality directions under perturbations.
struct VerificationReport {
    double max_saddle_residual = 0.0;    // max |A^{h^,g^} u| / (1 + |x|^2) over the grid
    double worst_h_violation = 0.0;      // most positive A^{h,g^} u found (must stay <= tol)
    double worst_gamma_violation = 0.0;  // most negative A^{h^,g} u found (must stay >= -tol)
    long n_points = 0;
    long n_perturbations = 0;
    std::uint64_t seed = 0;
};

// Evaluates the saddle residual and the two inequality directions over a
// tensor grid of times and factor points, perturbing each control block
// n_perturb times per grid point with isotropic Gaussian directions scaled by
// magnitudes {0.01, 0.1, 1, 10}.  Never throws on violations — the report
// carries them.
VerificationReport isaacs_sign_check(const ValueCoefficients& coeffs, const MarketModel& model,
                                     double theta, const VerifyGridSpec& grid, int n_perturb,
                                     std::uint64_t seed);

// Finite-difference cross-check of the stored derivatives.  Spatial: Du
// against central differences of u (exact for a quadratic up to rounding).
// Temporal: the analytic du/dt against central node differencing of the
// interpolated u (one-sided at t = T).  Relative errors use a unit floor in
// the denominator so near-zero gradients are measured absolutely.
struct FdConsistencyReport {
    double max_rel_err_space = 0.0;
    double max_rel_err_time = 0.0;
    long n_points = 0;
    std::uint64_t seed = 0;
};

FdConsistencyReport fd_consistency_check(const ValueCoefficients& coeffs, const MarketModel& model,
                                         double theta, int n_points, std::uint64_t seed);

}  // namespace rsgame
