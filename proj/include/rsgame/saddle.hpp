#pragma once

#include <Eigen/Dense>

#include "rsgame/model.hpp"
#include "rsgame/value_coefficients.hpp"

namespace rsgame {

// A pair of controls: the investor's risky-asset fractions h (the cash weight
// 1 - sum h_i is implicit) and the adversary's benchmark volatility gamma.
struct ControlPair {
    Eigen::VectorXd h;      // m
    Eigen::VectorXd gamma;  // n + m
};

// Spatial gradient of the value function, p = Du(t,x) = Q_t x + q_t.
struct GradientInfo {
    Eigen::VectorXd p;  // n
};

// The (h, gamma)-dependent part of the generator applied to the value
// function:
//
//   H(h, gamma) = -(theta/2) (Sigma'h - gamma)' Lambda' p - g(x, h, gamma).
//
// H is a quadratic saddle function for theta in (0, 2): strictly concave in h
// (Hessian -(theta/2 + 1) Sigma Sigma') and strictly convex in gamma (Hessian
// (1 - theta/2) I).
double reduced_hamiltonian(const MarketModel& model, double theta, double t,
                           const Eigen::VectorXd& x, const GradientInfo& grad,
                           const ControlPair& c);

// Unique saddle point of reduced_hamiltonian: solves the joint stationarity
// system in (h, gamma) as one dense (m + n + m)-dimensional linear solve.
// Throws SingularSaddleSystem if the system is numerically singular.
ControlPair solve_inner_saddle(const MarketModel& model, double theta, double t,
                               const Eigen::VectorXd& x, const GradientInfo& grad);

// Investor's exact best response to a fixed gamma:
//   h = (2/(theta+2)) (Sigma Sigma')^{-1} [d + (theta/2) Sigma gamma - (theta/2) Sigma Lambda' p].
Eigen::VectorXd best_response_h(const MarketModel& model, double theta, double t,
                                const Eigen::VectorXd& x, const GradientInfo& grad,
                                const Eigen::VectorXd& gamma);

// Feedback form of the saddle strategies: evaluates solve_inner_saddle at
// p = Q_t x + q_t with coefficients interpolated linearly in t.  Immutable
// after construction; safe to evaluate concurrently.
class FeedbackStrategy {
  public:
    FeedbackStrategy(MarketModel model, double theta, ValueCoefficients coeffs);

    // Throws TimeOutOfRange if t is outside [0, T].
    ControlPair operator()(double t, const Eigen::VectorXd& x) const;

    const ValueCoefficients& coefficients() const { return coeffs_; }

  private:
    MarketModel model_;
    double theta_;
    ValueCoefficients coeffs_;
};

FeedbackStrategy feedback_strategy(const MarketModel& model, double theta,
                                   ValueCoefficients coeffs);

}  // namespace rsgame
