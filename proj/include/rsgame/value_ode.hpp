#pragma once

#include <Eigen/Dense>

#include "rsgame/model.hpp"
#include "rsgame/value_coefficients.hpp"

namespace rsgame {

// Time derivative of the value coefficients at one backward-ODE stage.
struct StageRhs {
    Eigen::MatrixXd dQ;  // n x n, symmetric
    Eigen::VectorXd dq;  // n
    double dk;
};

// Right-hand side of the coupled Riccati/linear/scalar system.
//
// Requiring the optimized generator to vanish identically in x gives
//   d/dt [Q, q, k] = -[quadratic, linear, constant] parts of
//   S(x) = (b + Bx - (theta/2) Lambda (Sigma'h - gamma))'(Qx + q)
//          + 1/2 tr(Lambda Lambda' Q) - (theta/4)(Qx+q)'Lambda Lambda'(Qx+q)
//          - g(x, h, gamma)
// with (h, gamma) the inner saddle at p = Qx + q.  S is exactly quadratic in
// x, so its three parts are extracted exactly by evaluating S at
// x = 0, +-e_i, e_i + e_j — no transcription of closed-form coefficient
// formulas is involved.  The `k` argument does not enter (dk/dt is
// independent of k); it is accepted for a uniform state signature.
StageRhs stage_rhs(const MarketModel& model, double theta, double t, const Eigen::MatrixXd& Q,
                   const Eigen::VectorXd& q, double k);

// Backward classical RK4 integration of stage_rhs from t = T down to 0 with
// fixed step T/n_steps and terminal data Q_T = 0, q_T = 0, k_T = log f.
// Q is re-symmetrized after every stage.  Throws NonFiniteCoefficients on
// blow-up and propagates SingularSaddleSystem from the inner solves.
ValueCoefficients solve_backward(const MarketModel& model, const GameSpec& spec, int n_steps);

// Default step density used when a scenario does not pin n_steps.
int default_ode_steps(double horizon);

// Diagnostic comparison of the extraction-based stage_rhs against a direct
// transcription of the explicit closed-form Riccati/linear/scalar RHS
// formulas obtained by algebraic elimination of the saddle.  The transcribed
// formulas are never used for solving; the report simply records how far
// they sit from the extracted RHS at the supplied sample point.
struct RhsComparison {
    StageRhs extracted;
    StageRhs closed_form;
    double dQ_delta_max;  // max |extracted.dQ - closed_form.dQ|
    double dq_delta_max;
    double dk_delta;
    double trace_term;          // 1/2 tr(Lambda Lambda' Q), common to both forms
    double dk_trace_delta;      // trace-term contribution difference (always 0)
};
RhsComparison explicit_rhs_compare(const MarketModel& model, double theta, double t,
                                   const Eigen::MatrixXd& Q, const Eigen::VectorXd& q, double k);

}  // namespace rsgame
