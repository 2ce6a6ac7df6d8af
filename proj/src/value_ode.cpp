#include "rsgame/value_ode.hpp"

#include <cmath>
#include <sstream>

#include "rsgame/errors.hpp"
#include "rsgame/saddle.hpp"

namespace rsgame {

namespace {

// Optimized spatial part of the generator at (t, x) for coefficients (Q, q):
// the full generator minus the du/dt term, with controls at the inner saddle.
double optimized_spatial(const MarketModel& model, double theta, double t,
                         const Eigen::MatrixXd& Q, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& x) {
    const Eigen::VectorXd p = Q * x + q;
    const ControlPair c = solve_inner_saddle(model, theta, t, x, GradientInfo{p});
    const Eigen::VectorXd noise_dir = model.Sigma.transpose() * c.h - c.gamma;
    const Eigen::VectorXd drift = model.b + model.B * x - (theta / 2.0) * (model.Lambda * noise_dir);
    const Eigen::MatrixXd LL = model.Lambda * model.Lambda.transpose();
    return drift.dot(p) + 0.5 * (LL * Q).trace() - (theta / 4.0) * p.dot(LL * p)
           - g_value(model, theta, t, x, c.h, c.gamma);
}

struct CoeffState {
    Eigen::MatrixXd Q;
    Eigen::VectorXd q;
    double k;
};

CoeffState step_state(const CoeffState& y, double scale, const StageRhs& dir) {
    CoeffState out;
    out.Q = y.Q + scale * dir.dQ;
    out.q = y.q + scale * dir.dq;
    out.k = y.k + scale * dir.dk;
    out.Q = 0.5 * (out.Q + out.Q.transpose()).eval();  // keep symmetry exact at every stage
    return out;
}

}  // namespace

StageRhs stage_rhs(const MarketModel& model, double theta, double t, const Eigen::MatrixXd& Q,
                   const Eigen::VectorXd& q, double /*k*/) {
    const int n = model.n();
    auto S = [&](const Eigen::VectorXd& x) { return optimized_spatial(model, theta, t, Q, q, x); };

    // S is exactly quadratic in x: S(x) = 1/2 x'Mx + c'x + S0.  Recover the
    // three parts from 1 + 2n + n(n-1)/2 exact evaluations.
    const double S0 = S(Eigen::VectorXd::Zero(n));
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd c(n);
    Eigen::VectorXd s_plus(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e(i) = 1.0;
        s_plus(i) = S(e);
        e(i) = -1.0;
        const double s_minus = S(e);
        M(i, i) = s_plus(i) + s_minus - 2.0 * S0;
        c(i) = 0.5 * (s_plus(i) - s_minus);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(i) = 1.0;
            e(j) = 1.0;
            const double sij = S(e);
            const double mij = sij - S0 - c(i) - c(j) - 0.5 * M(i, i) - 0.5 * M(j, j);
            M(i, j) = mij;
            M(j, i) = mij;
        }
    }

    StageRhs rhs;
    rhs.dQ = -0.5 * (M + M.transpose());  // symmetrized quadratic part, negated
    rhs.dq = -c;
    rhs.dk = -S0;
    return rhs;
}

int default_ode_steps(double horizon) {
    return std::max(1, static_cast<int>(std::ceil(400.0 * horizon)));
}

ValueCoefficients solve_backward(const MarketModel& model, const GameSpec& spec, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("solve_backward: n_steps must be >= 1");
    const int n = model.n();
    const double T = spec.horizon;
    const double dt = T / n_steps;

    ValueCoefficients coeffs;
    coeffs.grid.resize(n_steps + 1);
    coeffs.Q.resize(n_steps + 1);
    coeffs.q.resize(n_steps + 1);
    coeffs.k.resize(n_steps + 1);
    for (int j = 0; j <= n_steps; ++j) coeffs.grid[j] = (j == n_steps) ? T : j * dt;

    // Terminal data: u(T, x) = log f for every x.
    CoeffState y{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), spec.log_excess0()};
    coeffs.Q[n_steps] = y.Q;
    coeffs.q[n_steps] = y.q;
    coeffs.k[n_steps] = y.k;

    auto rhs_at = [&](double t, const CoeffState& s) {
        return stage_rhs(model, spec.theta, t, s.Q, s.q, s.k);
    };

    for (int j = n_steps; j > 0; --j) {
        const double t = coeffs.grid[j];
        const StageRhs k1 = rhs_at(t, y);
        const StageRhs k2 = rhs_at(t - 0.5 * dt, step_state(y, -0.5 * dt, k1));
        const StageRhs k3 = rhs_at(t - 0.5 * dt, step_state(y, -0.5 * dt, k2));
        const StageRhs k4 = rhs_at(t - dt, step_state(y, -dt, k3));

        StageRhs combo;
        combo.dQ = (k1.dQ + 2.0 * k2.dQ + 2.0 * k3.dQ + k4.dQ) / 6.0;
        combo.dq = (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq) / 6.0;
        combo.dk = (k1.dk + 2.0 * k2.dk + 2.0 * k3.dk + k4.dk) / 6.0;
        y = step_state(y, -dt, combo);

        if (!y.Q.allFinite() || !y.q.allFinite() || !std::isfinite(y.k)) {
            std::ostringstream os;
            os << "value coefficients became non-finite at t = " << coeffs.grid[j - 1]
               << " (step " << (n_steps - j + 1) << " of " << n_steps << ")";
            throw NonFiniteCoefficients(os.str());
        }
        coeffs.Q[j - 1] = y.Q;
        coeffs.q[j - 1] = y.q;
        coeffs.k[j - 1] = y.k;
    }
    return coeffs;
}

RhsComparison explicit_rhs_compare(const MarketModel& model, double theta, double t,
                                   const Eigen::MatrixXd& Q, const Eigen::VectorXd& q, double k) {
    RhsComparison rep;
    rep.extracted = stage_rhs(model, theta, t, Q, q, k);

    // Direct transcription of the explicit closed-form RHS for the quadratic,
    // linear, and constant coefficient ODEs, with two evident misprints in the
    // source formulas repaired ((Sigma Sigma')^{-1} where an inverse of Sigma
    // alone cannot typecheck, and a transpose where an inverse of a vector is
    // printed).  Kept for diagnostics only.
    const int n = model.n();
    const Eigen::MatrixXd SSinv = (model.Sigma * model.Sigma.transpose()).inverse();
    const Eigen::MatrixXd LamSig = model.Lambda * model.Sigma.transpose();      // n x m
    const Eigen::MatrixXd proj = LamSig * SSinv * LamSig.transpose();           // n x n
    const Eigen::MatrixXd LL = model.Lambda * model.Lambda.transpose();
    const double th = theta;
    const double den = (2.0 - th * th) * (2.0 - th * th);

    const Eigen::MatrixXd K0 =
        -th * th / (2.0 * (2.0 - th)) * LL + 2.0 * th * th / ((2.0 - th) * den) * proj;
    const Eigen::MatrixXd K1 = model.B - 2.0 * th / den * model.A.transpose() * SSinv * LamSig.transpose();

    rep.closed_form.dQ = Q * K0 * Q + K1.transpose() * Q + Q * K1
                         + 2.0 * (2.0 - th) / den * model.A.transpose() * SSinv * model.A;

    const Eigen::VectorXd d0 = model.a - Eigen::VectorXd::Constant(model.m(), model.r(t));
    Eigen::RowVectorXd row = d0.transpose() * SSinv
                             * (-2.0 * th / den * LamSig.transpose() * Q + (2.0 - th) / den * model.A);
    rep.closed_form.dq = -((K1.transpose() + Q * K0) * q + Q.transpose() * model.b
                           + row.transpose() - model.beta.transpose());

    const double trace_a = 0.5 * (LL * Q).trace();
    rep.closed_form.dk = -(trace_a + model.r(t) - model.alpha(t)
                           - 2.0 * th / den * d0.dot(SSinv * (LamSig.transpose() * q))
                           + (2.0 - th) / den * d0.dot(SSinv * d0)
                           + th * th / ((2.0 - th) * den) * q.dot(proj * q)
                           - th * th / (4.0 * (2.0 - th)) * q.dot(LL * q));

    rep.dQ_delta_max = (rep.extracted.dQ - rep.closed_form.dQ).cwiseAbs().maxCoeff();
    rep.dq_delta_max = n ? (rep.extracted.dq - rep.closed_form.dq).cwiseAbs().maxCoeff() : 0.0;
    rep.dk_delta = std::abs(rep.extracted.dk - rep.closed_form.dk);

    // The trace contribution to dk/dt is the one term both forms share
    // verbatim; evaluate it twice in different association orders.
    double trace_b = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) trace_b += 0.5 * LL(i, j) * Q(j, i);
    rep.trace_term = trace_a;
    rep.dk_trace_delta = std::abs(trace_a - trace_b);
    return rep;
}

}  // namespace rsgame
