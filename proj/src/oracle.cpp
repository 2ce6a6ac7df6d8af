#include "rsgame/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rsgame/errors.hpp"
#include "rsgame/value_ode.hpp"

namespace rsgame {

namespace {

struct MomentState {
    Eigen::VectorXd mean;  // n + 1: (mean X, mean F)
    Eigen::MatrixXd cov;   // (n+1) x (n+1)
};

}  // namespace

GaussianMoments gaussian_moments_constant_controls(const MarketModel& model, const GameSpec& spec,
                                                   const ControlPair& c, int n_steps) {
    const int n = model.n();
    if (n_steps <= 0) n_steps = default_ode_steps(spec.horizon);
    const double dt = spec.horizon / n_steps;

    // Augmented state Y = (X, F) is linear-Gaussian for constant (h, gamma):
    //   dY = (b_aug(t) + B_aug Y) dt + L_aug dW
    // with the F-row of B_aug equal to (h'A - beta, 0) and the F-row of L_aug
    // equal to (h'Sigma - gamma').
    Eigen::MatrixXd B_aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    B_aug.topLeftCorner(n, n) = model.B;
    B_aug.block(n, 0, 1, n) = c.h.transpose() * model.A - model.beta;

    Eigen::MatrixXd L_aug(n + 1, model.brownian_dim());
    L_aug.topRows(n) = model.Lambda;
    L_aug.row(n) = (model.Sigma.transpose() * c.h - c.gamma).transpose();
    const Eigen::MatrixXd LLt = L_aug * L_aug.transpose();

    const double const_drift_F = c.h.dot(model.a) - 0.5 * (model.Sigma.transpose() * c.h).squaredNorm()
                                 + 0.5 * c.gamma.squaredNorm();
    auto b_aug_at = [&](double t) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
        v.head(n) = model.b;
        // r(t)(1 - h'1) - alpha(t) plus the time-constant control terms.
        v(n) = model.r(t) * (1.0 - c.h.sum()) - model.alpha(t) + const_drift_F;
        return v;
    };

    auto rhs = [&](double t, const MomentState& s) {
        MomentState d;
        d.mean = b_aug_at(t) + B_aug * s.mean;
        d.cov = B_aug * s.cov + s.cov * B_aug.transpose() + LLt;
        return d;
    };
    auto advance = [&](const MomentState& s, double scale, const MomentState& dir) {
        MomentState out;
        out.mean = s.mean + scale * dir.mean;
        out.cov = s.cov + scale * dir.cov;
        out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
        return out;
    };

    MomentState y;
    y.mean = Eigen::VectorXd::Zero(n + 1);
    y.mean.head(n) = spec.x0;
    y.mean(n) = spec.log_excess0();
    y.cov = Eigen::MatrixXd::Zero(n + 1, n + 1);

    for (int j = 0; j < n_steps; ++j) {
        const double t = j * dt;
        const MomentState k1 = rhs(t, y);
        const MomentState k2 = rhs(t + 0.5 * dt, advance(y, 0.5 * dt, k1));
        const MomentState k3 = rhs(t + 0.5 * dt, advance(y, 0.5 * dt, k2));
        const MomentState k4 = rhs(t + dt, advance(y, dt, k3));
        MomentState combo;
        combo.mean = (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean) / 6.0;
        combo.cov = (k1.cov + 2.0 * k2.cov + 2.0 * k3.cov + k4.cov) / 6.0;
        y = advance(y, dt, combo);
    }

    GaussianMoments out;
    out.mean_F = y.mean(n);
    out.var_F = std::max(0.0, y.cov(n, n));
    return out;
}

double gaussian_J_constant_controls(const MarketModel& model, const GameSpec& spec,
                                    const ControlPair& c, int n_steps) {
    const GaussianMoments mom = gaussian_moments_constant_controls(model, spec, c, n_steps);
    return mom.mean_F - (spec.theta / 4.0) * mom.var_F;
}

ControlPair brute_saddle(const MarketModel& model, double theta, double t,
                         const Eigen::VectorXd& x, const GradientInfo& grad, double grid_radius,
                         double grid_step) {
    const int m = model.m();
    const int k = model.brownian_dim();
    if (m + k > 4) throw std::invalid_argument("brute_saddle handles desk scale only (m+n+m <= 4)");
    if (!(grid_radius > 0.0) || !(grid_step > 0.0))
        throw std::invalid_argument("brute_saddle: grid_radius and grid_step must be positive");

    // Per-block exact responses, deliberately written out here rather than
    // reusing the production solver: the adversary minimizes a strictly
    // convex quadratic in gamma, the investor maximizes a strictly concave
    // quadratic in h.
    const Eigen::VectorXd lam_p = model.Lambda.transpose() * grad.p;
    const Eigen::VectorXd d = excess_drift(model, t, x);
    const Eigen::MatrixXd SS = model.Sigma * model.Sigma.transpose();
    const auto SS_fact = SS.ldlt();
    auto gamma_response = [&](const Eigen::VectorXd& h) -> Eigen::VectorXd {
        return -theta / (2.0 - theta) * (model.Sigma.transpose() * h + lam_p);
    };
    auto h_response = [&](const Eigen::VectorXd& gamma) -> Eigen::VectorXd {
        const Eigen::VectorXd rhs =
            d + (theta / 2.0) * (model.Sigma * gamma) - (theta / 2.0) * (model.Sigma * lam_p);
        return (2.0 / (theta + 2.0)) * SS_fact.solve(rhs);
    };

    // Dense scan of the investor's block (one- or two-dimensional at desk
    // scale) with the adversary's exact response at each candidate.
    const long per_axis = std::lround(std::floor(2.0 * grid_radius / grid_step)) + 1;
    Eigen::VectorXd best_h = Eigen::VectorXd::Zero(m);
    double best_score = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd cand(m);
    std::vector<long> idx(m, 0);
    while (true) {
        for (int i = 0; i < m; ++i) cand(i) = -grid_radius + idx[i] * grid_step;
        const double score =
            reduced_hamiltonian(model, theta, t, x, grad, ControlPair{cand, gamma_response(cand)});
        if (score > best_score) {
            best_score = score;
            best_h = cand;
        }
        int axis = 0;
        while (axis < m && ++idx[axis] >= per_axis) idx[axis++] = 0;
        if (axis == m) break;
    }

    // Refinement: alternate exact best responses to the fixed point.
    Eigen::VectorXd h = best_h;
    Eigen::VectorXd gamma = gamma_response(h);
    constexpr int kMaxIter = 10000;
    constexpr double kTol = 1e-10;
    for (int it = 0; it < kMaxIter; ++it) {
        const Eigen::VectorXd h_next = h_response(gamma);
        const Eigen::VectorXd g_next = gamma_response(h_next);
        const double change = (h_next - h).cwiseAbs().maxCoeff()
                              + (g_next - gamma).cwiseAbs().maxCoeff();
        h = h_next;
        gamma = g_next;
        if (!std::isfinite(change)) break;
        if (change <= kTol) return ControlPair{h, gamma};
    }
    std::ostringstream os;
    os << "alternating best responses did not reach " << kTol << " within " << kMaxIter
       << " iterations (theta = " << theta
       << "; the alternation map is contractive only for theta < sqrt(2))";
    throw NoConvergence(os.str());
}

}  // namespace rsgame
