#include "rsgame/saddle.hpp"

#include <sstream>
#include <utility>

#include "rsgame/errors.hpp"

namespace rsgame {

double reduced_hamiltonian(const MarketModel& model, double theta, double t,
                           const Eigen::VectorXd& x, const GradientInfo& grad,
                           const ControlPair& c) {
    const Eigen::VectorXd noise_dir = model.Sigma.transpose() * c.h - c.gamma;  // Sigma'h - gamma
    const double drift_term = -(theta / 2.0) * noise_dir.dot(model.Lambda.transpose() * grad.p);
    return drift_term - g_value(model, theta, t, x, c.h, c.gamma);
}

ControlPair solve_inner_saddle(const MarketModel& model, double theta, double t,
                               const Eigen::VectorXd& x, const GradientInfo& grad) {
    const int m = model.m();
    const int k = model.brownian_dim();
    const double th2 = theta / 2.0;

    // Stationarity of H(h, gamma) in both blocks:
    //   dH/dh     = 0:  (th2 + 1) Sigma Sigma' h - th2 Sigma gamma = d - th2 Sigma Lambda' p
    //   dH/dgamma = 0:  th2 Sigma' h + (1 - th2) gamma             = -th2 Lambda' p
    // One dense solve; the matrix is invertible exactly when theta is in (0, 2)
    // and Sigma has full row rank.
    const Eigen::MatrixXd SS = model.Sigma * model.Sigma.transpose();
    const Eigen::VectorXd d = excess_drift(model, t, x);
    const Eigen::VectorXd lam_p = model.Lambda.transpose() * grad.p;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + k, m + k);
    M.topLeftCorner(m, m) = (th2 + 1.0) * SS;
    M.topRightCorner(m, k) = -th2 * model.Sigma;
    M.bottomLeftCorner(k, m) = th2 * model.Sigma.transpose();
    M.bottomRightCorner(k, k) = (1.0 - th2) * Eigen::MatrixXd::Identity(k, k);

    Eigen::VectorXd rhs(m + k);
    rhs.head(m) = d - th2 * (model.Sigma * lam_p);
    rhs.tail(k) = -th2 * lam_p;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << "saddle stationarity system of size " << (m + k)
           << " is numerically singular (theta = " << theta << ")";
        throw SingularSaddleSystem(os.str());
    }
    const Eigen::VectorXd z = lu.solve(rhs);

    ControlPair c;
    c.h = z.head(m);
    c.gamma = z.tail(k);
    return c;
}

Eigen::VectorXd best_response_h(const MarketModel& model, double theta, double t,
                                const Eigen::VectorXd& x, const GradientInfo& grad,
                                const Eigen::VectorXd& gamma) {
    const double th2 = theta / 2.0;
    const Eigen::VectorXd d = excess_drift(model, t, x);
    const Eigen::VectorXd rhs =
        d + th2 * (model.Sigma * gamma) - th2 * (model.Sigma * (model.Lambda.transpose() * grad.p));
    const Eigen::MatrixXd SS = model.Sigma * model.Sigma.transpose();
    return (2.0 / (theta + 2.0)) * SS.ldlt().solve(rhs);
}

FeedbackStrategy::FeedbackStrategy(MarketModel model, double theta, ValueCoefficients coeffs)
    : model_(std::move(model)), theta_(theta), coeffs_(std::move(coeffs)) {}

ControlPair FeedbackStrategy::operator()(double t, const Eigen::VectorXd& x) const {
    const auto snap = coeffs_.at(t);  // throws TimeOutOfRange outside [0, T]
    GradientInfo grad{snap.Q * x + snap.q};
    return solve_inner_saddle(model_, theta_, t, x, grad);
}

FeedbackStrategy feedback_strategy(const MarketModel& model, double theta,
                                   ValueCoefficients coeffs) {
    return FeedbackStrategy(model, theta, std::move(coeffs));
}

}  // namespace rsgame
