#include "rsgame/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rsgame/value_ode.hpp"

namespace rsgame {

namespace {

// Deterministic standard normals from the pinned mt19937_64 engine.  The
// standard library's normal_distribution has implementation-defined output,
// so the Box-Muller map is spelled out here.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = unit();
        const double u2 = unit();
        const double rho = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = rho * std::sin(ang);
        have_ = true;
        return rho * std::cos(ang);
    }

    Eigen::VectorXd vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = next();
        return v;
    }

    double uniform() { return unit(); }

  private:
    double unit() {  // strictly inside (0, 1)
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

std::vector<Eigen::VectorXd> build_x_points(const MarketModel& model, double T,
                                            const VerifyGridSpec& grid, GaussianSource& rng) {
    const int n = model.n();
    const Eigen::MatrixXd LL = model.Lambda * model.Lambda.transpose();
    Eigen::VectorXd axis_scale(n);
    for (int i = 0; i < n; ++i) {
        const double s = std::sqrt(std::max(LL(i, i), 0.0) * T);
        axis_scale(i) = grid.x_scale * (s > 0.0 ? s : 1.0);
    }
    std::vector<Eigen::VectorXd> xs;
    xs.push_back(Eigen::VectorXd::Zero(n));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e(i) = axis_scale(i);
        xs.push_back(e);
        xs.push_back(-e);
    }
    for (int j = 0; j < grid.n_random_x; ++j)
        xs.push_back(axis_scale.asDiagonal() * rng.vector(n));
    return xs;
}

}  // namespace

double apply_generator(const ValueCoefficients& coeffs, const MarketModel& model, double theta,
                       double t, const Eigen::VectorXd& x, const ControlPair& c) {
    const auto snap = coeffs.at(t);  // throws TimeOutOfRange
    const StageRhs rhs = stage_rhs(model, theta, t, snap.Q, snap.q, snap.k);
    const double du_dt = 0.5 * x.dot(rhs.dQ * x) + rhs.dq.dot(x) + rhs.dk;

    const Eigen::VectorXd p = snap.Q * x + snap.q;
    const Eigen::VectorXd noise_dir = model.Sigma.transpose() * c.h - c.gamma;
    const Eigen::VectorXd drift = model.b + model.B * x - (theta / 2.0) * (model.Lambda * noise_dir);
    const Eigen::MatrixXd LL = model.Lambda * model.Lambda.transpose();
    return du_dt + drift.dot(p) + 0.5 * (LL * snap.Q).trace() - (theta / 4.0) * p.dot(LL * p)
           - g_value(model, theta, t, x, c.h, c.gamma);
}

VerificationReport isaacs_sign_check(const ValueCoefficients& coeffs, const MarketModel& model,
                                     double theta, const VerifyGridSpec& grid, int n_perturb,
                                     std::uint64_t seed) {
    static constexpr double kMagnitudes[] = {0.01, 0.1, 1.0, 10.0};
    const double T = coeffs.horizon();
    const int m = model.m();
    const int k = model.brownian_dim();

    GaussianSource rng(seed);
    const auto xs = build_x_points(model, T, grid, rng);

    VerificationReport rep;
    rep.seed = seed;
    for (int it = 0; it < grid.n_time; ++it) {
        const double t = grid.n_time == 1 ? 0.0 : T * it / (grid.n_time - 1);
        for (const auto& x : xs) {
            const auto snap = coeffs.at(t);
            const GradientInfo grad{snap.Q * x + snap.q};
            const ControlPair best = solve_inner_saddle(model, theta, t, x, grad);
            const double res = apply_generator(coeffs, model, theta, t, x, best);
            rep.max_saddle_residual =
                std::max(rep.max_saddle_residual, std::abs(res) / (1.0 + x.squaredNorm()));
            ++rep.n_points;
            if (rep.n_perturbations == 0) {
                // delta = 0 must reproduce the saddle residual exactly; seed the
                // extrema with it so they are defined even for n_perturb = 0.
                rep.worst_h_violation = res;
                rep.worst_gamma_violation = res;
            }

            for (int j = 0; j < n_perturb; ++j) {
                const double mag = kMagnitudes[j % 4];
                ControlPair ph = best;
                ph.h += mag * rng.vector(m).normalized();
                rep.worst_h_violation =
                    std::max(rep.worst_h_violation, apply_generator(coeffs, model, theta, t, x, ph));

                ControlPair pg = best;
                pg.gamma += mag * rng.vector(k).normalized();
                rep.worst_gamma_violation = std::min(rep.worst_gamma_violation,
                                                     apply_generator(coeffs, model, theta, t, x, pg));
                rep.n_perturbations += 2;
            }
        }
    }
    return rep;
}

FdConsistencyReport fd_consistency_check(const ValueCoefficients& coeffs, const MarketModel& model,
                                         double theta, int n_points, std::uint64_t seed) {
    const double T = coeffs.horizon();
    const int n = model.n();
    const int n_nodes = coeffs.n_nodes();

    GaussianSource rng(seed);
    FdConsistencyReport rep;
    rep.seed = seed;

    auto u_at = [&](double t, const Eigen::VectorXd& x) {
        return value_and_gradient(coeffs, t, x).u;
    };

    auto check_spatial = [&](double t, const Eigen::VectorXd& x) {
        const auto ev = value_and_gradient(coeffs, t, x);
        Eigen::VectorXd fd(n);
        for (int i = 0; i < n; ++i) {
            const double step = 1e-3 * std::max(1.0, std::abs(x(i)));
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            fd(i) = (u_at(t, xp) - u_at(t, xm)) / (2.0 * step);
        }
        const double err = (fd - ev.Du).norm() / std::max(1.0, ev.Du.norm());
        rep.max_rel_err_space = std::max(rep.max_rel_err_space, err);
    };

    // Analytic du/dt at a node time vs the O(dt^2) central difference of node
    // values (one-sided at t = T, compared at the half-step midpoint).
    auto analytic_du_dt = [&](double t, const Eigen::VectorXd& x) {
        const auto snap = coeffs.at(t);
        const StageRhs rhs = stage_rhs(model, theta, t, snap.Q, snap.q, snap.k);
        return 0.5 * x.dot(rhs.dQ * x) + rhs.dq.dot(x) + rhs.dk;
    };

    auto check_time = [&](int node, const Eigen::VectorXd& x) {
        double fd, ref;
        if (node == n_nodes - 1) {
            const double t1 = coeffs.grid[node], t0 = coeffs.grid[node - 1];
            fd = (u_at(t1, x) - u_at(t0, x)) / (t1 - t0);
            ref = analytic_du_dt(0.5 * (t0 + t1), x);
        } else {
            const double tp = coeffs.grid[node + 1], tm = coeffs.grid[node - 1];
            fd = (u_at(tp, x) - u_at(tm, x)) / (tp - tm);
            ref = analytic_du_dt(coeffs.grid[node], x);
        }
        const double err = std::abs(fd - ref) / std::max(1.0, std::abs(ref));
        rep.max_rel_err_time = std::max(rep.max_rel_err_time, err);
    };

    // Always exercise the endpoints: x = 0 at t = 0 and the t = T boundary.
    check_spatial(0.0, Eigen::VectorXd::Zero(n));
    check_time(n_nodes - 1, Eigen::VectorXd::Zero(n));
    rep.n_points = 2;

    for (int j = 0; j < n_points; ++j) {
        const Eigen::VectorXd x = rng.vector(n);
        check_spatial(std::min(T * rng.uniform(), T), x);
        if (n_nodes >= 3) {
            const int node = 1 + static_cast<int>(rng.uniform() * (n_nodes - 2));
            check_time(std::clamp(node, 1, n_nodes - 2), x);
        } else {
            check_time(n_nodes - 1, x);
        }
        ++rep.n_points;
    }
    return rep;
}

}  // namespace rsgame
