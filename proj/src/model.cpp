#include "rsgame/model.hpp"

#include <Eigen/SVD>
#include <sstream>

namespace rsgame {

namespace {

void check_dims(const MarketModel& model, const GameSpec& spec, ValidationReport& rep) {
    const int m = model.m();
    const int n = model.n();
    const int k = n + m;
    auto bad = [&](const std::string& field, const std::string& msg) {
        rep.errors.push_back({IssueKind::DimensionMismatch, field, msg});
    };
    auto expect = [&](const std::string& field, long rows, long cols, long er, long ec) {
        if (rows != er || cols != ec) {
            std::ostringstream os;
            os << field << " has shape " << rows << "x" << cols << ", expected " << er << "x" << ec
               << " for m=" << m << ", n=" << n;
            bad(field, os.str());
        }
    };
    if (m < 1) bad("a", "at least one risky asset required (a is empty)");
    if (n < 1) bad("b", "at least one factor required (b is empty)");
    expect("A", model.A.rows(), model.A.cols(), m, n);
    expect("B", model.B.rows(), model.B.cols(), n, n);
    expect("Sigma", model.Sigma.rows(), model.Sigma.cols(), m, k);
    expect("Lambda", model.Lambda.rows(), model.Lambda.cols(), n, k);
    expect("beta", model.beta.rows(), model.beta.cols(), 1, n);
    expect("x0", spec.x0.size(), 1, n, 1);
}

}  // namespace

const char* issue_kind_name(IssueKind kind) {
    switch (kind) {
        case IssueKind::DimensionMismatch: return "DimensionMismatch";
        case IssueKind::RankDeficientSigma: return "RankDeficientSigma";
        case IssueKind::ThetaOutOfRange: return "ThetaOutOfRange";
        case IssueKind::NonpositiveInitialState: return "NonpositiveInitialState";
        case IssueKind::UncorrelatedFactorNoise: return "UncorrelatedFactorNoise";
    }
    return "Unknown";
}

ValidationReport validate(const MarketModel& model, const GameSpec& spec,
                          const ValidationOptions& opts) {
    ValidationReport rep;
    check_dims(model, spec, rep);

    const double lo = opts.theta_margin;
    const double hi = 2.0 - opts.theta_margin;
    if (!(spec.theta >= lo && spec.theta <= hi)) {
        std::ostringstream os;
        os << "theta = " << spec.theta << " outside [" << lo << ", " << hi
           << "]; the saddle is well posed only for theta in (0, 2)";
        rep.errors.push_back({IssueKind::ThetaOutOfRange, "theta", os.str()});
    }
    if (!(spec.horizon > 0.0)) {
        rep.errors.push_back({IssueKind::NonpositiveInitialState, "T",
                              "horizon T must be positive"});
    }
    if (!(spec.v0 > 0.0)) {
        rep.errors.push_back({IssueKind::NonpositiveInitialState, "v0",
                              "initial wealth v0 must be positive (log V is undefined otherwise)"});
    }
    if (!(spec.l0 > 0.0)) {
        rep.errors.push_back({IssueKind::NonpositiveInitialState, "l0",
                              "initial benchmark l0 must be positive"});
    }

    // Rank and coupling tests only make sense when the shapes line up.
    if (rep.errors.empty()) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(model.Sigma);
        const auto& sv = svd.singularValues();
        const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
        if (!(smin > opts.rank_tol)) {
            std::ostringstream os;
            os << "Sigma has smallest singular value " << smin << " <= " << opts.rank_tol
               << "; Sigma Sigma' must be invertible";
            rep.errors.push_back({IssueKind::RankDeficientSigma, "Sigma", os.str()});
        }
        const double coupling = (model.Sigma * model.Lambda.transpose()).cwiseAbs().maxCoeff();
        if (coupling == 0.0) {
            rep.warnings.push_back(
                {IssueKind::UncorrelatedFactorNoise, "Sigma",
                 "Sigma Lambda' vanishes: asset and factor noise are uncorrelated, so the "
                 "value gradient never feeds back into the optimal strategies"});
        }
    }
    return rep;
}

Eigen::VectorXd excess_drift(const MarketModel& model, double t, const Eigen::VectorXd& x) {
    return model.a + model.A * x - Eigen::VectorXd::Constant(model.m(), model.r(t));
}

double g_value(const MarketModel& model, double theta, double t, const Eigen::VectorXd& x,
               const Eigen::VectorXd& h, const Eigen::VectorXd& gamma) {
    const Eigen::VectorXd d = excess_drift(model, t, x);
    const Eigen::VectorXd sth = model.Sigma.transpose() * h;  // Sigma'h in noise space
    const double quad_h = 0.5 * (theta / 2.0 + 1.0) * sth.squaredNorm();
    const double cross = (theta / 2.0) * sth.dot(gamma);
    const double quad_g = 0.5 * (theta / 2.0 - 1.0) * gamma.squaredNorm();
    return quad_h - model.r(t) - h.dot(d) + (model.alpha(t) + model.beta.dot(x)) - cross + quad_g;
}

}  // namespace rsgame
