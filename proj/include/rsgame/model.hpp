#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rsgame/time_scalar.hpp"

namespace rsgame {

// Market primitives for the benchmarked investment game.
//
// m risky assets are driven by an n-dimensional economic factor X and a
// (n + m)-dimensional Brownian motion W:
//
//   asset i:   dS_i/S_i = (a + A X_t)_i dt + (Sigma dW_t)_i
//   factor:    dX = (b + B X_t) dt + Lambda dW_t
//   benchmark: dL/L = (alpha(t) + beta X_t) dt + gamma' dW   (gamma chosen adversarially)
//   cash:      dS_0/S_0 = r(t) dt
//
// The benchmark-relative log wealth F = log(V/L) under investment fractions
// h and adversarial benchmark tilt gamma then satisfies
//
//   dF = [ r + h'd - (alpha + beta X) - 1/2 h'Sigma Sigma'h + 1/2 gamma'gamma ] dt
//        + (h'Sigma - gamma') dW,           d(t, x) = a + A x - r(t) 1.
struct MarketModel {
    Eigen::VectorXd a;       // m      baseline asset drift
    Eigen::MatrixXd A;       // m x n  factor loading of asset drift
    Eigen::VectorXd b;       // n      baseline factor drift
    Eigen::MatrixXd B;       // n x n  factor mean-reversion matrix
    Eigen::MatrixXd Sigma;   // m x (n+m)  asset volatility (full row rank)
    Eigen::MatrixXd Lambda;  // n x (n+m)  factor volatility
    TimeScalar r;            // riskless rate
    TimeScalar alpha;        // baseline benchmark drift
    Eigen::RowVectorXd beta; // 1 x n  factor loading of benchmark drift

    int m() const { return static_cast<int>(a.size()); }
    int n() const { return static_cast<int>(b.size()); }
    int brownian_dim() const { return n() + m(); }
};

// Game-level quantities: risk-sensitivity, horizon, and initial data.
struct GameSpec {
    double theta = 1.0;  // risk sensitivity, valid range (0, 2)
    double horizon = 1.0;
    Eigen::VectorXd x0;  // n  initial factor level
    double v0 = 1.0;     // initial wealth, > 0
    double l0 = 1.0;     // initial benchmark level, > 0

    double log_excess0() const { return std::log(v0 / l0); }
};

enum class IssueKind {
    DimensionMismatch,
    RankDeficientSigma,
    ThetaOutOfRange,
    NonpositiveInitialState,
    UncorrelatedFactorNoise,  // warning: Sigma Lambda' == 0, game decouples
};

struct ValidationIssue {
    IssueKind kind;
    std::string field;    // offending field name, e.g. "Sigma"
    std::string message;  // human-readable description with offending values
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    bool ok() const { return errors.empty(); }
};

struct ValidationOptions {
    double rank_tol = 1e-10;    // singular-value cutoff for the Sigma rank test
    double theta_margin = 1e-3; // enforced distance from the endpoints of (0, 2)
};

const char* issue_kind_name(IssueKind kind);

// Structural checks; never throws on bad input — collects every problem found.
ValidationReport validate(const MarketModel& model, const GameSpec& spec,
                          const ValidationOptions& opts = {});

// d(t, x) = a + A x - r(t) 1, the asset drift in excess of cash.
Eigen::VectorXd excess_drift(const MarketModel& model, double t, const Eigen::VectorXd& x);

// Running penalty g of the equivalent risk-neutral control representation:
//
//   g = 1/2 (theta/2 + 1) h'Sigma Sigma'h - r - h'd + (alpha + beta x)
//       - (theta/2) h'Sigma gamma + 1/2 (theta/2 - 1) gamma'gamma.
//
// Identity tying g to the F-dynamics, for any (h, gamma):
//   (theta/2) g == -(theta/2) [drift of F] + (theta^2/8) |h'Sigma - gamma'|^2.
double g_value(const MarketModel& model, double theta, double t, const Eigen::VectorXd& x,
               const Eigen::VectorXd& h, const Eigen::VectorXd& gamma);

}  // namespace rsgame
