#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rsgame/model.hpp"
#include "rsgame/saddle.hpp"
#include "rsgame/value_coefficients.hpp"

namespace rsgame {

enum class Measure { physical, changed };

// Controls at one fixed time as an exact affine map of the factor level:
// h = h0 + H x, gamma = g0 + G x.  Every strategy in this project is affine
// in x (constant pairs, and saddle feedback, which is a linear solve against
// a gradient affine in x), so the simulation engine tabulates one map per
// Euler step and path loops reduce to small matrix-vector products.
struct AffineControlMap {
    Eigen::VectorXd h0;
    Eigen::MatrixXd H;
    Eigen::VectorXd g0;
    Eigen::MatrixXd G;
};

// A simulatable strategy: a constant pair, the saddle feedback induced by
// solved value coefficients, or the latter shifted by a constant offset
// (used by the tournament).  Immutable and cheap to copy.
class Strategy {
  public:
    static Strategy constant(ControlPair c);
    static Strategy saddle_feedback(const MarketModel& model, double theta,
                                    ValueCoefficients coeffs);
    // Same strategy with a constant control offset added on top.
    Strategy shifted(const ControlPair& delta) const;

    ControlPair at(double t, const Eigen::VectorXd& x) const;
    AffineControlMap prepare(double t, int n_factors) const;

  private:
    Strategy() = default;
    std::shared_ptr<const FeedbackStrategy> feedback_;  // null for constant strategies
    ControlPair offset_;                                // the pair itself when constant
};

struct SimConfig {
    long n_paths = 10000;
    int n_steps = 250;
    std::uint64_t seed = 12345;
    int n_threads = 0;                      // 0 = auto
    long long budget = 2'000'000'000;       // cap on n_paths * n_steps
    double exclusion_cap = 1e-3;            // max tolerated fraction of non-finite paths
};

// One Monte Carlo run.  `terminal` has one slot per path, in path order;
// a non-finite path is excluded and its slot holds NaN so that bundles from
// common-random-number runs stay aligned path by path.  Under the physical
// measure the per-path value is terminal log-excess logF(T); under the
// changed measure it is the accumulated integral of g along the path (logF
// is not evolved there).
struct PathBundle {
    Measure measure = Measure::physical;
    double dt = 0.0;
    int n_steps = 0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    long n_excluded = 0;
    std::vector<double> terminal;
};

// Euler-Maruyama on (X, logF) under P, or on X alone with the g-integral
// under the tilted measure.  Noise comes from counter-based per-path streams,
// so results are bit-identical for a given (seed, n_paths, n_steps) under any
// thread count.  Throws BudgetExceeded up front and NonFinitePath when the
// excluded fraction exceeds the cap.
PathBundle simulate(const MarketModel& model, const GameSpec& spec, const Strategy& strategy,
                    const SimConfig& config, Measure measure);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double confidence_multiplier = 3.0;
};

// J = -(2/theta) log mean(exp(-(theta/2) logF)) with delta-method stderr.
// Requires a physical-measure bundle; throws DegenerateSample when no path
// survives.
Estimate estimate_J(const PathBundle& bundle, double theta);

// I = log f - (2/theta) log E^{h,gamma}[exp((theta/2) Int g dt)], estimated by
// simulating X under the tilted drift and accumulating g by left-point
// quadrature.  Equal to J in distribution; the agreement is a measure-change
// consistency check.
Estimate estimate_I_changed_measure(const MarketModel& model, const GameSpec& spec,
                                    const Strategy& strategy, const SimConfig& config);

// Sample mean of the stochastic exponential of (theta/2) Int (h'Sigma -
// gamma') dW under P.  A valid measure change requires mean 1; the discrete
// exponential-Euler product has exactly unit expectation, so any trend away
// from 1 at scale is statistical or signals inadmissible controls.
Estimate doleans_mean_check(const MarketModel& model, const GameSpec& spec,
                            const Strategy& strategy, const SimConfig& config);

struct PerturbationSpec {
    std::vector<double> h_magnitudes;      // offsets along ones(m)/sqrt(m)
    std::vector<double> gamma_magnitudes;  // offsets along ones(n+m)/sqrt(n+m)
};

struct TournamentRow {
    std::string label;      // "saddle", "h+0.5", "gamma+0.1", ...
    double J = 0.0;
    double std_error = 0.0;
    double diff_vs_saddle = 0.0;  // J(row) - J(saddle), from CRN-paired paths
    double stderr_diff = 0.0;     // paired delta-method stderr of that difference
    bool within_bound = true;     // h rows: diff <= 3 sd; gamma rows: diff >= -3 sd
};

// Simulates the saddle feedback and its unilateral perturbations with common
// random numbers and reports the estimated ordering
//   J(h-perturbed) <= J(saddle) <= J(gamma-perturbed)
// up to 3 paired standard errors.
std::vector<TournamentRow> saddle_tournament(const MarketModel& model, const GameSpec& spec,
                                             const ValueCoefficients& coeffs,
                                             const PerturbationSpec& pert,
                                             const SimConfig& config);

}  // namespace rsgame
