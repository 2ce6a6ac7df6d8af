#pragma once

#include <Eigen/Dense>

#include "rsgame/model.hpp"
#include "rsgame/saddle.hpp"

namespace rsgame {

// Independent reference computations used to certify the solver.  Nothing in
// here shares a solution path with the production code it checks: the moments
// come from a forward linear-Gaussian system, and the saddle oracle uses grid
// search plus alternating per-block best responses instead of the joint
// linear solve.

// Law of the terminal log-excess F(T) for CONSTANT controls: (X, F) is then
// jointly linear-Gaussian, so mean and variance follow exact ODEs.
struct GaussianMoments {
    double mean_F = 0.0;
    double var_F = 0.0;
};

GaussianMoments gaussian_moments_constant_controls(const MarketModel& model, const GameSpec& spec,
                                                   const ControlPair& c, int n_steps = 0);

// J for a Gaussian F: mean_F - (theta/4) var_F, exact by the Gaussian moment
// generating function.
double gaussian_J_constant_controls(const MarketModel& model, const GameSpec& spec,
                                    const ControlPair& c, int n_steps = 0);

// Brute-force saddle at desk scale (m + n + m <= 4): scans the investor's
// control on a dense grid with the adversary's exact response at every
// candidate, then refines by alternating exact best responses until the
// update falls below 1e-10 in sup norm.  Throws NoConvergence after 1e4
// alternations — for theta above sqrt(2) the alternation map is expansive, a
// regime this oracle reports rather than papers over.
ControlPair brute_saddle(const MarketModel& model, double theta, double t,
                         const Eigen::VectorXd& x, const GradientInfo& grad, double grid_radius,
                         double grid_step);

}  // namespace rsgame
