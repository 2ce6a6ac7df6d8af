#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace rsgame {

// Time-indexed coefficients of the quadratic value function
//   u(t, x) = 1/2 x'Q_t x + q_t'x + k_t
// stored at N+1 ascending grid times spanning [0, T].  Between nodes every
// entry is interpolated linearly in t.
struct ValueCoefficients {
    std::vector<double> grid;           // ascending, grid.front() = 0, grid.back() = T
    std::vector<Eigen::MatrixXd> Q;     // per node, n x n symmetric
    std::vector<Eigen::VectorXd> q;     // per node, n
    std::vector<double> k;              // per node

    int n_nodes() const { return static_cast<int>(grid.size()); }
    double horizon() const { return grid.back(); }

    // Linearly interpolated coefficients at time t in [0, T].
    // Throws TimeOutOfRange outside the grid span (tiny rounding slack allowed).
    struct Snapshot {
        Eigen::MatrixXd Q;
        Eigen::VectorXd q;
        double k;
    };
    Snapshot at(double t) const;
};

// u, Du = Q_t x + q_t and D2u = Q_t at interpolated coefficients.
struct ValueEval {
    double u;
    Eigen::VectorXd Du;
    Eigen::MatrixXd D2u;
};
ValueEval value_and_gradient(const ValueCoefficients& coeffs, double t, const Eigen::VectorXd& x);

// CSV round-trip: one row per node, columns t, Q flattened row-major, q, k.
void write_csv(const ValueCoefficients& coeffs, std::ostream& out);
ValueCoefficients read_csv(std::istream& in);

}  // namespace rsgame
