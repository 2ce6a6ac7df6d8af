#include "rsgame/value_coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rsgame/errors.hpp"

namespace rsgame {

namespace {

// Largest index j with grid[j] <= t (clamped so j+1 is valid).
std::size_t lower_node(const std::vector<double>& grid, double t) {
    std::size_t lo = 0, hi = grid.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (grid[mid] <= t ? lo : hi) = mid;
    }
    return lo;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ValueCoefficients::Snapshot ValueCoefficients::at(double t) const {
    if (grid.empty()) throw TimeOutOfRange("ValueCoefficients::at: empty grid");
    const double t0 = grid.front();
    const double t1 = grid.back();
    const double slack = 1e-12 * std::max(1.0, std::abs(t1));
    if (t < t0 - slack || t > t1 + slack) {
        std::ostringstream os;
        os << "time " << t << " outside coefficient span [" << t0 << ", " << t1 << "]";
        throw TimeOutOfRange(os.str());
    }
    const double tc = std::min(std::max(t, t0), t1);
    const std::size_t j = lower_node(grid, tc);
    const double dt = grid[j + 1] - grid[j];
    const double w = dt > 0.0 ? (tc - grid[j]) / dt : 0.0;
    Snapshot s;
    s.Q = (1.0 - w) * Q[j] + w * Q[j + 1];
    s.q = (1.0 - w) * q[j] + w * q[j + 1];
    s.k = (1.0 - w) * k[j] + w * k[j + 1];
    return s;
}

ValueEval value_and_gradient(const ValueCoefficients& coeffs, double t, const Eigen::VectorXd& x) {
    const auto s = coeffs.at(t);
    ValueEval ev;
    ev.u = 0.5 * x.dot(s.Q * x) + s.q.dot(x) + s.k;
    ev.Du = s.Q * x + s.q;
    ev.D2u = s.Q;
    return ev;
}

void write_csv(const ValueCoefficients& coeffs, std::ostream& out) {
    const int n = coeffs.Q.empty() ? 0 : static_cast<int>(coeffs.Q.front().rows());
    out << "t";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out << ",Q_" << i << "_" << j;
    for (int i = 0; i < n; ++i) out << ",q_" << i;
    out << ",k\n";
    for (int node = 0; node < coeffs.n_nodes(); ++node) {
        out << format17(coeffs.grid[node]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out << "," << format17(coeffs.Q[node](i, j));
        for (int i = 0; i < n; ++i) out << "," << format17(coeffs.q[node](i));
        out << "," << format17(coeffs.k[node]) << "\n";
    }
}

ValueCoefficients read_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("coefficients CSV: missing header");
    // Infer n from the column count: 1 + n^2 + n + 1 columns.
    long n_cols = 1;
    for (char c : header)
        if (c == ',') ++n_cols;
    long n = -1;
    for (long cand = 0; cand * cand + cand + 2 <= n_cols; ++cand)
        if (cand * cand + cand + 2 == n_cols) n = cand;
    if (n < 0) throw std::runtime_error("coefficients CSV: unexpected column count");

    ValueCoefficients coeffs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<long>(row.size()) != n_cols)
            throw std::runtime_error("coefficients CSV: ragged row");
        std::size_t at = 0;
        coeffs.grid.push_back(row[at++]);
        Eigen::MatrixXd Q(n, n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) Q(i, j) = row[at++];
        Eigen::VectorXd q(n);
        for (long i = 0; i < n; ++i) q(i) = row[at++];
        coeffs.Q.push_back(std::move(Q));
        coeffs.q.push_back(std::move(q));
        coeffs.k.push_back(row[at++]);
    }
    if (coeffs.grid.size() < 2) throw std::runtime_error("coefficients CSV: need at least two nodes");
    return coeffs;
}

}  // namespace rsgame
