#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace rsgame {

// Deterministic scalar function of time, either constant or piecewise linear
// between breakpoints.  Outside the breakpoint range the boundary value is
// held constant, so evaluation never extrapolates.
class TimeScalar {
  public:
    // Constant function.
    TimeScalar() : points_{{0.0, 0.0}} {}
    explicit TimeScalar(double constant) : points_{{0.0, constant}} {}

    // Piecewise-linear function through (time, value) breakpoints.
    // Breakpoint times must be strictly increasing and non-empty.
    explicit TimeScalar(std::vector<std::pair<double, double>> breakpoints)
        : points_(std::move(breakpoints)) {
        if (points_.empty())
            throw std::invalid_argument("TimeScalar: at least one breakpoint required");
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i - 1].first < points_[i].first))
                throw std::invalid_argument("TimeScalar: breakpoint times must be strictly increasing");
        }
    }

    double operator()(double t) const {
        if (t <= points_.front().first) return points_.front().second;
        if (t >= points_.back().first) return points_.back().second;
        // points_ has >= 2 entries here and t is interior.
        std::size_t hi = 1;
        while (points_[hi].first < t) ++hi;
        const auto& [t0, v0] = points_[hi - 1];
        const auto& [t1, v1] = points_[hi];
        const double w = (t - t0) / (t1 - t0);
        return v0 + w * (v1 - v0);
    }

    bool is_constant() const { return points_.size() == 1; }
    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

  private:
    std::vector<std::pair<double, double>> points_;
};

}  // namespace rsgame
