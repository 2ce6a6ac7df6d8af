#include "rsgame/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "rsgame/errors.hpp"
#include "rsgame/rng.hpp"

namespace rsgame {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Payload {
    log_excess,   // terminal logF under P
    g_integral,   // Int g dt under the tilted measure
    doleans_log,  // log of the stochastic exponential under P
};

struct StepTable {
    double t;
    double r;
    double alpha;
    AffineControlMap map;
};

int resolve_threads(int requested, long n_paths) {
    int t = requested > 0 ? requested
                          : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    return static_cast<int>(std::min<long>(t, std::max<long>(1, n_paths)));
}

// Simulates paths [begin, end) into out[begin..end).  Everything indexed per
// path; no shared mutable state beyond disjoint output slots.
void run_chunk(const MarketModel& model, const GameSpec& spec, const std::vector<StepTable>& steps,
               double dt, std::uint64_t seed, Measure measure, Payload payload, long begin,
               long end, std::vector<double>& out) {
    const int n = model.n();
    const int m = model.m();
    const int k = model.brownian_dim();
    const double theta = spec.theta;
    const double sqrt_dt = std::sqrt(dt);
    const Eigen::MatrixXd SigmaT = model.Sigma.transpose();  // k x m

    Eigen::VectorXd x(n), h(m), gam(k), sth(k), noise(k), dW(k), xdrift(n);
    for (long path = begin; path < end; ++path) {
        NormalStream rng(seed, static_cast<std::uint64_t>(path));
        x = spec.x0;
        double acc = payload == Payload::log_excess ? spec.log_excess0() : 0.0;

        for (const StepTable& s : steps) {
            h.noalias() = s.map.h0 + s.map.H * x;
            gam.noalias() = s.map.g0 + s.map.G * x;
            sth.noalias() = SigmaT * h;
            noise = sth - gam;
            for (int j = 0; j < k; ++j) dW(j) = sqrt_dt * rng.next();

            switch (payload) {
                case Payload::log_excess: {
                    const double hd = h.dot(model.a) + h.dot(model.A * x) - s.r * h.sum();
                    const double drift = s.r + hd - (s.alpha + model.beta.dot(x))
                                         - 0.5 * sth.squaredNorm() + 0.5 * gam.squaredNorm();
                    acc += drift * dt + noise.dot(dW);
                    break;
                }
                case Payload::g_integral: {
                    const double hd = h.dot(model.a) + h.dot(model.A * x) - s.r * h.sum();
                    const double g = 0.5 * (theta / 2.0 + 1.0) * sth.squaredNorm() - s.r - hd
                                     + (s.alpha + model.beta.dot(x)) - (theta / 2.0) * sth.dot(gam)
                                     + 0.5 * (theta / 2.0 - 1.0) * gam.squaredNorm();
                    acc += g * dt;
                    break;
                }
                case Payload::doleans_log: {
                    acc += (theta / 2.0) * noise.dot(dW)
                           - (theta * theta / 8.0) * noise.squaredNorm() * dt;
                    break;
                }
            }

            xdrift.noalias() = model.b + model.B * x;
            if (measure == Measure::changed)
                xdrift.noalias() -= (theta / 2.0) * (model.Lambda * noise);
            x.noalias() += xdrift * dt;
            x.noalias() += model.Lambda * dW;
        }

        out[path] = (std::isfinite(acc) && x.allFinite()) ? acc : kNaN;
    }
}

PathBundle run_paths(const MarketModel& model, const GameSpec& spec, const Strategy& strategy,
                     const SimConfig& config, Measure measure, Payload payload) {
    if (config.n_paths < 1 || config.n_steps < 1)
        throw std::invalid_argument("simulate: n_paths and n_steps must be positive");
    const long long work = static_cast<long long>(config.n_paths) * config.n_steps;
    if (work > config.budget) {
        std::ostringstream os;
        os << "simulation of " << config.n_paths << " paths x " << config.n_steps
           << " steps = " << work << " path-steps exceeds budget " << config.budget;
        throw BudgetExceeded(os.str());
    }

    const double dt = spec.horizon / config.n_steps;
    std::vector<StepTable> steps(config.n_steps);
    for (int j = 0; j < config.n_steps; ++j) {
        const double t = j * dt;
        steps[j] = {t, model.r(t), model.alpha(t), strategy.prepare(t, model.n())};
    }

    PathBundle bundle;
    bundle.measure = measure;
    bundle.dt = dt;
    bundle.n_steps = config.n_steps;
    bundle.n_paths = config.n_paths;
    bundle.seed = config.seed;
    bundle.terminal.assign(config.n_paths, kNaN);

    const int n_threads = resolve_threads(config.n_threads, config.n_paths);
    if (n_threads <= 1) {
        run_chunk(model, spec, steps, dt, config.seed, measure, payload, 0, config.n_paths,
                  bundle.terminal);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (config.n_paths + n_threads - 1) / n_threads;
        for (int w = 0; w < n_threads; ++w) {
            const long begin = w * chunk;
            const long end = std::min<long>(begin + chunk, config.n_paths);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                run_chunk(model, spec, steps, dt, config.seed, measure, payload, begin, end,
                          bundle.terminal);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (double v : bundle.terminal)
        if (!std::isfinite(v)) ++bundle.n_excluded;
    if (bundle.n_excluded > config.exclusion_cap * static_cast<double>(config.n_paths)) {
        std::ostringstream os;
        os << bundle.n_excluded << " of " << config.n_paths
           << " paths went non-finite, above the exclusion cap of " << config.exclusion_cap
           << " (controls or dynamics are blowing up)";
        throw NonFinitePath(os.str());
    }
    return bundle;
}

struct MeanVar {
    double mean = 0.0;
    double sd = 0.0;
    long n = 0;
};

// Mean and (unbiased) standard deviation over the finite entries of `f(v)`.
template <typename F>
MeanVar reduce_finite(const std::vector<double>& values, F&& f) {
    MeanVar mv;
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        sum += f(v);
        ++mv.n;
    }
    if (mv.n == 0) return mv;
    mv.mean = sum / mv.n;
    double ss = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        const double dev = f(v) - mv.mean;
        ss += dev * dev;
    }
    mv.sd = mv.n > 1 ? std::sqrt(ss / (mv.n - 1)) : 0.0;
    return mv;
}

std::string format_magnitude(const char* prefix, double mag) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%+g", prefix, mag);
    return buf;
}

}  // namespace

Strategy Strategy::constant(ControlPair c) {
    Strategy s;
    s.offset_ = std::move(c);
    return s;
}

Strategy Strategy::saddle_feedback(const MarketModel& model, double theta,
                                   ValueCoefficients coeffs) {
    Strategy s;
    s.feedback_ = std::make_shared<FeedbackStrategy>(model, theta, std::move(coeffs));
    s.offset_.h = Eigen::VectorXd::Zero(model.m());
    s.offset_.gamma = Eigen::VectorXd::Zero(model.brownian_dim());
    return s;
}

Strategy Strategy::shifted(const ControlPair& delta) const {
    Strategy s = *this;
    s.offset_.h += delta.h;
    s.offset_.gamma += delta.gamma;
    return s;
}

ControlPair Strategy::at(double t, const Eigen::VectorXd& x) const {
    if (!feedback_) return offset_;
    ControlPair c = (*feedback_)(t, x);
    c.h += offset_.h;
    c.gamma += offset_.gamma;
    return c;
}

AffineControlMap Strategy::prepare(double t, int n_factors) const {
    AffineControlMap map;
    if (!feedback_) {
        map.h0 = offset_.h;
        map.g0 = offset_.gamma;
        map.H = Eigen::MatrixXd::Zero(offset_.h.size(), n_factors);
        map.G = Eigen::MatrixXd::Zero(offset_.gamma.size(), n_factors);
        return map;
    }
    // The saddle solution is affine in the gradient p, and p = Q_t x + q_t is
    // affine in x, so n_factors + 1 exact solves recover the whole map.
    const ControlPair c0 = at(t, Eigen::VectorXd::Zero(n_factors));
    map.h0 = c0.h;
    map.g0 = c0.gamma;
    map.H = Eigen::MatrixXd(c0.h.size(), n_factors);
    map.G = Eigen::MatrixXd(c0.gamma.size(), n_factors);
    for (int i = 0; i < n_factors; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_factors);
        e(i) = 1.0;
        const ControlPair ci = at(t, e);
        map.H.col(i) = ci.h - c0.h;
        map.G.col(i) = ci.gamma - c0.gamma;
    }
    return map;
}

PathBundle simulate(const MarketModel& model, const GameSpec& spec, const Strategy& strategy,
                    const SimConfig& config, Measure measure) {
    return run_paths(model, spec, strategy, config, measure,
                     measure == Measure::physical ? Payload::log_excess : Payload::g_integral);
}

Estimate estimate_J(const PathBundle& bundle, double theta) {
    if (bundle.measure != Measure::physical)
        throw std::invalid_argument(
            "estimate_J needs a physical-measure bundle (terminal logF); the changed-measure "
            "functional is estimated by estimate_I_changed_measure");
    const MeanVar mv =
        reduce_finite(bundle.terminal, [&](double f) { return std::exp(-(theta / 2.0) * f); });
    if (mv.n == 0) throw DegenerateSample("estimate_J: every path was excluded");
    if (!(mv.mean > 0.0) || !std::isfinite(mv.mean))
        throw DegenerateSample("estimate_J: sample mean of exp(-(theta/2) logF) is not finite");
    Estimate est;
    est.n_paths = mv.n;
    est.mean = -(2.0 / theta) * std::log(mv.mean);
    est.std_error = (2.0 / theta) * mv.sd / (std::sqrt(static_cast<double>(mv.n)) * mv.mean);
    return est;
}

Estimate estimate_I_changed_measure(const MarketModel& model, const GameSpec& spec,
                                    const Strategy& strategy, const SimConfig& config) {
    const PathBundle bundle =
        run_paths(model, spec, strategy, config, Measure::changed, Payload::g_integral);
    const double theta = spec.theta;
    const MeanVar mv =
        reduce_finite(bundle.terminal, [&](double g) { return std::exp((theta / 2.0) * g); });
    if (mv.n == 0) throw DegenerateSample("estimate_I: every path was excluded");
    if (!(mv.mean > 0.0) || !std::isfinite(mv.mean))
        throw DegenerateSample("estimate_I: sample mean of exp((theta/2) Int g) is not finite");
    Estimate est;
    est.n_paths = mv.n;
    est.mean = spec.log_excess0() - (2.0 / theta) * std::log(mv.mean);
    est.std_error = (2.0 / theta) * mv.sd / (std::sqrt(static_cast<double>(mv.n)) * mv.mean);
    return est;
}

Estimate doleans_mean_check(const MarketModel& model, const GameSpec& spec,
                            const Strategy& strategy, const SimConfig& config) {
    const PathBundle bundle =
        run_paths(model, spec, strategy, config, Measure::physical, Payload::doleans_log);
    const MeanVar mv = reduce_finite(bundle.terminal, [](double d) { return std::exp(d); });
    if (mv.n == 0) throw DegenerateSample("doleans_mean_check: every path was excluded");
    Estimate est;
    est.n_paths = mv.n;
    est.mean = mv.mean;
    est.std_error = mv.sd / std::sqrt(static_cast<double>(mv.n));
    return est;
}

std::vector<TournamentRow> saddle_tournament(const MarketModel& model, const GameSpec& spec,
                                             const ValueCoefficients& coeffs,
                                             const PerturbationSpec& pert,
                                             const SimConfig& config) {
    const int m = model.m();
    const int k = model.brownian_dim();
    const double theta = spec.theta;
    const Strategy base = Strategy::saddle_feedback(model, theta, coeffs);

    struct Entry {
        TournamentRow row;
        PathBundle bundle;
        bool is_h_side;
        bool is_base;
    };
    std::vector<Entry> entries;
    entries.push_back({{"saddle", 0, 0, 0, 0, true}, simulate(model, spec, base, config, Measure::physical),
                       false, true});

    const Eigen::VectorXd h_dir = Eigen::VectorXd::Ones(m) / std::sqrt(double(m));
    const Eigen::VectorXd g_dir = Eigen::VectorXd::Ones(k) / std::sqrt(double(k));
    for (double mag : pert.h_magnitudes) {
        ControlPair delta{mag * h_dir, Eigen::VectorXd::Zero(k)};
        entries.push_back({{format_magnitude("h", mag), 0, 0, 0, 0, true},
                           simulate(model, spec, base.shifted(delta), config, Measure::physical),
                           true, false});
    }
    for (double mag : pert.gamma_magnitudes) {
        ControlPair delta{Eigen::VectorXd::Zero(m), mag * g_dir};
        entries.push_back({{format_magnitude("gamma", mag), 0, 0, 0, 0, true},
                           simulate(model, spec, base.shifted(delta), config, Measure::physical),
                           false, false});
    }

    const std::vector<double>& base_terminal = entries.front().bundle.terminal;
    for (auto& e : entries) {
        const Estimate own = estimate_J(e.bundle, theta);
        e.row.J = own.mean;
        e.row.std_error = own.std_error;
        if (e.is_base) continue;

        // CRN-paired difference over paths finite in both bundles.
        double sum_a = 0.0, sum_b = 0.0;
        long n = 0;
        const std::vector<double>& term = e.bundle.terminal;
        for (long i = 0; i < e.bundle.n_paths; ++i) {
            if (!std::isfinite(term[i]) || !std::isfinite(base_terminal[i])) continue;
            sum_a += std::exp(-(theta / 2.0) * term[i]);
            sum_b += std::exp(-(theta / 2.0) * base_terminal[i]);
            ++n;
        }
        if (n == 0) throw DegenerateSample("saddle_tournament: no common finite paths");
        const double mu_a = sum_a / n, mu_b = sum_b / n;
        double ss = 0.0;
        for (long i = 0; i < e.bundle.n_paths; ++i) {
            if (!std::isfinite(term[i]) || !std::isfinite(base_terminal[i])) continue;
            const double z = std::exp(-(theta / 2.0) * term[i]) / mu_a
                             - std::exp(-(theta / 2.0) * base_terminal[i]) / mu_b;
            ss += z * z;  // z has mean 0 by construction
        }
        const double sd_z = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        e.row.diff_vs_saddle = -(2.0 / theta) * (std::log(mu_a) - std::log(mu_b));
        e.row.stderr_diff = (2.0 / theta) * sd_z / std::sqrt(static_cast<double>(n));
        e.row.within_bound = e.is_h_side
                                 ? e.row.diff_vs_saddle <= 3.0 * e.row.stderr_diff
                                 : e.row.diff_vs_saddle >= -3.0 * e.row.stderr_diff;
    }

    std::vector<TournamentRow> rows;
    rows.reserve(entries.size());
    for (auto& e : entries) rows.push_back(std::move(e.row));
    return rows;
}

}  // namespace rsgame
