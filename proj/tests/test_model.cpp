#include <doctest.h>

#include <random>

#include "rsgame/model.hpp"
#include "test_scenarios.hpp"

using namespace rsgame;
using testkit::scalar_model;

namespace {

GameSpec scalar_spec() {
    GameSpec spec;
    spec.theta = 1.0;
    spec.horizon = 1.0;
    spec.x0 = Eigen::VectorXd::Zero(1);
    spec.v0 = 100.0;
    spec.l0 = 100.0;
    return spec;
}

bool has_error(const ValidationReport& rep, IssueKind kind) {
    for (const auto& issue : rep.errors)
        if (issue.kind == kind) return true;
    return false;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("validate accepts the scalar model") {
    const auto rep = validate(scalar_model(), scalar_spec());
    CHECK(rep.ok());
    CHECK(rep.errors.empty());
}

TEST_CASE("validate rejects rank-deficient Sigma") {
    MarketModel mm = scalar_model();
    mm.a = Eigen::VectorXd::Constant(2, 0.05);
    mm.A = Eigen::MatrixXd::Zero(2, 1);
    mm.Sigma = Eigen::MatrixXd(2, 3);
    mm.Sigma << 0.2, 0.1, 0.0,  // two identical rows: rank 1 < m = 2
                0.2, 0.1, 0.0;
    mm.Lambda = Eigen::MatrixXd::Zero(1, 3);
    mm.Lambda(0, 2) = 0.1;
    const auto rep = validate(mm, scalar_spec());
    CHECK_FALSE(rep.ok());
    CHECK(has_error(rep, IssueKind::RankDeficientSigma));
}

TEST_CASE("validate rejects theta at the boundary and outside") {
    for (double theta : {0.0, 2.0, -0.5, 2.5, 1.9995}) {
        GameSpec spec = scalar_spec();
        spec.theta = theta;
        const auto rep = validate(scalar_model(), spec);
        CHECK_FALSE(rep.ok());
        CHECK(has_error(rep, IssueKind::ThetaOutOfRange));
    }
    // Inside the margin it is accepted.
    GameSpec spec = scalar_spec();
    spec.theta = 1.999;
    CHECK(validate(scalar_model(), spec).ok());
}

TEST_CASE("validate rejects nonpositive initial data and horizon") {
    GameSpec spec = scalar_spec();
    spec.v0 = 0.0;
    CHECK(has_error(validate(scalar_model(), spec), IssueKind::NonpositiveInitialState));

    spec = scalar_spec();
    spec.l0 = -1.0;
    CHECK(has_error(validate(scalar_model(), spec), IssueKind::NonpositiveInitialState));

    spec = scalar_spec();
    spec.horizon = 0.0;
    CHECK(has_error(validate(scalar_model(), spec), IssueKind::NonpositiveInitialState));
}

TEST_CASE("validate rejects dimension mismatches") {
    MarketModel mm = scalar_model();
    mm.A = Eigen::MatrixXd::Zero(1, 2);  // n says 1, A says 2
    CHECK(has_error(validate(mm, scalar_spec()), IssueKind::DimensionMismatch));

    mm = scalar_model();
    mm.Sigma = Eigen::MatrixXd::Identity(1, 3);  // brownian dim must be n + m = 2
    CHECK(has_error(validate(mm, scalar_spec()), IssueKind::DimensionMismatch));

    mm = scalar_model();
    GameSpec spec = scalar_spec();
    spec.x0 = Eigen::VectorXd::Zero(2);
    CHECK(has_error(validate(mm, spec), IssueKind::DimensionMismatch));
}

TEST_CASE("validate warns when factor noise is orthogonal to asset noise") {
    // scalar_model has Sigma = [1 0], Lambda = [0 1]: Sigma Lambda' = 0.
    const auto rep = validate(scalar_model(), scalar_spec());
    CHECK(rep.ok());
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].kind == IssueKind::UncorrelatedFactorNoise);

    // The benchmark model has correlated noise: no warning.
    const auto rep2 = validate(testkit::benchmark_model(), testkit::benchmark_spec());
    CHECK(rep2.ok());
    CHECK(rep2.warnings.empty());
}

TEST_CASE("issue kinds have stable names") {
    CHECK(std::string(issue_kind_name(IssueKind::ThetaOutOfRange)) == "ThetaOutOfRange");
    CHECK(std::string(issue_kind_name(IssueKind::RankDeficientSigma)) == "RankDeficientSigma");
}

TEST_CASE("excess drift: hand values") {
    const MarketModel mm = scalar_model();
    // d = a - r = 0.05 - 0.01 at x = 0.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    CHECK(excess_drift(mm, 0.0, x)(0) == doctest::Approx(0.04).epsilon(1e-15));

    // With a factor loading: d = 0.05 + 0.5 * (-0.06) - 0.01 = 0.01.
    MarketModel mm2 = scalar_model();
    mm2.A(0, 0) = 0.5;
    x(0) = -0.06;
    CHECK(excess_drift(mm2, 0.0, x)(0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("excess drift respects a time-varying rate") {
    MarketModel mm = scalar_model();
    mm.r = TimeScalar({{0.0, 0.01}, {1.0, 0.03}});
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    CHECK(excess_drift(mm, 0.0, x)(0) == doctest::Approx(0.04));
    CHECK(excess_drift(mm, 0.5, x)(0) == doctest::Approx(0.03));  // r(0.5) = 0.02
    CHECK(excess_drift(mm, 1.0, x)(0) == doctest::Approx(0.02));
    CHECK(excess_drift(mm, 5.0, x)(0) == doctest::Approx(0.02));  // clamped past the end
}

TEST_CASE("g: zero controls leave only the rate gap") {
    MarketModel mm = scalar_model();
    mm.alpha = TimeScalar(0.02);
    mm.beta(0) = 0.3;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.5);
    const Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd gamma = Eigen::VectorXd::Zero(2);
    // g = -r + alpha + beta x = -0.01 + 0.02 + 0.15.
    CHECK(g_value(mm, 1.0, 0.0, x, h, gamma) == doctest::Approx(0.16).epsilon(1e-14));
}

TEST_CASE("g: pure adversary tilt at zero rates") {
    MarketModel mm = testkit::zero_model();  // a = r = alpha = 0
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd gamma(2);
    gamma << 1.0, 0.0;
    // g = 1/2 (theta/2 - 1) |gamma|^2 = -0.25 for theta = 1.
    CHECK(g_value(mm, 1.0, 0.0, x, h, gamma) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("g: full hand value on the scalar model") {
    const MarketModel mm = scalar_model();
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd h = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd gamma(2);
    gamma << -1.0, 1.0;
    // 0.75 - 0.01 - 0.04 + 0.5 - 0.5 = 0.70 for theta = 1.
    CHECK(g_value(mm, 1.0, 0.0, x, h, gamma) == doctest::Approx(0.70).epsilon(1e-14));
}

TEST_CASE("g is affine in x for fixed controls") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    const auto rs = testkit::random_scenario(404, 2, 3, 1.2);
    const auto& mm = rs.model;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd h = Eigen::VectorXd::NullaryExpr(2, [&] { return normal(rng); });
        const Eigen::VectorXd gamma =
            Eigen::VectorXd::NullaryExpr(5, [&] { return normal(rng); });
        const Eigen::VectorXd x1 = Eigen::VectorXd::NullaryExpr(3, [&] { return normal(rng); });
        const Eigen::VectorXd x2 = Eigen::VectorXd::NullaryExpr(3, [&] { return normal(rng); });
        const double lhs = g_value(mm, 1.2, 0.3, x1 + x2, h, gamma);
        const double rhs = g_value(mm, 1.2, 0.3, x1, h, gamma) +
                           g_value(mm, 1.2, 0.3, x2, h, gamma) -
                           g_value(mm, 1.2, 0.3, Eigen::VectorXd::Zero(3), h, gamma);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("g matches the drift/diffusion identity of the log excess return") {
    // For any (h, gamma):  (theta/2) g == -(theta/2) mu_F + (theta^2/8) |Sigma'h - gamma|^2,
    // where mu_F = r + h'd - (alpha + beta x) - 1/2 h'SS'h + 1/2 |gamma|^2.
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const int n = 1 + static_cast<int>(rng() % 3);
        const double theta = 0.2 + 1.6 * std::uniform_real_distribution<double>()(rng);
        const auto rs = testkit::random_scenario(rng(), m, n, theta);
        const auto& mm = rs.model;
        const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });
        const Eigen::VectorXd h = Eigen::VectorXd::NullaryExpr(m, [&] { return normal(rng); });
        const Eigen::VectorXd gamma =
            Eigen::VectorXd::NullaryExpr(n + m, [&] { return normal(rng); });

        const Eigen::VectorXd d = excess_drift(mm, t, x);
        const double mu_F = mm.r(t) + h.dot(d) - (mm.alpha(t) + mm.beta.dot(x)) -
                            0.5 * h.dot(mm.Sigma * mm.Sigma.transpose() * h) +
                            0.5 * gamma.squaredNorm();
        const Eigen::VectorXd diffusion = mm.Sigma.transpose() * h - gamma;
        const double lhs = (theta / 2.0) * g_value(mm, theta, t, x, h, gamma);
        const double rhs =
            -(theta / 2.0) * mu_F + (theta * theta / 8.0) * diffusion.squaredNorm();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("time scalar: constant and piecewise linear") {
    const TimeScalar c(0.25);
    CHECK(c.is_constant());
    CHECK(c(-3.0) == 0.25);
    CHECK(c(10.0) == 0.25);

    const TimeScalar pw({{0.0, 1.0}, {2.0, 3.0}, {4.0, 3.0}});
    CHECK_FALSE(pw.is_constant());
    CHECK(pw(0.0) == doctest::Approx(1.0));
    CHECK(pw(1.0) == doctest::Approx(2.0));
    CHECK(pw(2.0) == doctest::Approx(3.0));
    CHECK(pw(3.0) == doctest::Approx(3.0));
    CHECK(pw(-1.0) == doctest::Approx(1.0));   // clamped left
    CHECK(pw(99.0) == doctest::Approx(3.0));   // clamped right
}

TEST_CASE("time scalar rejects non-increasing breakpoints") {
    CHECK_THROWS_AS(TimeScalar({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TimeScalar({{1.0, 1.0}, {0.5, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TimeScalar(std::vector<std::pair<double, double>>{}),
                    std::invalid_argument);
}

}  // TEST_SUITE("model")
