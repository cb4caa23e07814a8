#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bradford/fit.hpp"
#include "bradford/model.hpp"

using namespace bradford;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double ssr(const std::vector<Point>& pts, double c0, double c1) {
    double s = 0.0;
    for (const auto& p : pts) s += (p.y - c0 - c1 * p.x) * (p.y - c0 - c1 * p.x);
    return s;
}
} // namespace

TEST(FitLinear, Examples) {
    auto f = fit_linear(std::vector<Point>{{0, 1}, {1, 3}});
    EXPECT_NEAR(f.intercept, 1.0, 1e-15);
    EXPECT_NEAR(f.slope, 2.0, 1e-15);
    EXPECT_NEAR(f.residual_rms, 0.0, 1e-15);

    f = fit_linear(std::vector<Point>{{0, 0}, {1, 1}, {2, 2}});
    EXPECT_NEAR(f.intercept, 0.0, 1e-15);
    EXPECT_NEAR(f.slope, 1.0, 1e-15);

    f = fit_linear(std::vector<Point>{{0, 0}, {1, 1}, {2, 0}});
    EXPECT_NEAR(f.slope, 0.0, 1e-15);
    EXPECT_NEAR(f.intercept, 1.0 / 3.0, 1e-15);

    EXPECT_THROW(fit_linear(std::vector<Point>{{1, 1}}), InsufficientDataError);
    EXPECT_THROW(fit_linear(std::vector<Point>{{1, 1}, {1, 2}}), InsufficientDataError);
}

TEST(FitLinear, PerturbingCoefficientsNeverLowersResidual) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> pts;
        for (int i = 0; i < 20; ++i) pts.push_back({static_cast<double>(i), 3.0 - 0.5 * i + noise(rng)});
        const auto f = fit_linear(pts);
        const double base = ssr(pts, f.intercept, f.slope);
        for (const double d : {-1e-3, 1e-3}) {
            EXPECT_GE(ssr(pts, f.intercept + d, f.slope), base);
            EXPECT_GE(ssr(pts, f.intercept, f.slope + d), base);
        }
    }
}

TEST(FitLogLog, Examples) {
    auto f = fit_loglog(std::vector<Point>{{100, 100}, {10000, 1000}});
    EXPECT_NEAR(f.a_rho, std::log(10.0), 1e-12);
    EXPECT_NEAR(f.b_rho, 0.5, 1e-12);
    const double e = std::exp(1.0);
    f = fit_loglog(std::vector<Point>{{e, e}, {e * e, e * e}});
    EXPECT_NEAR(f.a_rho, 0.0, 1e-12);
    EXPECT_NEAR(f.b_rho, 1.0, 1e-12);
    EXPECT_THROW(fit_loglog(std::vector<Point>{{1, 0}, {2, 1}}), DomainError);
}

TEST(FitLogLog, AnalyticCoreJournalScaling) {
    const RhoExponent rho(10.0 / 9.0);
    std::vector<Point> pts;
    for (const double a : {1e3, 1e4, 1e5}) pts.push_back({a, core_zone_analytic(a, rho).journals});
    EXPECT_NEAR(fit_loglog(pts).b_rho, 1.0 / (rho.value() + 1.0), 1e-10);
}

TEST(FitLogLog, RandomPowerLawRoundTrip) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> cd(0.01, 100.0), pd(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double c = cd(rng), p = pd(rng);
        std::vector<Point> pts;
        for (const double a : {10.0, 300.0, 5000.0, 80000.0}) pts.push_back({a, c * std::pow(a, p)});
        const auto f = fit_loglog(pts);
        EXPECT_LT(f.residual_rms, 1e-10);
        EXPECT_LT(rel(std::exp(f.a_rho), c), 1e-8);
        EXPECT_LT(std::abs(f.b_rho - p), 1e-8 * std::max(1.0, std::abs(p)));
    }
}

TEST(FitEntry, QuadraticExample) {
    std::vector<Point> pts;
    for (const double a : {100.0, 250.0, 500.0, 750.0, 1000.0}) pts.push_back({a, 0.3 * a - 1e-4 * a * a});
    EXPECT_NEAR(pts.back().y, 200.0, 1e-12);
    const auto f = fit_entry_quadratic(pts);
    EXPECT_NEAR(f.alpha_s, 0.3, 1e-9);
    EXPECT_NEAR(f.alpha_f, 0.1, 1e-9);
    EXPECT_NEAR(f.A_f, 1000.0, 0.0);
    EXPECT_NEAR(f.quadratic_coefficient(), -1e-4, 1e-13);
}

TEST(FitEntry, ConstantRateData) {
    std::vector<Point> pts;
    for (const double a : {100.0, 1000.0, 5000.0}) pts.push_back({a, 0.1 * a});
    const auto q = fit_entry_quadratic(pts);
    EXPECT_NEAR(q.alpha_s, 0.1, 1e-12);
    EXPECT_NEAR(q.alpha_f, 0.1, 1e-12);
    EXPECT_NEAR(q.k_lin, 0.0, 1e-15);
    const auto l = fit_entry_linear(pts);
    EXPECT_NEAR(l.alpha_s, 0.1, 1e-15);
    EXPECT_EQ(l.k_lin, 0.0);

    const auto croatian = fit_entry_linear(std::vector<Point>{{2543, 416}});
    EXPECT_NEAR(croatian.alpha_s, 416.0 / 2543.0, 1e-15);
    EXPECT_NEAR(croatian.alpha_s, 0.1636, 1e-4);
}

TEST(FitEntry, QuadraticRandomRoundTrip) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double as = 0.05 + 0.9 * u(rng);
        const double af = as * (0.05 + 0.9 * u(rng));
        const double horizon = std::pow(10.0, 2.0 + 4.0 * u(rng));
        const double k = (as - af) / horizon;
        std::vector<Point> pts;
        for (int j = 1; j <= 8; ++j) {
            const double a = horizon * j / 8.0;
            pts.push_back({a, as * a - 0.5 * k * a * a});
        }
        const auto f = fit_entry_quadratic(pts);
        EXPECT_LT(rel(f.alpha_s, as), 1e-8);
        EXPECT_LT(rel(f.alpha_f, af), 1e-8);
        EXPECT_LT(rel(f.A_f, horizon), 1e-12);
    }
}

TEST(FitEntry, InfeasibleAndDegenerateInputs) {
    EXPECT_THROW(fit_entry_quadratic(std::vector<Point>{{100, 10}}), InsufficientDataError);
    EXPECT_THROW(fit_entry_quadratic(std::vector<Point>{{100, 10}, {100, 11}}), InsufficientDataError);
    // journals exceed papers: alpha_s > 1
    EXPECT_THROW(fit_entry_quadratic(std::vector<Point>{{10, 15}, {20, 30}, {30, 45}}), InfeasibleError);
    // rate would fall below zero before the horizon
    std::vector<Point> pts;
    for (const double a : {100.0, 200.0, 300.0}) pts.push_back({a, 0.3 * a - 1e-3 * a * a});
    EXPECT_THROW(fit_entry_quadratic(pts), InfeasibleError);
}

TEST(FitLogistic, UnitExample) {
    std::vector<Point> pts;
    for (int t = -2; t <= 4; ++t) pts.push_back({static_cast<double>(t), 1000.0 / (1.0 + std::exp(-t))});
    const auto f = fit_logistic(pts);
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.K, 1000.0, 1e-6 * 1000.0);
    EXPECT_NEAR(f.r, 1.0, 1e-6);
    EXPECT_NEAR(f.t0, 0.0, 1e-6);
    EXPECT_NEAR(f(f.t0), f.K / 2.0, 1e-9 * f.K);
}

TEST(FitLogistic, ShiftedExample) {
    std::vector<Point> pts;
    for (int t = 1; t <= 10; ++t) pts.push_back({static_cast<double>(t), 2500.0 / (1.0 + std::exp(-0.5 * (t - 5.0)))});
    const auto f = fit_logistic(pts);
    EXPECT_LT(rel(f.K, 2500.0), 1e-4);
    EXPECT_LT(rel(f.r, 0.5), 1e-4);
    EXPECT_LT(rel(f.t0, 5.0), 1e-4);
}

TEST(FitLogistic, MonotoneAndSaturating) {
    std::mt19937_64 rng(30);
    std::normal_distribution<double> noise(0.0, 0.002);
    std::vector<Point> pts;
    for (int t = 0; t <= 12; ++t) {
        pts.push_back({static_cast<double>(t), 5000.0 / (1.0 + std::exp(-0.6 * (t - 6.0))) * (1.0 + noise(rng))});
    }
    const auto f = fit_logistic(pts);
    EXPECT_GT(f.r, 0.0);
    double prev = f(-10.0);
    for (double t = -9.5; t < 30.0; t += 0.5) {
        EXPECT_GT(f(t), prev);
        prev = f(t);
    }
    double ymax = 0.0;
    for (const auto& p : pts) ymax = std::max(ymax, p.y);
    EXPECT_GE(f.K, ymax * 0.995);
}

TEST(FitLogistic, RejectsBadInput) {
    EXPECT_THROW(fit_logistic(std::vector<Point>{{0, 1}, {1, 2}}), InsufficientDataError);
    EXPECT_THROW(fit_logistic(std::vector<Point>{{0, 1}, {1, 2}, {2, 2}}), DomainError);
}
