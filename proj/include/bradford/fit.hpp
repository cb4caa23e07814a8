#pragma once

// Least-squares estimators for the forecasting pipeline: straight lines,
// power laws in log-log space, the quadratic journal-count law
// T = alpha_s A - k A^2 / 2 and three-parameter logistic growth of A(t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bradford/errors.hpp"

namespace bradford {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual_rms = 0.0;

    double operator()(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit fit_linear(std::span<const Point> points) {
    if (points.size() < 2) {
        throw InsufficientDataError("linear fit needs at least 2 points");
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (!(sxx > 0.0)) {
        throw InsufficientDataError("linear fit is degenerate: all x values are equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const auto& p : points) {
        const double e = p.y - fit(p.x);
        ssr += e * e;
    }
    fit.residual_rms = std::sqrt(ssr / n);
    return fit;
}

/// ln Y = a_rho + b_rho ln A (natural logarithms).
struct LogLogFit {
    double a_rho = 0.0;
    double b_rho = 0.0;
    double residual_rms = 0.0;

    double predict(double papers) const { return std::exp(a_rho) * std::pow(papers, b_rho); }
};

inline LogLogFit fit_loglog(std::span<const Point> points) {
    std::vector<Point> logs;
    logs.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0)) {
            throw DomainError("log-log fit needs strictly positive values");
        }
        logs.push_back({std::log(p.x), std::log(p.y)});
    }
    const LinearFit lin = fit_linear(logs);
    return {lin.intercept, lin.slope, lin.residual_rms};
}

/// Journal-count law T(A) = alpha_s A - k_lin A^2 / 2 from a linearly falling
/// entry rate alpha(A) = alpha_s - k_lin A.
struct EntryRateFit {
    double alpha_s = 0.0;
    double alpha_f = 0.0;
    double A_f = 0.0;
    double k_lin = 0.0;
    double residual_rms = 0.0;

    double alpha_bar() const { return 0.5 * (alpha_s + alpha_f); }
    double journals_at(double papers) const { return alpha_s * papers - 0.5 * k_lin * papers * papers; }
    double linear_coefficient() const { return alpha_s; }
    double quadratic_coefficient() const { return -0.5 * k_lin; }
};

namespace detail {

inline void require_distinct_positive_x(std::span<const Point> points, const char* what) {
    if (points.size() < 2) {
        throw InsufficientDataError(std::string(what) + " needs at least 2 points");
    }
    for (const auto& p : points) {
        if (!(p.x > 0.0)) throw DomainError(std::string(what) + " needs positive paper counts");
    }
    std::vector<double> xs;
    for (const auto& p : points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw InsufficientDataError(std::string(what) + " needs distinct paper counts");
    }
}

inline double entry_rms(const EntryRateFit& fit, std::span<const Point> points) {
    double ssr = 0.0;
    for (const auto& p : points) {
        const double e = p.y - fit.journals_at(p.x);
        ssr += e * e;
    }
    return std::sqrt(ssr / static_cast<double>(points.size()));
}

} // namespace detail

/// Fit T = c1 A + c2 A^2 (no intercept: zero papers means zero journals).
/// alpha_s = c1, k_lin = -2 c2, alpha_f = alpha_s - k_lin A_f where A_f is
/// `horizon` or the largest A in the data.
inline EntryRateFit fit_entry_quadratic(std::span<const Point> points, std::optional<double> horizon = std::nullopt) {
    detail::require_distinct_positive_x(points, "quadratic entry fit");
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, p.x);

    // columns scaled to unit magnitude before the QR solve
    Eigen::MatrixXd design(static_cast<Eigen::Index>(points.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = points[i].x / scale;
        design(static_cast<Eigen::Index>(i), 0) = u;
        design(static_cast<Eigen::Index>(i), 1) = u * u;
        rhs(static_cast<Eigen::Index>(i)) = points[i].y;
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    const double c1 = coef(0) / scale;
    const double c2 = coef(1) / (scale * scale);

    EntryRateFit fit;
    fit.A_f = horizon.value_or(scale);
    fit.alpha_s = c1;
    fit.k_lin = -2.0 * c2;
    fit.alpha_f = fit.alpha_s - fit.k_lin * fit.A_f;
    if (!(fit.alpha_s > 0.0 && fit.alpha_s < 1.0)) {
        throw InfeasibleError("quadratic entry fit: alpha_s = " + std::to_string(fit.alpha_s) + " outside (0, 1)");
    }
    if (!(fit.alpha_f > 0.0)) {
        throw InfeasibleError("quadratic entry fit: alpha_f = " + std::to_string(fit.alpha_f) + " is not positive");
    }
    fit.residual_rms = detail::entry_rms(fit, points);
    return fit;
}

/// Constant-rate law T = alpha A, least squares through the origin.
inline EntryRateFit fit_entry_linear(std::span<const Point> points) {
    if (points.empty()) {
        throw InsufficientDataError("linear entry fit needs at least 1 point");
    }
    double sxy = 0.0, sxx = 0.0, amax = 0.0;
    for (const auto& p : points) {
        if (!(p.x > 0.0)) throw DomainError("linear entry fit needs positive paper counts");
        sxy += p.x * p.y;
        sxx += p.x * p.x;
        amax = std::max(amax, p.x);
    }
    EntryRateFit fit;
    fit.alpha_s = fit.alpha_f = sxy / sxx;
    fit.A_f = amax;
    if (!(fit.alpha_s > 0.0 && fit.alpha_s < 1.0)) {
        throw InfeasibleError("linear entry fit: alpha = " + std::to_string(fit.alpha_s) + " outside (0, 1)");
    }
    fit.residual_rms = detail::entry_rms(fit, points);
    return fit;
}

/// A(t) = K / (1 + exp(-r (t - t0))).
struct LogisticFit {
    double K = 0.0;
    double r = 0.0;
    double t0 = 0.0;
    double residual_rms = 0.0;
    int iterations = 0;
    bool converged = false;

    double operator()(double t) const { return K / (1.0 + std::exp(-r * (t - t0))); }
};

inline constexpr int kLogisticMaxIterations = 200;
inline constexpr double kLogisticStepTolerance = 1e-8;

/// Levenberg-Marquardt on the three Verhulst parameters, started from
/// K = 2 max(A), t0 = median t and r from the logit slope between the first
/// and last points. On non-convergence the best parameters found are
/// returned with converged = false.
inline LogisticFit fit_logistic(std::span<const Point> points) {
    if (points.size() < 3) {
        throw InsufficientDataError("logistic fit needs at least 3 points");
    }
    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].y > 0.0)) throw DomainError("logistic fit needs positive values");
        if (i > 0 && !(pts[i].x > pts[i - 1].x && pts[i].y > pts[i - 1].y)) {
            throw DomainError("logistic fit needs values strictly increasing in time");
        }
    }

    double ymax = 0.0;
    for (const auto& p : pts) ymax = std::max(ymax, p.y);
    std::vector<double> ts;
    for (const auto& p : pts) ts.push_back(p.x);
    const std::size_t mid = ts.size() / 2;
    const double median_t = ts.size() % 2 ? ts[mid] : 0.5 * (ts[mid - 1] + ts[mid]);

    Eigen::Vector3d p(2.0 * ymax, 0.0, median_t);
    const auto logit = [&](double y) { const double q = y / p(0); return std::log(q / (1.0 - q)); };
    p(1) = (logit(pts.back().y) - logit(pts.front().y)) / (pts.back().x - pts.front().x);

    const auto sse = [&](const Eigen::Vector3d& q) {
        double s = 0.0;
        for (const auto& pt : pts) {
            const double e = pt.y - q(0) / (1.0 + std::exp(-q(1) * (pt.x - q(2))));
            s += e * e;
        }
        return s;
    };

    double lambda = 1e-3;
    double current = sse(p);
    LogisticFit fit;
    int iter = 0;
    for (; iter < kLogisticMaxIterations; ++iter) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jte = Eigen::Vector3d::Zero();
        for (const auto& pt : pts) {
            const double e_ = std::exp(-p(1) * (pt.x - p(2)));
            const double den = 1.0 + e_;
            const double f = p(0) / den;
            Eigen::Vector3d g(1.0 / den, p(0) * e_ * (pt.x - p(2)) / (den * den), -p(0) * e_ * p(1) / (den * den));
            jtj += g * g.transpose();
            jte += g * (pt.y - f);
        }
        bool accepted = false;
        while (lambda < 1e30) {
            Eigen::Matrix3d damped = jtj;
            damped.diagonal() *= (1.0 + lambda);
            const Eigen::Vector3d delta = damped.ldlt().solve(jte);
            const Eigen::Vector3d trial = p + delta;
            const double trial_sse = (trial(0) > 0.0 && trial(1) > 0.0 && delta.allFinite())
                                         ? sse(trial)
                                         : std::numeric_limits<double>::infinity();
            if (trial_sse <= current) {
                const double rel = (delta.array().abs() / (trial.array().abs() + 1e-300)).maxCoeff();
                p = trial;
                current = trial_sse;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel < kLogisticStepTolerance) {
                    fit.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // no descent direction left: stationary up to rounding
            fit.converged = true;
        }
        if (fit.converged || current == 0.0) {
            fit.converged = true;
            ++iter;
            break;
        }
    }
    fit.K = p(0);
    fit.r = p(1);
    fit.t0 = p(2);
    fit.iterations = iter;
    fit.residual_rms = std::sqrt(current / static_cast<double>(pts.size()));
    return fit;
}

} // namespace bradford
