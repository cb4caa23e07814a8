#pragma once

// Two-zone Bradford curve. The core zone (r <= T0) follows the linear
// productivity-ratio law X1/X_r = k(r-1) + 1; the normal zone is the Egghe
// formula shifted so it starts at (T0, A0). Shape is read off the signs of
// the second derivatives of R with respect to ln r in each zone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bradford/errors.hpp"
#include "bradford/model.hpp"

namespace bradford {

inline constexpr double kEulerGamma = std::numbers::egamma;

/// R_c(r) = sum_{i=1..r} X1 / (k (i-1) + 1).
inline double core_curve(double x1, double k, std::int64_t rank) {
    if (rank < 1) {
        throw DomainError("rank must be >= 1");
    }
    if (!(k >= 0.0)) {
        throw DomainError("core ratio slope k must be non-negative");
    }
    double sum = 0.0;
    for (std::int64_t i = 1; i <= rank; ++i) {
        sum += x1 / (k * static_cast<double>(i - 1) + 1.0);
    }
    return sum;
}

/// Solve R_c(T0) = A0 for k. The sum falls strictly from T0*X1 at k = 0 to X1
/// as k grows, so a sign-change bracket always exists for X1 < A0 < T0*X1.
inline double solve_k(double x1, std::int64_t core_journals, double a0) {
    if (core_journals == 1) {
        throw DegenerateCoreError("single-journal core: k is undefined (use k = 1 with X1 = A0)");
    }
    if (core_journals < 1) {
        throw DomainError("core journal count must be >= 1");
    }
    const double upper = static_cast<double>(core_journals) * x1;
    if (!(x1 > 0.0) || !(a0 > x1) || !(a0 < upper)) {
        throw InfeasibleError("no k > 0 satisfies R_c(T0) = A0: need X1 < A0 < T0*X1 (X1=" +
                              std::to_string(x1) + ", T0=" + std::to_string(core_journals) +
                              ", A0=" + std::to_string(a0) + ")");
    }
    const auto residual = [&](double k) { return core_curve(x1, k, core_journals) - a0; };

    double lo = 1e-9;
    if (residual(lo) <= 0.0) {
        lo = 0.0;
    }
    double hi = 1.0;
    while (residual(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            throw InfeasibleError("k bracket expansion failed");
        }
    }
    for (int iter = 0; iter < 400 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (r == 0.0) {
            return mid;
        }
        (r > 0.0 ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    if (std::abs(residual(k)) > 1e-9 * a0) {
        throw InfeasibleError("k solver did not reach 1e-9 relative residual");
    }
    return k;
}

/// Parameters of R(r) = a ln(1 + b r) for the normal zone.
struct EggheParams {
    double a = 0.0;
    double b = 0.0;
    double A1 = 0.0;
    double T1 = 0.0;
    double y_m = 0.0;
    double euler_gamma = kEulerGamma;
};

inline EggheParams egghe_params(double a1, double t1, double ym) {
    if (!(a1 > 0.0) || !(t1 > 0.0)) {
        throw DomainError("normal zone needs positive paper and journal totals (A1=" +
                          std::to_string(a1) + ", T1=" + std::to_string(t1) + ")");
    }
    const double scaled = std::exp(kEulerGamma) * ym;
    if (!(scaled > 1.0)) {
        throw DomainError("y_m must exceed exp(-gamma) so that ln(e^gamma y_m) > 0");
    }
    return {a1 / std::log(scaled), (scaled - 1.0) / t1, a1, t1, ym, kEulerGamma};
}

/// R_n(r) = a ln(1 + b (r - T0)) + A0, defined for r > T0.
inline double normal_curve(const EggheParams& egghe, double t0, double a0, double rank) {
    if (!(rank > t0)) {
        throw std::invalid_argument("normal zone is defined only for r > T0");
    }
    return egghe.a * std::log1p(egghe.b * (rank - t0)) + a0;
}

/// Sign of a second derivative: -1 concave down, 0 linear, +1 concave up.
enum class Curvature : int { Down = -1, Flat = 0, Up = 1 };

struct CurvatureSigns {
    Curvature core;
    Curvature normal;
};

namespace detail {
inline Curvature sign_of(double x) {
    return x > 0.0 ? Curvature::Up : (x < 0.0 ? Curvature::Down : Curvature::Flat);
}
} // namespace detail

/// Core zone curves like (1 - k); normal zone like (1 - b T0), with T0 real.
inline CurvatureSigns curvature_signs(const ZoneParams& zone, const EggheParams& egghe) {
    return {detail::sign_of(1.0 - zone.k), detail::sign_of(1.0 - egghe.b * zone.T0)};
}

enum class ShapeKind { J, ReversedS, S, ConcaveDown };

inline const char* to_string(ShapeKind kind) {
    switch (kind) {
    case ShapeKind::J: return "J";
    case ShapeKind::ReversedS: return "REVERSED_S";
    case ShapeKind::S: return "S";
    case ShapeKind::ConcaveDown: return "CONCAVE_DOWN";
    }
    return "?";
}

inline ShapeKind shape_kind_from_string(const std::string& s) {
    if (s == "J") return ShapeKind::J;
    if (s == "REVERSED_S") return ShapeKind::ReversedS;
    if (s == "S") return ShapeKind::S;
    if (s == "CONCAVE_DOWN") return ShapeKind::ConcaveDown;
    throw ValidationError("unknown shape class '" + s + "'");
}

struct ShapeClass {
    ShapeKind kind = ShapeKind::J;
    bool core_concave_up = true;
    bool normal_concave_up = true;

    bool operator==(const ShapeClass&) const = default;
};

/// Flat curvature counts as concave up.
inline ShapeClass classify(CurvatureSigns signs) {
    const bool core_up = signs.core != Curvature::Down;
    const bool normal_up = signs.normal != Curvature::Down;
    ShapeKind kind;
    if (core_up && normal_up) {
        kind = ShapeKind::J;
    } else if (!core_up && normal_up) {
        kind = ShapeKind::ReversedS;
    } else if (core_up) {
        kind = ShapeKind::S;
    } else {
        kind = ShapeKind::ConcaveDown;
    }
    return {kind, core_up, normal_up};
}

enum class Zone { Core, Normal };

inline const char* to_string(Zone z) { return z == Zone::Core ? "core" : "normal"; }

struct CurveSample {
    std::int64_t rank = 0;
    double cumulative = 0.0;
    Zone zone = Zone::Core;

    bool operator==(const CurveSample&) const = default;
};

struct CurveModel {
    ZoneParams zone_params;
    EggheParams egghe;
    double T = 0.0;  ///< total journals
    double A = 0.0;  ///< total papers
    std::vector<CurveSample> samples;
    ShapeClass shape;

    /// R(r) for any rank in [1, T]; integer ranks in the core, real above.
    double value_at(double rank) const {
        if (rank <= static_cast<double>(zone_params.T0_int)) {
            return core_curve(zone_params.X1, zone_params.k, std::max<std::int64_t>(1, std::llround(rank)));
        }
        return normal_curve(egghe, zone_params.T0, zone_params.A0, rank);
    }
};

inline constexpr std::int64_t kDenseSamplingLimit = 10000;
inline constexpr std::size_t kGeometricSamplePoints = 500;

/// Ranks at which an assembled curve is sampled: every rank up to
/// kDenseSamplingLimit journals, otherwise the full core plus ~500
/// geometrically spaced ranks.
inline std::vector<std::int64_t> sampling_ranks(std::int64_t core_journals, std::int64_t total_journals) {
    std::vector<std::int64_t> ranks;
    if (total_journals <= kDenseSamplingLimit) {
        ranks.resize(static_cast<std::size_t>(total_journals));
        for (std::int64_t r = 1; r <= total_journals; ++r) ranks[static_cast<std::size_t>(r - 1)] = r;
        return ranks;
    }
    for (std::int64_t r = 1; r <= core_journals + 1; ++r) ranks.push_back(r);
    const double log_t = std::log(static_cast<double>(total_journals));
    for (std::size_t i = 0; i < kGeometricSamplePoints; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(kGeometricSamplePoints - 1);
        ranks.push_back(std::llround(std::exp(f * log_t)));
    }
    ranks.push_back(total_journals);
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    std::erase_if(ranks, [&](std::int64_t r) { return r < 1 || r > total_journals; });
    return ranks;
}

inline constexpr double kDegenerateCoreTolerance = 0.05;

/// Assemble the two-zone curve for a bibliography of `journals` journals and
/// `papers` papers. Solves k from the core anchors, derives y_m from the core
/// (X1, T0, k) and the Egghe parameters from the normal-zone remainder.
inline CurveModel assemble_curve(ZoneParams zone, double journals, double papers) {
    if (!(zone.X1 > 0.0) || !(zone.A0 > 0.0)) {
        throw DomainError("core anchors X1 and A0 must be positive");
    }
    if (!(zone.T0 <= journals) || !(zone.A0 <= papers)) {
        throw DomainError("core zone exceeds the bibliography (T0 <= T and A0 <= A required)");
    }
    zone.T0_int = core_journal_count(zone.T0);

    if (zone.T0_int == 1) {
        if (std::abs(zone.X1 - zone.A0) / zone.A0 > kDegenerateCoreTolerance) {
            throw InfeasibleError("single-journal core requires X1 within 5% of A0");
        }
        zone.X1 = zone.A0;
        zone.k = 1.0;
    } else {
        zone.k = solve_k(zone.X1, zone.T0_int, zone.A0);
    }

    const double ym_core = ym_from_core(zone.X1, zone.T0_int, zone.k);
    const EggheParams egghe = egghe_params(papers - zone.A0, journals - zone.T0, ym_core);

    const std::int64_t total = std::llround(journals);
    if (total <= zone.T0_int) {
        throw DomainError("normal zone is empty: round(T) must exceed the core size");
    }

    CurveModel model;
    model.T = journals;
    model.A = papers;
    model.egghe = egghe;

    double running = 0.0;
    std::int64_t summed = 0;
    for (const std::int64_t r : sampling_ranks(zone.T0_int, total)) {
        CurveSample s;
        s.rank = r;
        if (r <= zone.T0_int) {
            for (; summed < r; ++summed) {
                running += zone.X1 / (zone.k * static_cast<double>(summed) + 1.0);
            }
            s.cumulative = running;
            s.zone = Zone::Core;
        } else {
            s.cumulative = normal_curve(egghe, zone.T0, zone.A0, static_cast<double>(r));
            s.zone = Zone::Normal;
        }
        model.samples.push_back(s);
    }
    model.zone_params = zone;
    model.shape = classify(curvature_signs(zone, egghe));
    return model;
}

} // namespace bradford
