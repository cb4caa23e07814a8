#pragma once

// Closed-form steady state of the Simon-Yule process: the Yule productivity
// distribution, the core/normal zone boundary y_m, core-zone totals and the
// extreme-value productivity of the most productive journal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bradford/errors.hpp"

namespace bradford {

/// Probability that a new paper founds a new journal. Strictly inside (0, 1).
class EntryRate {
public:
    explicit EntryRate(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw DomainError("entry rate must lie in (0, 1), got " + std::to_string(alpha));
        }
    }

    double value() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Yule exponent; the steady-state distribution decays like n^-(rho+1).
/// Only positivity is enforced here: formulas that divide by rho - 1 check
/// rho > 1 themselves.
class RhoExponent {
public:
    explicit RhoExponent(double rho) : rho_(rho) {
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw DomainError("rho must be positive and finite, got " + std::to_string(rho));
        }
    }

    double value() const noexcept { return rho_; }

private:
    double rho_;
};

inline RhoExponent rho_from_alpha(EntryRate alpha) {
    return RhoExponent(1.0 / (1.0 - alpha.value()));
}

inline double alpha_from_rho(RhoExponent rho) { return 1.0 - 1.0 / rho.value(); }

enum class PmfForm { ExactBeta, PowerLaw };

/// f(n) = rho * B(n, rho + 1), or rho * Gamma(rho + 1) * n^-(rho+1) when the
/// power-law approximation is requested.
inline double yule_pmf(std::int64_t n, RhoExponent rho, PmfForm form = PmfForm::ExactBeta) {
    if (n < 1) {
        throw DomainError("productivity n must be >= 1");
    }
    const double p = rho.value();
    const double nd = static_cast<double>(n);
    if (form == PmfForm::PowerLaw) {
        return p * std::tgamma(p + 1.0) * std::pow(nd, -(p + 1.0));
    }
    return p * std::exp(std::lgamma(nd) + std::lgamma(p + 1.0) - std::lgamma(nd + p + 1.0));
}

/// P(X >= n) = Gamma(rho + 1) Gamma(n) / Gamma(n + rho).
inline double yule_survival(std::int64_t n, RhoExponent rho) {
    if (n < 1) {
        throw DomainError("productivity n must be >= 1");
    }
    const double p = rho.value();
    const double nd = static_cast<double>(n);
    return std::exp(std::lgamma(p + 1.0) + std::lgamma(nd) - std::lgamma(nd + p));
}

/// Sum over m > n of m * f(m), in closed form. Needs rho > 1 for the mean to
/// exist. Used to close truncated moment sums of a heavy tail.
inline double yule_upper_tail_mean(std::int64_t n, RhoExponent rho) {
    const double p = rho.value();
    if (!(p > 1.0)) {
        throw DomainError("the Yule mean is finite only for rho > 1");
    }
    const double nd = static_cast<double>(n);
    // (n+1) S(n+1) + sum_{m >= n+2} S(m), with the telescoping identity
    // sum_{m >= M} Gamma(m)/Gamma(m+rho) = Gamma(M) / ((rho-1) Gamma(M+rho-1)).
    const double head = (nd + 1.0) * yule_survival(n + 1, rho);
    const double rest = std::exp(std::lgamma(p + 1.0) + std::lgamma(nd + 2.0) -
                                 std::lgamma(nd + p + 1.0)) /
                        (p - 1.0);
    return head + rest;
}

namespace detail {

inline void require_rho_above_one(RhoExponent rho, const char* what) {
    if (!(rho.value() > 1.0)) {
        throw DomainError(std::string(what) + " requires rho > 1 (the factor rho - 1 vanishes)");
    }
}

inline void require_positive_papers(double papers) {
    if (!(papers > 0.0) || !std::isfinite(papers)) {
        throw DomainError("paper count must be positive and finite");
    }
}

} // namespace detail

/// Zone boundary: the productivity at which the expected number of journals
/// drops to one. y_m = [A (rho - 1) Gamma(rho + 1)]^(1/(rho+1)).
inline double ym_analytic(double papers, RhoExponent rho) {
    detail::require_positive_papers(papers);
    detail::require_rho_above_one(rho, "ym_analytic");
    const double p = rho.value();
    return std::pow(papers * (p - 1.0) * std::tgamma(p + 1.0), 1.0 / (p + 1.0));
}

struct CoreTotals {
    double journals;  ///< T0 = y_m / rho
    double papers;    ///< A0 = y_m^2 / (rho - 1)
};

inline CoreTotals core_zone_analytic(double papers, RhoExponent rho) {
    const double ym = ym_analytic(papers, rho);
    const double p = rho.value();
    return {ym / p, ym * ym / (p - 1.0)};
}

/// Most productive journal, X1 = [A Gamma(rho + 1)]^(1/rho).
inline double x1_analytic(double papers, RhoExponent rho) {
    detail::require_positive_papers(papers);
    detail::require_rho_above_one(rho, "x1_analytic");
    const double p = rho.value();
    return std::pow(papers * std::tgamma(p + 1.0), 1.0 / p);
}

/// Equivalent form of x1_analytic in terms of the zone boundary:
/// (rho - 1)^(-1/rho) * y_m^((rho+1)/rho).
inline double x1_from_ym(double ym, RhoExponent rho) {
    detail::require_rho_above_one(rho, "x1_from_ym");
    const double p = rho.value();
    return std::pow(p - 1.0, -1.0 / p) * std::pow(ym, (p + 1.0) / p);
}

/// r-th characteristic extreme X1 * r^(-1/rho). Only accurate at r = 1; kept
/// for comparison against the linear core-ratio law.
inline double gumbel_xr(double x1, std::int64_t rank, RhoExponent rho) {
    if (rank < 1) {
        throw DomainError("rank must be >= 1");
    }
    return x1 * std::pow(static_cast<double>(rank), -1.0 / rho.value());
}

/// Zone boundary recovered from the core: X1 / (k (T0 - 1) + 1).
inline double ym_from_core(double x1, std::int64_t core_journals, double k) {
    if (core_journals < 1) {
        throw DomainError("core journal count must be >= 1");
    }
    if (!(k > 0.0)) {
        throw DomainError("core ratio slope k must be positive");
    }
    return x1 / (k * static_cast<double>(core_journals - 1) + 1.0);
}

/// Integer core size used wherever T0 indexes a summation.
inline std::int64_t core_journal_count(double t0) {
    return std::max<std::int64_t>(1, std::llround(t0));
}

/// Zone-split parameter bundle. T0 stays real for the curvature test against
/// 1/b; T0_int is the summation bound. k is filled in by curve assembly.
struct ZoneParams {
    double alpha = 0.0;
    double rho = 0.0;
    double y_m = 0.0;
    double T0 = 0.0;
    std::int64_t T0_int = 1;
    double A0 = 0.0;
    double X1 = 0.0;
    double k = 1.0;
};

/// Zone parameters of a bibliography of `papers` papers from the steady-state
/// closed forms at entry rate `alpha`.
inline ZoneParams analytic_zone_params(double papers, EntryRate alpha) {
    const RhoExponent rho = rho_from_alpha(alpha);
    const CoreTotals core = core_zone_analytic(papers, rho);
    ZoneParams zp;
    zp.alpha = alpha.value();
    zp.rho = rho.value();
    zp.y_m = ym_analytic(papers, rho);
    zp.T0 = core.journals;
    zp.T0_int = core_journal_count(core.journals);
    zp.A0 = core.papers;
    zp.X1 = x1_analytic(papers, rho);
    return zp;
}

/// Journal counts per productivity level. Counts are real so ensemble means
/// fit the same type.
class FrequencyTable {
public:
    FrequencyTable() = default;

    void add(std::int64_t n, double count) {
        if (n < 1) {
            throw ValidationError("productivity must be a positive integer, got " + std::to_string(n));
        }
        if (!(count >= 0.0) || !std::isfinite(count)) {
            throw ValidationError("journal count must be non-negative");
        }
        counts_[n] += count;
    }

    double at(std::int64_t n) const {
        const auto it = counts_.find(n);
        return it == counts_.end() ? 0.0 : it->second;
    }

    double journals() const {
        double t = 0.0;
        for (const auto& [n, c] : counts_) t += c;
        return t;
    }

    double papers() const {
        double a = 0.0;
        for (const auto& [n, c] : counts_) a += static_cast<double>(n) * c;
        return a;
    }

    std::int64_t max_productivity() const { return counts_.empty() ? 0 : counts_.rbegin()->first; }

    const std::map<std::int64_t, double>& entries() const noexcept { return counts_; }

    bool operator==(const FrequencyTable&) const = default;

private:
    std::map<std::int64_t, double> counts_;
};

/// Per-journal productivities, sorted so that X_1 >= X_2 >= ...
class RankedBibliography {
public:
    RankedBibliography() = default;

    explicit RankedBibliography(std::vector<std::int64_t> sizes) : sizes_(std::move(sizes)) {
        for (const auto s : sizes_) {
            if (s < 1) {
                throw ValidationError("journal productivity must be >= 1, got " + std::to_string(s));
            }
        }
        std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
        for (const auto s : sizes_) papers_ += s;
    }

    static RankedBibliography from_frequency(const FrequencyTable& table) {
        std::vector<std::int64_t> sizes;
        for (const auto& [n, c] : table.entries()) {
            if (c != std::floor(c)) {
                throw ValidationError("journal count for n=" + std::to_string(n) + " is not an integer");
            }
            sizes.insert(sizes.end(), static_cast<std::size_t>(c), n);
        }
        return RankedBibliography(std::move(sizes));
    }

    FrequencyTable to_frequency() const {
        FrequencyTable t;
        for (const auto s : sizes_) t.add(s, 1.0);
        return t;
    }

    std::int64_t journals() const noexcept { return static_cast<std::int64_t>(sizes_.size()); }
    std::int64_t papers() const noexcept { return papers_; }
    bool empty() const noexcept { return sizes_.empty(); }

    /// Productivity at 1-based rank r.
    std::int64_t at_rank(std::int64_t r) const { return sizes_.at(static_cast<std::size_t>(r - 1)); }

    std::span<const std::int64_t> sizes() const noexcept { return sizes_; }

    bool operator==(const RankedBibliography&) const = default;

private:
    std::vector<std::int64_t> sizes_;
    std::int64_t papers_ = 0;
};

} // namespace bradford
