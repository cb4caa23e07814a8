#pragma once

// Forecasting Bradford curves from a time series of bibliography snapshots:
// logistic growth of A(t), the journal-count law T(A), log-log laws for the
// core anchors T0, A0, X1 against A, and curve assembly at the target time.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/crc.hpp>

#include "bradford/curve.hpp"
#include "bradford/errors.hpp"
#include "bradford/fit.hpp"
#include "bradford/model.hpp"
#include "bradford/sim.hpp"

namespace bradford {

/// Identifier of the rule deciding core membership on observed data.
inline constexpr std::string_view kZoneSplitRule = "productivity>ym_analytic(A,rho(T/A))";

struct SnapshotDerived {
    double A = 0.0;
    double T = 0.0;
    double alpha_hat = 0.0;
    double rho_hat = 0.0;
    double y_m = 0.0;
    double T0 = 0.0;
    double A0 = 0.0;
    double X1 = 0.0;
    bool empty_core = false;
};

struct Snapshot {
    double t = 0.0;
    RankedBibliography ranked;
    std::optional<SnapshotDerived> derived;
    std::string source;
    std::uint32_t checksum = 0;

    /// Snapshot known only through its totals and core anchors (e.g. a
    /// history generated from the closed forms).
    static Snapshot from_derived(double t, const SnapshotDerived& d, std::string source = "synthetic") {
        Snapshot s;
        s.t = t;
        s.derived = d;
        s.source = std::move(source);
        return s;
    }
};

inline std::uint32_t crc32(std::string_view bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_number(std::string_view field, const std::string& source, std::size_t line) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end || field.empty()) {
        throw ParseError(source, line, "not a number: '" + std::string(field) + "'");
    }
    return v;
}

inline std::int64_t parse_integer(std::string_view field, const std::string& source, std::size_t line,
                                  std::int64_t minimum, const char* column) {
    const double v = parse_number(field, source, line);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
        throw ValidationError(source + ":" + std::to_string(line) + ": " + column + " must be an integer, got " +
                              std::string(field));
    }
    const auto i = static_cast<std::int64_t>(v);
    if (i < minimum) {
        throw ValidationError(source + ":" + std::to_string(line) + ": " + column + " must be >= " +
                              std::to_string(minimum) + ", got " + std::string(field));
    }
    return i;
}

} // namespace detail

/// Parse a bibliography table. Accepted headers: `n,count` (journals per
/// productivity level) or `rank,articles` (papers per ranked journal).
inline Snapshot parse_snapshot(std::string_view text, double t, const std::string& source = "<input>") {
    std::vector<std::int64_t> sizes;
    std::vector<std::int64_t> ranks_seen;
    enum class Schema { Unknown, Frequency, Ranked } schema = Schema::Unknown;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (schema == Schema::Unknown) {
            if (fields.size() == 2 && fields[0] == "n" && fields[1] == "count") {
                schema = Schema::Frequency;
            } else if (fields.size() == 2 && fields[0] == "rank" && fields[1] == "articles") {
                schema = Schema::Ranked;
            } else {
                throw ParseError(source, line_no, "expected header 'n,count' or 'rank,articles'");
            }
            continue;
        }
        if (fields.size() != 2) {
            throw ParseError(source, line_no, "expected 2 columns, got " + std::to_string(fields.size()));
        }
        if (schema == Schema::Frequency) {
            const auto n = detail::parse_integer(fields[0], source, line_no, 1, "n");
            const auto count = detail::parse_integer(fields[1], source, line_no, 0, "count");
            sizes.insert(sizes.end(), static_cast<std::size_t>(count), n);
        } else {
            ranks_seen.push_back(detail::parse_integer(fields[0], source, line_no, 1, "rank"));
            sizes.push_back(detail::parse_integer(fields[1], source, line_no, 1, "articles"));
        }
    }
    if (schema == Schema::Unknown) {
        throw ParseError(source, line_no, "empty file");
    }
    std::sort(ranks_seen.begin(), ranks_seen.end());
    if (std::adjacent_find(ranks_seen.begin(), ranks_seen.end()) != ranks_seen.end()) {
        throw ValidationError(source + ": duplicate rank");
    }
    if (sizes.empty()) {
        throw ValidationError(source + ": bibliography has no journals");
    }
    Snapshot s;
    s.t = t;
    s.ranked = RankedBibliography(std::move(sizes));
    s.source = source;
    s.checksum = crc32(text);
    return s;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Snapshot ingest_snapshot(const std::filesystem::path& path, double t) {
    return parse_snapshot(read_file(path), t, path.string());
}

/// Fill derived fields: alpha_hat = T/A, y_m from the closed form at
/// rho(alpha_hat), core split on productivity > y_m. An empty core is
/// recorded rather than thrown.
inline Snapshot analyze_snapshot(Snapshot s) {
    if (s.ranked.empty()) {
        throw ValidationError("snapshot " + s.source + " has no journals");
    }
    SnapshotDerived d;
    d.A = static_cast<double>(s.ranked.papers());
    d.T = static_cast<double>(s.ranked.journals());
    d.alpha_hat = d.T / d.A;
    if (!(d.alpha_hat < 1.0)) {
        throw DomainError("snapshot " + s.source + ": every journal has one paper, entry rate T/A = 1 leaves rho undefined");
    }
    const RhoExponent rho = rho_from_alpha(EntryRate(d.alpha_hat));
    d.rho_hat = rho.value();
    d.y_m = ym_analytic(d.A, rho);
    d.X1 = static_cast<double>(s.ranked.at_rank(1));
    try {
        const ZoneSplit split = empirical_zone_split(s.ranked, std::max(1.0, d.y_m));
        d.T0 = static_cast<double>(split.T0);
        d.A0 = static_cast<double>(split.A0);
    } catch (const EmptyCoreError&) {
        d.empty_core = true;
    }
    s.derived = d;
    return s;
}

struct HistoryEntry {
    double t = 0.0;
    std::filesystem::path path;
};

/// History manifest: header `t,path`, one snapshot per row; relative paths
/// resolve against the manifest's directory.
inline std::vector<HistoryEntry> parse_history_manifest(std::string_view text, const std::filesystem::path& base,
                                                        const std::string& source = "<manifest>") {
    std::vector<HistoryEntry> out;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (!header) {
            if (fields.size() != 2 || fields[0] != "t" || fields[1] != "path") {
                throw ParseError(source, line_no, "expected header 't,path'");
            }
            header = true;
            continue;
        }
        if (fields.size() != 2 || fields[1].empty()) {
            throw ParseError(source, line_no, "expected 't,path'");
        }
        std::filesystem::path p{std::string(fields[1])};
        if (p.is_relative()) p = base / p;
        out.push_back({detail::parse_number(fields[0], source, line_no), p});
    }
    return out;
}

inline std::vector<HistoryEntry> read_history_manifest(const std::filesystem::path& path) {
    return parse_history_manifest(read_file(path), path.parent_path(), path.string());
}

struct HistorySeries {
    std::vector<Snapshot> snapshots;
    LogisticFit growth;
    EntryRateFit entry;
    bool entry_linear = false;  ///< constant-rate fallback selected
    LogLogFit t0_fit;
    LogLogFit a0_fit;
    LogLogFit x1_fit;
    double t_min = 0.0;
    double t_max = 0.0;
    double A_min = 0.0;
    double A_max = 0.0;
    std::vector<std::string> warnings;
};

/// Quadratic curvature below this fraction of the linear term over the data
/// range selects the constant-rate law.
inline constexpr double kQuadraticNegligible = 0.01;

inline HistorySeries build_history(std::vector<Snapshot> snapshots) {
    if (snapshots.size() < 3) {
        throw InsufficientDataError("logistic growth fit needs at least 3 snapshots, got " +
                                    std::to_string(snapshots.size()));
    }
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (!snapshots[i].derived) {
            throw ValidationError("snapshot " + snapshots[i].source + " has not been analyzed");
        }
        if (i > 0) {
            if (!(snapshots[i].t > snapshots[i - 1].t)) {
                throw ValidationError("snapshot times must be strictly increasing");
            }
            if (snapshots[i].derived->A < snapshots[i - 1].derived->A) {
                throw ValidationError("paper totals must not decrease over time");
            }
        }
    }

    HistorySeries h;
    std::vector<Point> growth, entry, t0, a0, x1;
    for (const auto& s : snapshots) {
        const auto& d = *s.derived;
        growth.push_back({s.t, d.A});
        entry.push_back({d.A, d.T});
        if (!d.empty_core && d.T0 > 0.0) {
            t0.push_back({d.A, d.T0});
            a0.push_back({d.A, d.A0});
            x1.push_back({d.A, d.X1});
        } else {
            h.warnings.push_back("snapshot " + s.source + " has an empty core and is excluded from the log-log fits");
        }
    }
    h.t_min = snapshots.front().t;
    h.t_max = snapshots.back().t;
    h.A_min = snapshots.front().derived->A;
    h.A_max = snapshots.back().derived->A;

    h.growth = fit_logistic(growth);
    if (!h.growth.converged) {
        h.warnings.push_back("logistic growth fit did not converge; using best parameters found");
    }

    // model selection between T = alpha A and T = c1 A + c2 A^2
    {
        detail::require_distinct_positive_x(entry, "quadratic entry fit");
        double scale = 0.0;
        for (const auto& p : entry) scale = std::max(scale, p.x);
        Eigen::MatrixXd design(static_cast<Eigen::Index>(entry.size()), 2);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(entry.size()));
        for (std::size_t i = 0; i < entry.size(); ++i) {
            const double u = entry[i].x / scale;
            design(static_cast<Eigen::Index>(i), 0) = u;
            design(static_cast<Eigen::Index>(i), 1) = u * u;
            rhs(static_cast<Eigen::Index>(i)) = entry[i].y;
        }
        const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
        // in scaled units c1 A_f -> coef(0), c2 A_f^2 -> coef(1)
        if (std::abs(coef(1)) < kQuadraticNegligible * std::abs(coef(0))) {
            h.entry = fit_entry_linear(entry);
            h.entry_linear = true;
        } else {
            try {
                h.entry = fit_entry_quadratic(entry);
            } catch (const InfeasibleError& e) {
                h.warnings.push_back(std::string(e.what()) + "; falling back to T = alpha A");
                h.entry = fit_entry_linear(entry);
                h.entry_linear = true;
            }
        }
    }

    const auto loglog = [](const std::vector<Point>& pts, const char* name) {
        try {
            return fit_loglog(pts);
        } catch (const InsufficientDataError&) {
            throw InsufficientDataError(std::string("log-log fit of ") + name +
                                        " needs at least 2 snapshots with a non-empty core at distinct A");
        }
    };
    h.t0_fit = loglog(t0, "T0");
    h.a0_fit = loglog(a0, "A0");
    h.x1_fit = loglog(x1, "X1");
    h.snapshots = std::move(snapshots);
    return h;
}

struct ForecastValues {
    double A = 0.0;
    double T = 0.0;
    double alpha = 0.0;
    double T0 = 0.0;
    double A0 = 0.0;
    double X1 = 0.0;
};

struct Forecast {
    double t_star = 0.0;
    ForecastValues predicted;
    CurveModel curve;
    bool extrapolated = false;
    std::vector<std::string> warnings;
};

/// Forecasts are flagged as extrapolated outside the observed time span or
/// beyond this factor of the observed paper range.
inline constexpr double kExtrapolationFactor = 1.5;

/// Predicted totals and core anchors at t_star, clamped, without the curve.
inline Forecast predict(const HistorySeries& history, double t_star) {
    Forecast f;
    f.t_star = t_star;
    auto& p = f.predicted;
    p.A = history.growth(t_star);
    p.T = history.entry.journals_at(p.A);
    if (!(p.A > 0.0) || !std::isfinite(p.A)) {
        throw InfeasibleError("predicted paper total is not positive");
    }
    p.alpha = p.T / p.A;
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) {
        throw InfeasibleError("predicted entry rate T/A = " + std::to_string(p.alpha) + " outside (0, 1)");
    }
    p.T0 = history.t0_fit.predict(p.A);
    p.A0 = history.a0_fit.predict(p.A);
    p.X1 = history.x1_fit.predict(p.A);
    if (p.T0 > p.T) {
        f.warnings.push_back("clamped T0 " + std::to_string(p.T0) + " to T " + std::to_string(p.T));
        p.T0 = p.T;
    }
    if (p.A0 > p.A) {
        f.warnings.push_back("clamped A0 " + std::to_string(p.A0) + " to A " + std::to_string(p.A));
        p.A0 = p.A;
    }
    if (p.X1 > p.A0) {
        f.warnings.push_back("clamped X1 " + std::to_string(p.X1) + " to A0 " + std::to_string(p.A0));
        p.X1 = p.A0;
    }

    f.extrapolated = t_star < history.t_min || t_star > history.t_max ||
                     p.A > kExtrapolationFactor * history.A_max || p.A < history.A_min / kExtrapolationFactor;
    if (f.extrapolated) {
        f.warnings.push_back("forecast lies outside the observed range");
    }
    return f;
}

/// Forecast the Bradford curve at t_star: predict, clamp, assemble.
inline Forecast forecast(const HistorySeries& history, double t_star) {
    Forecast f = predict(history, t_star);
    const auto& p = f.predicted;
    ZoneParams zone;
    zone.alpha = p.alpha;
    zone.rho = 1.0 / (1.0 - p.alpha);
    zone.y_m = ym_analytic(p.A, RhoExponent(zone.rho));
    zone.T0 = p.T0;
    zone.T0_int = core_journal_count(p.T0);
    zone.A0 = p.A0;
    zone.X1 = p.X1;
    f.curve = assemble_curve(zone, p.T, p.A);
    return f;
}

} // namespace bradford
