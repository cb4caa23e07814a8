#pragma once

// CSV and JSON encodings of curves, frequency tables, ensembles, fits and
// forecasts. Doubles are written in shortest round-trip form so reading a
// file back reproduces the in-memory values exactly.

#include <charconv>
#include <cstdio>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "bradford/curve.hpp"
#include "bradford/fit.hpp"
#include "bradford/model.hpp"
#include "bradford/pipeline.hpp"
#include "bradford/sim.hpp"

namespace bradford {

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return {buf, ptr};
}

inline void write_curve_csv(std::ostream& out, std::span<const CurveSample> samples) {
    out << "r,R,zone\n";
    for (const auto& s : samples) {
        out << s.rank << ',' << format_double(s.cumulative) << ',' << to_string(s.zone) << '\n';
    }
}

inline std::vector<CurveSample> parse_curve_csv(std::string_view text, const std::string& source = "<curve>") {
    std::vector<CurveSample> out;
    std::size_t line_no = 0, pos = 0;
    bool header = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (!header) {
            if (f.size() != 3 || f[0] != "r" || f[1] != "R" || f[2] != "zone") {
                throw ParseError(source, line_no, "expected header 'r,R,zone'");
            }
            header = true;
            continue;
        }
        if (f.size() != 3) throw ParseError(source, line_no, "expected 3 columns");
        CurveSample s;
        s.rank = detail::parse_integer(f[0], source, line_no, 1, "r");
        s.cumulative = detail::parse_number(f[1], source, line_no);
        if (f[2] == "core") {
            s.zone = Zone::Core;
        } else if (f[2] == "normal") {
            s.zone = Zone::Normal;
        } else {
            throw ParseError(source, line_no, "zone must be 'core' or 'normal'");
        }
        out.push_back(s);
    }
    return out;
}

/// `n,count`; counts may be fractional for ensemble means.
inline void write_frequency_csv(std::ostream& out, const FrequencyTable& table) {
    out << "n,count\n";
    for (const auto& [n, c] : table.entries()) out << n << ',' << format_double(c) << '\n';
}

inline FrequencyTable parse_frequency_csv(std::string_view text, const std::string& source = "<frequency>") {
    FrequencyTable table;
    std::size_t line_no = 0, pos = 0;
    bool header = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (!header) {
            if (f.size() != 2 || f[0] != "n" || f[1] != "count") throw ParseError(source, line_no, "expected header 'n,count'");
            header = true;
            continue;
        }
        if (f.size() != 2) throw ParseError(source, line_no, "expected 2 columns");
        table.add(detail::parse_integer(f[0], source, line_no, 1, "n"), detail::parse_number(f[1], source, line_no));
    }
    return table;
}

inline void write_ranked_csv(std::ostream& out, const RankedBibliography& ranked) {
    out << "rank,articles\n";
    std::int64_t r = 0;
    for (const auto s : ranked.sizes()) out << ++r << ',' << s << '\n';
}

/// Mean cumulative curve of an ensemble, `r,R`.
inline void write_mean_curve_csv(std::ostream& out, const EnsembleResult& e) {
    out << "r,R\n";
    for (std::size_t i = 0; i < e.mean_cumulative.size(); ++i) {
        out << (i + 1) << ',' << format_double(e.mean_cumulative[i]) << '\n';
    }
}

using nlohmann::json;

inline json to_json(const FrequencyTable& t) {
    json j = json::array();
    for (const auto& [n, c] : t.entries()) j.push_back({{"n", n}, {"count", c}});
    return j;
}

inline FrequencyTable frequency_from_json(const json& j) {
    FrequencyTable t;
    for (const auto& row : j) t.add(row.at("n").get<std::int64_t>(), row.at("count").get<double>());
    return t;
}

inline json to_json(const ScalarStat& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

inline json to_json(const EnsembleResult& e) {
    json stddev = json::array();
    for (const auto& [n, s] : e.stddev_frequency) stddev.push_back({{"n", n}, {"stddev", s}});
    return {{"replications", e.replications},
            {"zone_boundary", e.zone_boundary},
            {"mean_T", e.T.mean},
            {"mean_T0", e.T0.mean},
            {"mean_A0", e.A0.mean},
            {"mean_X1", e.X1.mean},
            {"stddev_T", e.T.stddev},
            {"stddev_T0", e.T0.stddev},
            {"stddev_A0", e.A0.stddev},
            {"stddev_X1", e.X1.stddev},
            {"empty_core_replications", e.empty_core_replications},
            {"mean_frequency", to_json(e.mean_frequency)},
            {"stddev_frequency", stddev},
            {"mean_ranked", e.mean_ranked},
            {"mean_cumulative", e.mean_cumulative}};
}

inline json to_json(const ZoneParams& z) {
    return {{"alpha", z.alpha}, {"rho", z.rho}, {"y_m", z.y_m}, {"T0", z.T0},
            {"T0_int", z.T0_int}, {"A0", z.A0}, {"X1", z.X1}, {"k", z.k}};
}

inline json to_json(const EggheParams& e) {
    return {{"a", e.a}, {"b", e.b}, {"A1", e.A1}, {"T1", e.T1}, {"y_m", e.y_m}, {"euler_gamma", e.euler_gamma}};
}

inline json to_json(const ShapeClass& s) {
    return {{"class", to_string(s.kind)}, {"core_concave_up", s.core_concave_up}, {"normal_concave_up", s.normal_concave_up}};
}

inline json to_json(const CurveModel& c, bool with_samples = true) {
    json j = {{"zone_params", to_json(c.zone_params)},
              {"egghe", to_json(c.egghe)},
              {"T", c.T},
              {"A", c.A},
              {"shape", to_json(c.shape)}};
    if (with_samples) {
        json s = json::array();
        for (const auto& p : c.samples) s.push_back({{"r", p.rank}, {"R", p.cumulative}, {"zone", to_string(p.zone)}});
        j["samples"] = std::move(s);
    }
    return j;
}

inline json to_json(const LogLogFit& f) {
    return {{"a_rho", f.a_rho}, {"b_rho", f.b_rho}, {"residual_rms", f.residual_rms}};
}

inline LogLogFit loglog_from_json(const json& j) {
    return {j.at("a_rho").get<double>(), j.at("b_rho").get<double>(), j.at("residual_rms").get<double>()};
}

inline json to_json(const EntryRateFit& f) {
    return {{"alpha_s", f.alpha_s}, {"alpha_f", f.alpha_f}, {"alpha_bar", f.alpha_bar()},
            {"A_f", f.A_f}, {"k_lin", f.k_lin}, {"residual_rms", f.residual_rms}};
}

inline EntryRateFit entry_from_json(const json& j) {
    EntryRateFit f;
    f.alpha_s = j.at("alpha_s").get<double>();
    f.alpha_f = j.at("alpha_f").get<double>();
    f.A_f = j.at("A_f").get<double>();
    f.k_lin = j.at("k_lin").get<double>();
    f.residual_rms = j.at("residual_rms").get<double>();
    return f;
}

inline json to_json(const LogisticFit& f) {
    return {{"K", f.K}, {"r", f.r}, {"t0", f.t0}, {"residual_rms", f.residual_rms},
            {"iterations", f.iterations}, {"converged", f.converged}};
}

inline LogisticFit logistic_from_json(const json& j) {
    LogisticFit f;
    f.K = j.at("K").get<double>();
    f.r = j.at("r").get<double>();
    f.t0 = j.at("t0").get<double>();
    f.residual_rms = j.at("residual_rms").get<double>();
    f.iterations = j.at("iterations").get<int>();
    f.converged = j.at("converged").get<bool>();
    return f;
}

inline json to_json(const SnapshotDerived& d) {
    return {{"A", d.A}, {"T", d.T}, {"alpha_hat", d.alpha_hat}, {"rho_hat", d.rho_hat}, {"y_m", d.y_m},
            {"T0", d.T0}, {"A0", d.A0}, {"X1", d.X1}, {"empty_core", d.empty_core}};
}

inline std::string checksum_hex(std::uint32_t c) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", c);
    return buf;
}

/// Fitted-model document: every coefficient, the zone-split rule and the
/// CRC-32 of each ingested file.
inline json to_json(const HistorySeries& h) {
    json snaps = json::array();
    for (const auto& s : h.snapshots) {
        json j = {{"t", s.t}, {"source", s.source}, {"crc32", checksum_hex(s.checksum)}};
        if (s.derived) j["derived"] = to_json(*s.derived);
        snaps.push_back(std::move(j));
    }
    return {{"zone_split_rule", std::string(kZoneSplitRule)},
            {"growth", to_json(h.growth)},
            {"entry", to_json(h.entry)},
            {"entry_model", h.entry_linear ? "linear" : "quadratic"},
            {"T0_fit", to_json(h.t0_fit)},
            {"A0_fit", to_json(h.a0_fit)},
            {"X1_fit", to_json(h.x1_fit)},
            {"observed", {{"t_min", h.t_min}, {"t_max", h.t_max}, {"A_min", h.A_min}, {"A_max", h.A_max}}},
            {"snapshots", snaps},
            {"warnings", h.warnings}};
}

/// Rebuild the fitted part of a history from its JSON document (snapshots
/// keep only their derived values).
inline HistorySeries history_from_json(const json& j) {
    HistorySeries h;
    h.growth = logistic_from_json(j.at("growth"));
    h.entry = entry_from_json(j.at("entry"));
    h.entry_linear = j.at("entry_model").get<std::string>() == "linear";
    h.t0_fit = loglog_from_json(j.at("T0_fit"));
    h.a0_fit = loglog_from_json(j.at("A0_fit"));
    h.x1_fit = loglog_from_json(j.at("X1_fit"));
    const auto& o = j.at("observed");
    h.t_min = o.at("t_min").get<double>();
    h.t_max = o.at("t_max").get<double>();
    h.A_min = o.at("A_min").get<double>();
    h.A_max = o.at("A_max").get<double>();
    h.warnings = j.at("warnings").get<std::vector<std::string>>();
    return h;
}

inline json to_json(const Forecast& f) {
    const auto& p = f.predicted;
    return {{"t_star", f.t_star},
            {"predicted", {{"A", p.A}, {"T", p.T}, {"alpha", p.alpha}, {"T0", p.T0}, {"A0", p.A0}, {"X1", p.X1}}},
            {"extrapolated", f.extrapolated},
            {"shape", to_json(f.curve.shape)},
            {"curve", to_json(f.curve, false)},
            {"warnings", f.warnings}};
}

} // namespace bradford
