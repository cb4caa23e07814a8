#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// same code path as the installed binary.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bradford/bradford.hpp"

#ifndef BRADFORD_VERSION
#define BRADFORD_VERSION "dev"
#endif

namespace bradford::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,        ///< I/O or unexpected runtime failure
    kUsage = 2,          ///< bad flags or invalid configuration
    kDataError = 3,      ///< unreadable input or too little data
    kModelError = 4,     ///< parameters outside a closed form's domain
};

enum class Format { Csv, Json };

/// Tracks every file a command writes and every input it read, then emits
/// run_manifest.json next to the outputs.
class RunRecorder {
public:
    RunRecorder(std::string command, fs::path out_dir) : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

    void set_config(json config) { config_ = std::move(config); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    void add_input(const fs::path& path, std::uint32_t checksum) {
        inputs_.push_back({{"path", path.string()}, {"crc32", checksum_hex(checksum)}});
    }

    fs::path write(const std::string& name, const std::string& content) {
        fs::create_directories(out_dir_);
        const fs::path path = out_dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + path.string());
        outputs_.push_back(path.string());
        return path;
    }

    void finish() {
        json m = {{"command", command_},
                  {"version", BRADFORD_VERSION},
                  {"config", config_},
                  {"inputs", inputs_},
                  {"outputs", outputs_}};
        if (seed_) m["master_seed"] = *seed_;
        outputs_.push_back((out_dir_ / "run_manifest.json").string());
        m["outputs"] = outputs_;
        fs::create_directories(out_dir_);
        std::ofstream out(out_dir_ / "run_manifest.json");
        out << m.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write run manifest in " + out_dir_.string());
    }

private:
    std::string command_;
    fs::path out_dir_;
    json config_ = json::object();
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
    std::optional<std::uint64_t> seed_;
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Summary lines as `key,value` or as one JSON object.
inline void print_summary(std::ostream& out, const std::vector<std::pair<std::string, json>>& rows, Format format) {
    if (format == Format::Json) {
        json j = json::object();
        for (const auto& [k, v] : rows) j[k] = v;
        out << dump(j);
        return;
    }
    out << "key,value\n";
    for (const auto& [k, v] : rows) {
        if (v.is_number_float()) {
            out << k << ',' << format_double(v.get<double>()) << '\n';
        } else if (v.is_string()) {
            out << k << ',' << v.get<std::string>() << '\n';
        } else {
            out << k << ',' << v.dump() << '\n';
        }
    }
}

inline std::string curve_table(const CurveModel& curve, Format format) {
    std::ostringstream s;
    if (format == Format::Csv) {
        write_curve_csv(s, curve.samples);
    } else {
        s << dump(to_json(curve));
    }
    return s.str();
}

inline const char* ext(Format f) { return f == Format::Csv ? "csv" : "json"; }

struct SimulateOptions {
    std::optional<double> alpha, alpha_start, alpha_end;
    std::optional<double> gamma, gamma_start, gamma_end;
    std::optional<std::int64_t> papers, reps;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> zone_boundary;
    std::string config_path;
    int snapshots = 0;
};

/// Defaults, then the config file, then flags.
inline SimConfig resolve_sim_config(const SimulateOptions& o) {
    json file = json::object();
    if (!o.config_path.empty()) {
        try {
            file = json::parse(read_file(o.config_path));
        } catch (const json::parse_error& e) {
            throw ParseError(o.config_path, 0, e.what());
        }
    }
    const auto pick = [&](const auto& flag, const char* key) {
        using T = typename std::decay_t<decltype(flag)>::value_type;
        if (flag) return std::optional<T>(*flag);
        if (file.contains(key)) return std::optional<T>(file.at(key).get<T>());
        return std::optional<T>();
    };
    SimConfig c;
    const auto alpha = pick(o.alpha, "alpha");
    const auto a_start = pick(o.alpha_start, "alpha_start");
    const auto a_end = pick(o.alpha_end, "alpha_end");
    if (a_start || a_end) {
        if (!a_start || !a_end) throw ValidationError("alpha_start: alpha_start and alpha_end must be given together");
        if (alpha) throw ValidationError("alpha: cannot combine a constant alpha with alpha_start/alpha_end");
        c.entry = LinearEntry{*a_start, *a_end};
    } else {
        c.entry = ConstantEntry{alpha.value_or(0.1)};
    }
    const auto gamma = pick(o.gamma, "gamma");
    const auto g_start = pick(o.gamma_start, "gamma_start");
    const auto g_end = pick(o.gamma_end, "gamma_end");
    if (g_start || g_end) {
        if (!g_start || !g_end) throw ValidationError("gamma_start: gamma_start and gamma_end must be given together");
        if (gamma) throw ValidationError("gamma: cannot combine a constant gamma with gamma_start/gamma_end");
        c.decay = LinearDecay{*g_start, *g_end};
    } else {
        c.decay = ConstantDecay{gamma.value_or(1.0)};
    }
    c.target_papers = pick(o.papers, "papers").value_or(10000);
    c.replications = pick(o.reps, "reps").value_or(1);
    c.master_seed = pick(o.seed, "seed").value_or(0);
    c.threads = pick(o.threads, "threads").value_or(1);
    c.zone_boundary = pick(o.zone_boundary, "zone_boundary");
    c.validate();
    return c;
}

inline json to_json(const SimConfig& c) {
    json j;
    if (const auto* e = std::get_if<ConstantEntry>(&c.entry)) {
        j["entry"] = {{"schedule", "constant"}, {"alpha", e->alpha}};
    } else {
        const auto& l = std::get<LinearEntry>(c.entry);
        j["entry"] = {{"schedule", "linear"}, {"alpha_start", l.alpha_start}, {"alpha_end", l.alpha_end}};
    }
    if (const auto* d = std::get_if<ConstantDecay>(&c.decay)) {
        j["decay"] = {{"schedule", "constant"}, {"gamma", d->gamma}};
    } else {
        const auto& l = std::get<LinearDecay>(c.decay);
        j["decay"] = {{"schedule", "linear"}, {"gamma_start", l.gamma_start}, {"gamma_end", l.gamma_end}};
    }
    j["papers"] = c.target_papers;
    j["reps"] = c.replications;
    j["seed"] = c.master_seed;
    j["threads"] = c.threads;
    j["zone_boundary"] = c.resolved_zone_boundary();
    return j;
}

inline int cmd_simulate(const SimulateOptions& o, const fs::path& out_dir, Format format, std::ostream& out) {
    const SimConfig config = resolve_sim_config(o);
    if (o.snapshots < 0 || (o.snapshots > 0 && o.snapshots > config.target_papers)) {
        throw ValidationError("snapshots: must lie in [0, papers]");
    }
    RunRecorder rec("simulate", out_dir);
    json resolved = to_json(config);
    resolved["snapshots"] = o.snapshots;
    resolved["format"] = ext(format);
    rec.set_config(resolved);
    rec.set_seed(config.master_seed);

    const EnsembleResult e = run_ensemble(config);
    rec.write("ensemble.json", dump(to_json(e)));
    if (format == Format::Csv) {
        std::ostringstream f, c;
        write_frequency_csv(f, e.mean_frequency);
        write_mean_curve_csv(c, e);
        rec.write("frequency.csv", f.str());
        rec.write("mean_curve.csv", c.str());
    } else {
        rec.write("frequency.json", dump(to_json(e.mean_frequency)));
        rec.write("mean_curve.json", dump(json(e.mean_cumulative)));
    }

    if (o.snapshots > 0) {
        // one replication observed at increasing paper totals
        const auto cps = logistic_checkpoints(config.target_papers, o.snapshots);
        const auto snaps = run_replication_checkpoints(config, replication_seed(config.master_seed, 0), cps);
        std::ostringstream manifest;
        manifest << "t,path\n";
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            std::ostringstream s;
            write_ranked_csv(s, snaps[i]);
            const std::string name = "snapshot_" + std::to_string(i + 1) + ".csv";
            rec.write(name, s.str());
            manifest << (i + 1) << ',' << name << '\n';
        }
        rec.write("history.csv", manifest.str());
    }
    rec.finish();

    print_summary(out,
                  {{"replications", e.replications},
                   {"zone_boundary", e.zone_boundary},
                   {"mean_T", e.T.mean},
                   {"mean_T0", e.T0.mean},
                   {"mean_A0", e.A0.mean},
                   {"mean_X1", e.X1.mean},
                   {"empty_core_replications", e.empty_core_replications}},
                  format);
    return kOk;
}

inline std::vector<std::pair<std::string, json>> curve_summary(const CurveModel& c) {
    const auto& z = c.zone_params;
    return {{"alpha", z.alpha}, {"rho", z.rho},     {"y_m", z.y_m},         {"T0", z.T0},
            {"T0_int", z.T0_int}, {"A0", z.A0},     {"X1", z.X1},           {"k", z.k},
            {"a", c.egghe.a},   {"b", c.egghe.b},   {"bT0", c.egghe.b * z.T0}, {"T", c.T},
            {"A", c.A},         {"shape", to_string(c.shape.kind)}};
}

inline int cmd_analytic(double alpha, double papers, std::optional<double> journals, const fs::path& out_dir,
                        Format format, std::ostream& out) {
    const EntryRate rate(alpha);
    if (!(papers >= 1.0)) throw DomainError("papers must be >= 1");
    const double t = journals.value_or(alpha * papers);
    const auto curve = assemble_curve(analytic_zone_params(papers, rate), t, papers);

    RunRecorder rec("analytic", out_dir);
    rec.set_config({{"alpha", alpha}, {"papers", papers}, {"journals", t}, {"format", ext(format)}});
    rec.write(std::string("curve.") + ext(format), curve_table(curve, format));
    rec.write("analytic.json", dump(to_json(curve, false)));
    rec.finish();
    print_summary(out, curve_summary(curve), format);
    return kOk;
}

struct ClassifyOptions {
    std::optional<double> k, b, t0;
    std::optional<double> alpha, papers;
};

inline int cmd_classify(const ClassifyOptions& o, Format format, std::ostream& out) {
    ZoneParams zone;
    EggheParams egghe;
    if (o.k || o.b || o.t0) {
        if (!o.k || !o.b || !o.t0) throw ValidationError("k: --k, --b and --t0 must be given together");
        zone.k = *o.k;
        egghe.b = *o.b;
        zone.T0 = *o.t0;
    } else if (o.alpha && o.papers) {
        const auto curve = assemble_curve(analytic_zone_params(*o.papers, EntryRate(*o.alpha)), *o.alpha * *o.papers,
                                          *o.papers);
        zone = curve.zone_params;
        egghe = curve.egghe;
    } else {
        throw ValidationError("classify: give either --k/--b/--t0 or --alpha/--papers");
    }
    const auto signs = curvature_signs(zone, egghe);
    const auto shape = classify(signs);
    print_summary(out,
                  {{"k", zone.k},
                   {"bT0", egghe.b * zone.T0},
                   {"core_sign", static_cast<int>(signs.core)},
                   {"normal_sign", static_cast<int>(signs.normal)},
                   {"shape", to_string(shape.kind)}},
                  format);
    return kOk;
}

inline std::vector<Snapshot> load_history(const fs::path& manifest, RunRecorder* rec) {
    const auto entries = read_history_manifest(manifest);
    std::vector<Snapshot> snaps;
    for (const auto& e : entries) {
        auto s = analyze_snapshot(ingest_snapshot(e.path, e.t));
        if (rec) rec->add_input(e.path, s.checksum);
        snaps.push_back(std::move(s));
    }
    return snaps;
}

inline int cmd_forecast(const fs::path& manifest, double t_star, const fs::path& out_dir, Format format,
                        std::ostream& out, std::ostream& err) {
    RunRecorder rec("forecast", out_dir);
    rec.set_config({{"manifest", manifest.string()}, {"t_star", t_star}, {"format", ext(format)}});
    rec.add_input(manifest, crc32(read_file(manifest)));
    auto snaps = load_history(manifest, &rec);
    const auto history = build_history(std::move(snaps));
    const auto f = forecast(history, t_star);

    rec.write("model.json", dump(to_json(history)));
    rec.write("forecast.json", dump(to_json(f)));
    rec.write(std::string("forecast_curve.") + ext(format), curve_table(f.curve, format));
    rec.finish();
    for (const auto& w : history.warnings) err << "warning: " << w << '\n';
    for (const auto& w : f.warnings) err << "warning: " << w << '\n';

    auto rows = curve_summary(f.curve);
    rows.insert(rows.begin(), {"t_star", t_star});
    rows.push_back({"extrapolated", f.extrapolated});
    print_summary(out, rows, format);
    return kOk;
}

inline int cmd_ingest_check(const std::vector<std::string>& inputs, Format format, std::ostream& out) {
    json report = json::array();
    for (const auto& path : inputs) {
        const auto s = analyze_snapshot(ingest_snapshot(path, 0.0));
        const auto& d = *s.derived;
        json j = to_json(d);
        j["path"] = path;
        j["crc32"] = checksum_hex(s.checksum);
        report.push_back(std::move(j));
    }
    if (format == Format::Json) {
        out << dump(report);
    } else {
        out << "path,crc32,A,T,alpha_hat,rho_hat,y_m,T0,A0,X1,empty_core\n";
        for (const auto& j : report) {
            out << j["path"].get<std::string>() << ',' << j["crc32"].get<std::string>();
            for (const char* k : {"A", "T", "alpha_hat", "rho_hat", "y_m", "T0", "A0", "X1"}) {
                out << ',' << format_double(j[k].get<double>());
            }
            out << ',' << (j["empty_core"].get<bool>() ? "true" : "false") << '\n';
        }
    }
    return kOk;
}

/// Parse `args` (without the program name) and run the selected command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bradford curve dynamics: simulate, evaluate, classify and forecast"};
    app.set_version_flag("--version", std::string(BRADFORD_VERSION));
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string format_name = "csv";
    const auto add_common = [&](CLI::App* sub, bool writes_files) {
        if (writes_files) sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--format", format_name, "Table format")->check(CLI::IsMember({"csv", "json"}));
    };

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble of the Simon-Yule process");
    simulate->add_option("--alpha", sim.alpha, "Constant entry rate");
    simulate->add_option("--alpha-start", sim.alpha_start, "Linear entry rate at the first paper");
    simulate->add_option("--alpha-end", sim.alpha_end, "Linear entry rate at the last paper");
    simulate->add_option("--gamma", sim.gamma, "Constant decay rate");
    simulate->add_option("--gamma-start", sim.gamma_start, "Linear decay rate at the first paper");
    simulate->add_option("--gamma-end", sim.gamma_end, "Linear decay rate at the last paper");
    simulate->add_option("--papers", sim.papers, "Papers per replication");
    simulate->add_option("--reps", sim.reps, "Replications");
    simulate->add_option("--seed", sim.seed, "Master seed (64-bit)");
    simulate->add_option("--threads", sim.threads, "Worker threads");
    simulate->add_option("--zone-boundary", sim.zone_boundary, "Core boundary productivity");
    simulate->add_option("--config", sim.config_path, "JSON config; flags take precedence");
    simulate->add_option("--snapshots", sim.snapshots, "Also write this many snapshots of replication 0");
    add_common(simulate, true);

    double alpha = 0.1, papers = 1e4;
    std::optional<double> journals;
    auto* analytic = app.add_subcommand("analytic", "Closed-form zone parameters and curve");
    analytic->add_option("--alpha", alpha, "Entry rate")->required();
    analytic->add_option("--papers", papers, "Total papers")->required();
    analytic->add_option("--journals", journals, "Total journals (default alpha * papers)");
    add_common(analytic, true);

    ClassifyOptions cls;
    auto* classify_cmd = app.add_subcommand("classify", "Shape class from curvature conditions");
    classify_cmd->add_option("--k", cls.k, "Core ratio slope");
    classify_cmd->add_option("--b", cls.b, "Egghe b");
    classify_cmd->add_option("--t0", cls.t0, "Core journal count");
    classify_cmd->add_option("--alpha", cls.alpha, "Entry rate (analytic parameters)");
    classify_cmd->add_option("--papers", cls.papers, "Total papers (analytic parameters)");
    add_common(classify_cmd, false);

    std::string manifest;
    double t_star = 0.0;
    auto* forecast_cmd = app.add_subcommand("forecast", "Fit a snapshot history and forecast the curve");
    forecast_cmd->add_option("--manifest", manifest, "History manifest (t,path)")->required();
    forecast_cmd->add_option("--t-star", t_star, "Forecast time")->required();
    add_common(forecast_cmd, true);

    std::vector<std::string> inputs;
    auto* ingest = app.add_subcommand("ingest-check", "Validate bibliography files and print derived values");
    ingest->add_option("inputs", inputs, "CSV files")->required();
    add_common(ingest, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const Format format = format_name == "json" ? Format::Json : Format::Csv;
    try {
        if (*simulate) return cmd_simulate(sim, out_dir, format, out);
        if (*analytic) return cmd_analytic(alpha, papers, journals, out_dir, format, out);
        if (*classify_cmd) return cmd_classify(cls, format, out);
        if (*forecast_cmd) return cmd_forecast(manifest, t_star, out_dir, format, out, err);
        if (*ingest) return cmd_ingest_check(inputs, format, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kModelError;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return kModelError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

} // namespace bradford::cli
