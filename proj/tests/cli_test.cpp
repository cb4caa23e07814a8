#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using namespace bradford;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("bradford_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) { return read_file(p); }

} // namespace

TEST(Cli, SimulateWritesOutputsAndManifest) {
    const auto dir = scratch("simulate");
    const auto r = run({"simulate", "--alpha", "0.1", "--papers", "2000", "--reps", "20", "--seed", "42",
                        "--threads", "2", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"ensemble.json", "frequency.csv", "mean_curve.csv", "run_manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto m = nlohmann::json::parse(slurp(dir / "run_manifest.json"));
    EXPECT_EQ(m.at("command"), "simulate");
    EXPECT_EQ(m.at("master_seed").get<std::uint64_t>(), 42u);
    EXPECT_EQ(m.at("config").at("reps"), 20);
    EXPECT_EQ(m.at("config").at("entry").at("alpha"), 0.1);
    EXPECT_EQ(m.at("config").at("threads"), 2);
    EXPECT_EQ(m.at("outputs").size(), 4u);

    // same manifest, same outputs, whatever the thread count
    const auto dir2 = scratch("simulate2");
    ASSERT_EQ(run({"simulate", "--alpha", "0.1", "--papers", "2000", "--reps", "20", "--seed", "42", "--threads",
                   "5", "--out", dir2.string()})
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "ensemble.json"), slurp(dir2 / "ensemble.json"));
    EXPECT_EQ(slurp(dir / "mean_curve.csv"), slurp(dir2 / "mean_curve.csv"));
}

TEST(Cli, SimulateRejectsInvalidAlpha) {
    const auto r = run({"simulate", "--alpha", "1.2", "--out", scratch("bad").string()});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("alpha"), std::string::npos);
}

TEST(Cli, SimulateCombinedRegimeAndConfigPrecedence) {
    const auto dir = scratch("combined");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"papers": 1500, "reps": 3, "seed": 7, "gamma": 0.9})";
    }
    const auto r = run({"simulate", "--config", (dir / "cfg.json").string(), "--alpha-start", "0.3", "--alpha-end",
                        "0.1", "--gamma", "0.95", "--out", (dir / "out").string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = nlohmann::json::parse(slurp(dir / "out" / "run_manifest.json"));
    EXPECT_EQ(m.at("config").at("decay").at("gamma"), 0.95);
    EXPECT_EQ(m.at("config").at("papers"), 1500);
    EXPECT_EQ(m.at("config").at("entry").at("schedule"), "linear");
    EXPECT_TRUE(fs::exists(dir / "out" / "frequency.json"));
}

TEST(Cli, AnalyticShapes) {
    const auto dir = scratch("analytic");
    auto r = run({"analytic", "--alpha", "0.1", "--papers", "10000", "--out", dir.string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("X1").get<double>(), 4167.565, 0.01);
    EXPECT_EQ(j.at("T0_int"), 26);
    EXPECT_NEAR(j.at("A0").get<double>(), 7254.8, 0.1);
    EXPECT_EQ(j.at("shape"), "CONCAVE_DOWN");
    EXPECT_TRUE(fs::exists(dir / "curve.json"));

    r = run({"analytic", "--alpha", "0.4", "--papers", "10000", "--out", dir.string()});
    EXPECT_NE(r.out.find("shape,J\n"), std::string::npos);
    r = run({"analytic", "--alpha", "0.25", "--papers", "10000", "--out", dir.string()});
    EXPECT_NE(r.out.find("shape,REVERSED_S\n"), std::string::npos);
    const auto samples = parse_curve_csv(slurp(dir / "curve.csv"));
    EXPECT_EQ(samples.size(), 2500u);

    r = run({"analytic", "--alpha", "1.5", "--papers", "10000", "--out", dir.string()});
    EXPECT_EQ(r.code, cli::kModelError);
}

TEST(Cli, Classify) {
    auto r = run({"classify", "--k", "1.5", "--b", "0.01", "--t0", "30"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("shape,REVERSED_S"), std::string::npos);
    r = run({"classify", "--k", "0.5", "--b", "0.01", "--t0", "200"});
    EXPECT_NE(r.out.find("shape,S\n"), std::string::npos);
    r = run({"classify", "--alpha", "0.4", "--papers", "10000"});
    EXPECT_NE(r.out.find("shape,J\n"), std::string::npos);
    r = run({"classify", "--k", "1"});
    EXPECT_EQ(r.code, cli::kUsage);
}

TEST(Cli, ForecastFromSimulatedSnapshots) {
    const auto dir = scratch("forecast");
    ASSERT_EQ(run({"simulate", "--alpha", "0.1", "--papers", "10000", "--seed", "3", "--snapshots", "6", "--out",
                   (dir / "sim").string()})
                  .code,
              0);
    auto r = run({"forecast", "--manifest", (dir / "sim" / "history.csv").string(), "--t-star", "6", "--out",
                  (dir / "fc").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto f = nlohmann::json::parse(slurp(dir / "fc" / "forecast.json"));
    const double a_star = f.at("predicted").at("A").get<double>();
    const auto samples = parse_curve_csv(slurp(dir / "fc" / "forecast_curve.csv"));
    EXPECT_LT(std::abs(samples.back().cumulative - a_star) / a_star, 0.005);
    EXPECT_FALSE(f.at("extrapolated").get<bool>());
    const auto model = nlohmann::json::parse(slurp(dir / "fc" / "model.json"));
    EXPECT_EQ(model.at("snapshots").size(), 6u);
    EXPECT_EQ(model.at("zone_split_rule"), std::string(kZoneSplitRule));
    const auto m = nlohmann::json::parse(slurp(dir / "fc" / "run_manifest.json"));
    EXPECT_EQ(m.at("inputs").size(), 7u);

    r = run({"forecast", "--manifest", (dir / "sim" / "history.csv").string(), "--t-star", "9", "--out",
             (dir / "fc2").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "fc2" / "forecast.json")).at("extrapolated").get<bool>());
    EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, ForecastNeedsThreeSnapshots) {
    const auto dir = scratch("forecast_short");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "a.csv") << "rank,articles\n1,20\n2,5\n3,1\n";
        std::ofstream(dir / "b.csv") << "rank,articles\n1,40\n2,9\n3,2\n4,1\n";
        std::ofstream(dir / "h.csv") << "t,path\n1,a.csv\n2,b.csv\n";
    }
    const auto r = run({"forecast", "--manifest", (dir / "h.csv").string(), "--t-star", "2", "--out",
                        (dir / "out").string()});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("at least 3"), std::string::npos);
}

TEST(Cli, IngestCheck) {
    const auto dir = scratch("ingest");
    fs::create_directories(dir);
    std::ofstream(dir / "ok.csv") << "n,count\n1,300\n2,80\n10,2\n";
    std::ofstream(dir / "bad.csv") << "rank,articles\n1,5\n2,0\n";
    auto r = run({"ingest-check", (dir / "ok.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(",480,382,"), std::string::npos);
    r = run({"ingest-check", (dir / "bad.csv").string()});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("bad.csv"), std::string::npos);
    r = run({"ingest-check", (dir / "missing.csv").string()});
    EXPECT_EQ(r.code, cli::kFailure);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(run({"analytic", "--alpha", "0.1"}).code, cli::kUsage);
    EXPECT_EQ(run({"simulate", "--format", "xml"}).code, cli::kUsage);
    EXPECT_EQ(run({"--help"}).code, 0);
}
