#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

using namespace wrpipe;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "wrpipe");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("wrpipe_cli_" + name);
}

}  // namespace

TEST(Cli, SolveConverges) {
    const auto o = invoke({"solve", "--Nx", "63", "--Nt", "16", "--N", "4", "--K", "20"});
    EXPECT_EQ(o.code, cli::kExitOk) << o.err;
    EXPECT_NE(o.out.find("converged=yes"), std::string::npos);
}

TEST(Cli, UnconvergedExitCode) {
    const auto o = invoke({"solve", "--Nx", "63", "--Nt", "16", "--N", "4", "--K", "1", "--tol", "1e-12"});
    EXPECT_EQ(o.code, cli::kExitUnconverged);
}

TEST(Cli, ZeroToleranceForcesK) {
    const auto o = invoke({"solve", "--Nx", "63", "--Nt", "16", "--N", "4", "--K", "2", "--tol", "0"});
    EXPECT_EQ(o.code, cli::kExitOk);
    EXPECT_NE(o.out.find("iterations=2"), std::string::npos);
}

TEST(Cli, SingleSubdomain) {
    EXPECT_EQ(invoke({"solve", "--Nx", "15", "--Nt", "8", "--N", "1"}).code, cli::kExitOk);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(invoke({"solve", "--mode", "pipeline", "--J", "3", "--Nt", "8"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"solve", "--method", "bogus"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"solve", "--theta", "0"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"solve", "--method", "dnwr", "--mode", "pipeline", "--N", "8", "--K", "2", "--J", "4",
                      "--Nt", "16", "--Nx", "63"})
                  .code,
              cli::kExitConfig);
    EXPECT_EQ(invoke({"solve", "--N", "0"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"solve", "--no-such-flag"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({}).code, cli::kExitConfig);
}

TEST(Cli, ValidateRequiresMatchingK) {
    const auto o = invoke({"validate", "--K", "2", "--pipeline-K", "3", "--J", "4", "--Nt", "16", "--Nx", "31"});
    EXPECT_EQ(o.code, cli::kExitConfig);
    EXPECT_NE(o.err.find("K must match"), std::string::npos);
}

TEST(Cli, ValidatePasses) {
    const auto o = invoke({"validate", "--K", "2", "--J", "4", "--N", "3", "--Nt", "16", "--Nx", "31"});
    EXPECT_EQ(o.code, cli::kExitOk) << o.err;
    EXPECT_NE(o.out.find("bitwise=yes PASS"), std::string::npos);
    const auto d = invoke({"validate", "--method", "dnwr", "--K", "2", "--J", "8", "--N", "4", "--Nt", "16",
                           "--Nx", "31"});
    EXPECT_EQ(d.code, cli::kExitOk) << d.err;
}

TEST(Cli, SimulatedTableIsDeterministic) {
    const std::vector<std::string> args{"efficiency-table", "--simulate", "--K", "4", "--J-list", "8,64"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    EXPECT_EQ(a.code, cli::kExitOk);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, "J,simulated_efficiency,theoretical_efficiency\n8,0.5333333333,0.5333333333\n"
                     "64,0.9014084507,0.9014084507\n");
}

TEST(Cli, EfficiencyTableErrors) {
    EXPECT_EQ(invoke({"efficiency-table", "--simulate"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"efficiency-table", "--J-list", "8"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"efficiency-table", "--simulate", "--measure", "--J-list", "8"}).code, cli::kExitConfig);
    EXPECT_EQ(invoke({"efficiency-table", "--simulate", "--method", "dnwr", "--N", "8", "--K", "2", "--J-list", "6"})
                  .code,
              cli::kExitConfig);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto cfg = temp_file("config.ini");
    const auto report = temp_file("report.json");
    {
        std::ofstream f(cfg);
        f << "Nx=63\nNt=16\nN=4\nK=3\ntol=0\n";
    }
    const auto o = invoke({"solve", "--config", cfg.string(), "--K", "2", "--report", report.string()});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["iterations"], 2);
    EXPECT_EQ(j["config"]["Nx"], 63);
    EXPECT_EQ(j["config"]["N"], 4);
    std::filesystem::remove(cfg);
    std::filesystem::remove(report);
}

TEST(Cli, WritesCsvOutputs) {
    const auto res = temp_file("res.csv");
    const auto trace = temp_file("trace.csv");
    const auto timeline = temp_file("timeline.csv");
    const auto o = invoke({"solve", "--mode", "pipeline", "--J", "2", "--K", "2", "--Nt", "8", "--Nx", "15",
                           "--residuals", res.string(), "--trace", trace.string(), "--timeline", timeline.string()});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    std::ifstream r(res);
    std::string line;
    std::getline(r, line);
    EXPECT_EQ(line, "k,residual_Linf");
    std::ifstream t(trace);
    std::getline(t, line);
    EXPECT_EQ(line, "k,j,i,kind,sender,receiver,words");
    std::ifstream tl(timeline);
    std::getline(tl, line);
    EXPECT_EQ(line, "worker,i,k,j,start_event,end_event");
    for (const auto& f : {res, trace, timeline}) std::filesystem::remove(f);
}
