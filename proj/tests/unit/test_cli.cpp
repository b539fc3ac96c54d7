#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "ifs/model_library.hpp"
#include "ifs/pseudo_orbits.hpp"
#include "ifs/shadowing.hpp"

using namespace ifs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "ifs");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& stem) {
    std::random_device rd;
    return fs::temp_directory_path() / ("ifs-cli-" + stem + "-" + std::to_string(rd()));
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, OrbitCsvHasOneRowPerPoint) {
    const auto r = run({"orbit", "--model", "binary_affine", "--sigma", "0101", "--x0", "0", "--steps", "4", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto ls = lines(r.out);
    ASSERT_FALSE(ls.empty());
    ASSERT_EQ(ls[0].rfind("# ", 0), 0u);
    EXPECT_NE(ls[0].find("steps=4"), std::string::npos);
    EXPECT_NE(ls[0].find("sigma=0101"), std::string::npos);
    ls.erase(ls.begin(), ls.begin() + 2);
    EXPECT_EQ(ls.size(), 5u);
}

TEST(Cli, OrbitJsonMatchesLibrary) {
    const auto r = run({"orbit", "--model", "binary_affine", "--sigma", "010", "--x0", "1", "--steps", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    const std::vector<double> expected{1.0, 0.5, 0.75, 0.375};
    ASSERT_EQ(j.at("points").size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(j.at("points")[i].at("value").get<double>(), expected[i]);
    EXPECT_EQ(j.at("params").at("steps"), 3);
    EXPECT_EQ(j.at("params").at("model"), "binary_affine");
}

TEST(Cli, PseudoToShadowRoundTripKeepsErrors) {
    const fs::path file = temp_path("pseudo") += ".json";
    const auto p = run({"pseudo", "--model", "binary_affine", "--x0", "1", "--steps", "300", "--sigma", "random:4", "--noise",
                        "harmonic", "--seed", "11", "-o", file.string()});
    ASSERT_NE(p.code, 2) << p.err;
    ASSERT_TRUE(fs::exists(file));
    const auto s = run({"shadow", "--model", "binary_affine", "--record", file.string(), "--mode", "contracting"});
    ASSERT_NE(s.code, 2) << s.err;
    const auto from_cli = json::parse(s.out).at("record_errors").get<std::vector<double>>();

    const auto ifs = make_system("binary_affine");
    const auto rec = perturbed_orbit(ifs, parse_selector("random:4", ifs.size(), 300), Point::real(ifs.space(), 1.0),
                                     harmonic_schedule(300), 11);
    EXPECT_EQ(from_cli, rec.errors);

    const auto report = contracting_shadow(ifs, rec, rec.points.front(), 0, 0.01);
    EXPECT_EQ(json::parse(s.out).at("report").at("final_average").get<double>(), report.final_average);
    fs::remove(file);
}

TEST(Cli, ShadowModes) {
    const fs::path file = temp_path("zero") += ".json";
    ASSERT_EQ(run({"pseudo", "--model", "interval_pair", "--x0", "0.3", "--steps", "50", "--noise", "zero", "-o", file.string()}).code, 0);
    const auto v = run({"shadow", "--model", "interval_pair", "--record", file.string(), "--mode", "verify", "--tol", "1e-12"});
    EXPECT_EQ(v.code, 0) << v.err;
    const auto f = run({"shadow", "--model", "interval_pair", "--record", file.string(), "--mode", "finite", "--epsilon", "0.01",
                        "--grid", "0.01"});
    EXPECT_EQ(f.code, 0) << f.err;
    const auto s = run({"shadow", "--model", "interval_pair", "--record", file.string(), "--mode", "search", "--grid", "0.05"});
    EXPECT_EQ(s.code, 0) << s.err;
    const auto c = run({"shadow", "--model", "interval_pair", "--record", file.string(), "--mode", "contracting"});
    EXPECT_EQ(c.code, 2);
    EXPECT_NE(c.err.find("error:"), std::string::npos);
    fs::remove(file);
}

TEST(Cli, ChainFindCircleWitness) {
    const auto r = run({"chain", "find", "--model", "circle_pair", "--from", "0.5", "--to", "0.0", "--epsilon", "0.05", "--grid", "0.00195"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("found").get<bool>());
    EXPECT_LE(j.at("max_step_error").get<double>(), 0.05);
    EXPECT_EQ(j.at("params").at("epsilon"), 0.05);
    EXPECT_EQ(j.at("params").at("grid"), 0.00195);
    EXPECT_GE(j.at("witness").at("length").get<int>(), 2);
}

TEST(Cli, ChainTransitivityVerdicts) {
    EXPECT_EQ(run({"chain", "transitive", "--model", "circle_pair", "--epsilon", "0.05", "--grid", "0.01"}).code, 0);
    EXPECT_EQ(run({"chain", "transitive", "--model", "interval_pair", "--epsilon", "0.05", "--grid", "0.01"}).code, 1);
    EXPECT_EQ(run({"chain", "find", "--model", "circle_pair", "--from", "0.5", "--to", "0", "--epsilon", "0.05", "--grid", "0.02"}).code, 2);
    const auto g = run({"chain", "graph", "--model", "identity", "--epsilon", "0.1", "--grid", "0.025", "--format", "csv"});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_NE(g.out.find("u,v,lambda"), std::string::npos);
}

TEST(Cli, CesaroSeries) {
    const auto r = run({"cesaro", "--series", "powers", "--length", "100000", "--extract", "--tol", "1e-3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("params").at("tol"), 1e-3);
    EXPECT_EQ(j.at("params").at("length"), 100000);

    const auto h = run({"cesaro", "--series", "harmonic", "--length", "8", "--format", "csv"});
    ASSERT_EQ(h.code, 0);
    const auto ls = lines(h.out);
    ASSERT_EQ(ls.size(), 10u);
    EXPECT_EQ(ls[1], "n,average");
    EXPECT_EQ(ls[3], "2,0.75");

    const fs::path file = temp_path("series") += ".txt";
    std::ofstream(file) << "1\n0\n0\n0\n";
    const auto f = run({"cesaro", "--input", file.string()});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(json::parse(f.out).at("average").get<double>(), 0.25);
    fs::remove(file);
}

TEST(Cli, RatioAndListModels) {
    const auto r = run({"ratio", "--model", "binary_affine", "--samples", "512"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("claimed_holds").get<bool>());
    EXPECT_LE(j.at("estimate").get<double>(), 0.5 + 1e-9);
    EXPECT_EQ(j.at("params").at("samples"), 512);

    const auto l = run({"list-models"});
    ASSERT_EQ(l.code, 0);
    const auto models = json::parse(l.out);
    EXPECT_EQ(models.at("models").size(), model_catalog().size());
    EXPECT_EQ(run({"--list-models"}).code, 0);
}

TEST(Cli, ExperimentExitCode) {
    const fs::path root = temp_path("exp");
    const auto r = run({"experiment", "thm-contracting-bound", "--seed", "7", "--out", root.string(), "--label", "t"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(root / "thm-contracting-bound" / "t" / "result.json"));
    const auto bad = run({"experiment", "lemma-density", "--set", "density_max=0", "--out", root.string()});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(run({"experiment", "lemma-density", "--set", "bogus=1", "--out", root.string()}).code, 2);
    fs::remove_all(root);
}

TEST(Cli, UsageErrorsExitTwo) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"orbit", "--model", "binary_affine", "--x0", "0", "--steps", "3", "--unknown-flag"},
             {"orbit", "--model", "no_such_model", "--x0", "0", "--steps", "3"},
             {"orbit", "--model", "binary_affine", "--x0", "2", "--steps", "3"},
             {"orbit", "--model", "binary_affine", "--x0", "0", "--steps", "3", "--format", "xml"},
             {"frobnicate"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 2) << (args.empty() ? "" : args[0]);
        EXPECT_EQ(lines(r.err).size(), 1u) << r.err;
    }
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"orbit", "--help"}).code, 0);
}

TEST(Cli, BinaryRunsAsProcess) {
    const fs::path out = temp_path("proc") += ".csv";
    const std::string cmd = std::string(IFS_CLI_PATH) + " orbit --model binary_affine --sigma 0101 --x0 0 --steps 4 --format csv -o " + out.string();
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    std::ifstream is(out);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    EXPECT_EQ(lines(text).size(), 7u);
    fs::remove(out);
    const std::string bad = std::string(IFS_CLI_PATH) + " orbit --bogus 2>/dev/null";
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
}
