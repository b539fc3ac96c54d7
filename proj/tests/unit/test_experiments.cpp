#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ifs/errors.hpp"
#include "ifs/experiments.hpp"

using namespace ifs;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("ifs-exp-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Experiments, CatalogIsComplete) {
    const std::vector<std::string> expected{"thm-contracting-bound", "thm-power-consistency", "thm-conjugacy", "thm-product",
                                            "lemma-density",         "ex-circle-chain",       "ex-interval-no-shadowing",
                                            "ex-interval-chain-probe"};
    EXPECT_EQ(experiment_names(), expected);
    for (const auto& name : expected) EXPECT_TRUE(experiment_defaults(name).contains("seed")) << name;
    EXPECT_THROW(experiment_defaults("nope"), DomainError);
}

TEST(Experiments, EveryExperimentPassesWithDefaults) {
    TempDir tmp;
    for (const auto& name : experiment_names()) {
        ExperimentOptions opt;
        opt.seed = 5;
        opt.output_root = tmp.path();
        opt.run_label = "run";
        const auto r = run_experiment(name, opt);
        EXPECT_TRUE(r.verdict) << name;
        EXPECT_EQ(r.name, name);
        EXPECT_EQ(r.parameters.at("seed"), 5);
        EXPECT_FALSE(r.metrics.empty()) << name;
        ASSERT_FALSE(r.artifacts.empty());
        for (const auto& a : r.artifacts) EXPECT_TRUE(fs::exists(a)) << a;
        const auto j = nlohmann::json::parse(slurp(r.directory / "result.json"));
        EXPECT_EQ(j.at("verdict").get<bool>(), r.verdict);
        EXPECT_EQ(j.at("parameters"), r.parameters);
        EXPECT_GE(r.wall_time, 0.0);
    }
}

TEST(Experiments, ThresholdsAreRecorded) {
    TempDir tmp;
    const auto r = run_experiment("lemma-density", {1, tmp.path(), nlohmann::json::object(), 0, "a"});
    EXPECT_EQ(r.parameters.at("density_max"), 0.01);
    EXPECT_EQ(r.parameters.at("tail_max"), 0.05);
    EXPECT_EQ(r.parameters.at("tol"), 1e-3);
    EXPECT_LT(r.metrics.at("density"), 0.01);
    EXPECT_LT(r.metrics.at("tail_max"), 0.05);
}

TEST(Experiments, SameSeedReproducesMetrics) {
    TempDir tmp;
    for (const char* name : {"thm-contracting-bound", "thm-conjugacy", "thm-product", "ex-interval-no-shadowing"}) {
        const auto a = run_experiment(name, {9, tmp.path(), nlohmann::json::object(), 1, "a"});
        const auto b = run_experiment(name, {9, tmp.path(), nlohmann::json::object(), 4, "b"});
        EXPECT_EQ(a.metrics, b.metrics) << name;
        EXPECT_EQ(a.verdict, b.verdict);
        for (std::size_t i = 1; i < a.artifacts.size(); ++i) {
            EXPECT_EQ(slurp(a.artifacts[i]), slurp(b.artifacts[i])) << a.artifacts[i];
        }
    }
}

TEST(Experiments, OverridesApplyAndUnknownKeysFail) {
    TempDir tmp;
    const auto r = run_experiment("thm-contracting-bound", {0, tmp.path(), {{"n", 2000}}, 0, "small"});
    EXPECT_EQ(r.parameters.at("n"), 2000);
    EXPECT_LE(r.metrics.at("affine_ratio"), 1.0);
    EXPECT_THROW(run_experiment("thm-contracting-bound", {0, tmp.path(), {{"bogus", 1}}, 0, "x"}), DomainError);
    EXPECT_THROW(run_experiment("no-such-experiment", {0, tmp.path(), nlohmann::json::object(), 0, "x"}), DomainError);
}

TEST(Experiments, TightThresholdFlipsVerdict) {
    TempDir tmp;
    const auto r = run_experiment("lemma-density", {0, tmp.path(), {{"density_max", 0.0}}, 0, "tight"});
    EXPECT_FALSE(r.verdict);
}

TEST(Experiments, ExistingRunDirectoryGetsSuffix) {
    TempDir tmp;
    const ExperimentOptions opt{0, tmp.path(), nlohmann::json::object(), 0, "same"};
    const auto a = run_experiment("ex-circle-chain", opt);
    const auto b = run_experiment("ex-circle-chain", opt);
    const auto c = run_experiment("ex-circle-chain", opt);
    EXPECT_EQ(a.directory.filename(), "same");
    EXPECT_EQ(b.directory.filename(), "same-2");
    EXPECT_EQ(c.directory.filename(), "same-3");
    EXPECT_EQ(a.directory.parent_path().filename(), "ex-circle-chain");
}

TEST(Experiments, TimestampLabelWhenUnset) {
    TempDir tmp;
    const auto r = run_experiment("ex-interval-chain-probe", {0, tmp.path(), nlohmann::json::object(), 0, ""});
    const std::string label = r.directory.filename().string();
    ASSERT_GE(label.size(), 16u);
    EXPECT_EQ(label[8], 'T');
    EXPECT_EQ(label[15], 'Z');
}
