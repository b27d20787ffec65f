#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation iocsolve(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = ioc::cli::run(args, o, e);
    return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ioc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
        ASSERT_EQ(iocsolve({"make-default", "--out", dir_.string()}).code, 0);
        problem_ = (dir_ / "default_problem.json").string();
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_;
    std::string problem_;
};

}  // namespace

TEST_F(CliTest, MakeDefaultWritesInstanceWithGeneratingParameter) {
    const json p = json::parse(slurp(problem_));
    EXPECT_EQ(p["x_star"], json::array({0.3, 0.7}));
    EXPECT_TRUE(fs::exists(dir_ / "manifest_make-default.json"));
    ASSERT_EQ(iocsolve({"make-default", "--variant", "box", "--out", dir_.string()}).code, 0);
    EXPECT_EQ(json::parse(slurp(dir_ / "default_box_problem.json"))["x_ad"]["kind"], "box");
}

TEST_F(CliTest, LowerReportsSmallKktResidual) {
    const fs::path out = dir_ / "lower";
    const Invocation r = iocsolve({"lower", "--problem", problem_, "--x", "0.5,0.5", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(slurp(out / "lower.json"));
    EXPECT_LE(doc["kkt_residual"].get<double>(), 1e-10);
    EXPECT_TRUE(fs::exists(out / "lower.csv"));
    const json manifest = json::parse(slurp(out / "manifest_lower.json"));
    EXPECT_EQ(manifest["command"], "lower");
    EXPECT_EQ(manifest["timestamp"], "2023-11-14T22:13:20Z");
}

TEST_F(CliTest, PathThenCertify) {
    const fs::path out = dir_ / "run";
    Invocation r = iocsolve({"path", "--problem", problem_, "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"path.json", "path.csv", "candidate_point.json", "candidate_multipliers.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    r = iocsolve({"certify", "--problem", problem_, "--point", (out / "candidate_point.json").string(),
                  "--multipliers", (out / "candidate_multipliers.json").string(), "--tol", "1e-4",
                  "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string cls = json::parse(slurp(out / "certificate.json"))["classification"];
    EXPECT_TRUE(cls == "C" || cls == "S") << cls;
}

TEST_F(CliTest, DegenerateSliceHasHeaderOnly) {
    const fs::path out = dir_ / "slice";
    const Invocation r = iocsolve({"value", "--problem", problem_, "--slice-a", "0.4,0.6", "--slice-b",
                            "0.4,0.6", "--count", "7", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(out / "value_slice.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST_F(CliTest, IdenticalRunsAreBitIdentical) {
    const fs::path a = dir_ / "a", b = dir_ / "b";
    for (const fs::path& o : {a, b})
        ASSERT_EQ(iocsolve({"value", "--problem", problem_, "--samples", "5", "--seed", "9", "--out",
                            o.string()})
                      .code,
                  0);
    EXPECT_EQ(slurp(a / "value.json"), slurp(b / "value.json"));
    json ma = json::parse(slurp(a / "manifest_value.json"));
    json mb = json::parse(slurp(b / "manifest_value.json"));
    EXPECT_EQ(ma["parameters"]["seed"], 9);
    ma.erase("outputs");
    mb.erase("outputs");
    EXPECT_EQ(ma, mb);
}

TEST_F(CliTest, ValidationErrorsExitTwoWithJson) {
    Invocation r = iocsolve({"relax", "--problem", problem_, "--eps", "0", "--out", dir_.string()});
    EXPECT_EQ(r.code, ioc::cli::kValidation);
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"], "validation");

    r = iocsolve({"lower", "--problem", (dir_ / "missing.json").string(), "--x", "0.5,0.5"});
    EXPECT_EQ(r.code, ioc::cli::kValidation);

    r = iocsolve({"lower", "--problem", problem_});
    EXPECT_EQ(r.code, ioc::cli::kValidation);

    r = iocsolve({"oracle", "--problem", problem_, "--resolution", "1", "--out", dir_.string()});
    EXPECT_EQ(r.code, ioc::cli::kValidation);
}

TEST_F(CliTest, ConvergenceFailureExitsThree) {
    const Invocation r = iocsolve({"relax", "--problem", problem_, "--eps", "1e-300", "--feas-tol",
                                   "1e-300", "--out", dir_.string()});
    EXPECT_EQ(r.code, ioc::cli::kNumerical);
    EXPECT_EQ(json::parse(r.err)["error"], "convergence");
    EXPECT_TRUE(fs::exists(dir_ / "error.json"));
}

TEST_F(CliTest, OracleComparesCandidate) {
    const fs::path out = dir_ / "oracle";
    const Invocation r = iocsolve({"oracle", "--problem", problem_, "--resolution", "20", "--threads", "2",
                            "--candidate-value", "0", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(slurp(out / "oracle.json"));
    EXPECT_EQ(doc["sample_count"], 21);
    EXPECT_LE(doc["gap_to_oracle"].get<double>(), 0.0);
}
