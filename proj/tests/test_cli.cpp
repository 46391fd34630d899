#include "support.hpp"

#include "vrstab/cli.hpp"
#include "vrstab/data.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace vrstab;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run_cli(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const char* kSmallLogistic = R"({
  "method": "svrg",
  "dataset": {"synthetic": {"n": 30, "dimension": 4, "labels": "logistic", "unit_norm": true, "seed": 3}},
  "eta": 0.5,
  "outer_loops": 2,
  "replicates": 4,
  "checkpoints": 5,
  "seed": 8
})";

}  // namespace

TEST(Cli, StabilityWritesCsvAndSvg) {
  const auto dir = oracle::scratch_dir("cli_stability");
  const auto cfg = write_text(dir / "cfg.json", kSmallLogistic);
  const Outcome o = run({"stability", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto files = lines(o.out);
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  EXPECT_NE(files[0].find("stability_svrg_eta0.5"), std::string::npos);
  EXPECT_NE(o.err.find("bound dominated"), std::string::npos);
}

TEST(Cli, OverridesAndStepGridProduceOneRunPerStep) {
  const auto dir = oracle::scratch_dir("cli_overrides");
  const auto cfg = write_text(dir / "cfg.json", kSmallLogistic);
  const Outcome o = run({"stability", "--config", cfg.string(), "--out", (dir / "out").string(),
                         "--set", "method=saga", "--set", "eta=null", "--set", "step_sizes=[0.25,0.5]", "--set", "iterations=60"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto files = lines(o.out);
  ASSERT_EQ(files.size(), 4u);
  EXPECT_NE(files[0].find("stability_saga_eta0.25"), std::string::npos);
  EXPECT_NE(files[2].find("stability_saga_eta0.5"), std::string::npos);
}

TEST(Cli, OutputIsIndependentOfWorkerCount) {
  const auto dir = oracle::scratch_dir("cli_workers");
  const auto cfg = write_text(dir / "cfg.json", kSmallLogistic);
  const Outcome one = run({"stability", "--config", cfg.string(), "--out", (dir / "a").string(), "--workers", "1"});
  ::setenv("VRSTAB_WORKERS", "3", 1);
  const Outcome three = run({"stability", "--config", cfg.string(), "--out", (dir / "b").string()});
  ::unsetenv("VRSTAB_WORKERS");
  ASSERT_EQ(one.code, kExitOk);
  ASSERT_EQ(three.code, kExitOk);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(lines(one.out)[0]), slurp(lines(three.out)[0]));
}

TEST(Cli, ValidationErrorsExitOne) {
  const auto dir = oracle::scratch_dir("cli_validation");
  const auto cfg = write_text(dir / "cfg.json", R"({"method": "svrg", "dataset": "x", "eta": -0.1, "colour": 1})");
  const Outcome o = run({"stability", "--config", cfg.string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.err.find("error_code=validation"), std::string::npos);
  EXPECT_NE(o.err.find("step_size must be positive"), std::string::npos);
  EXPECT_NE(o.err.find("unknown key 'colour'"), std::string::npos);
  EXPECT_TRUE(o.out.empty());

  EXPECT_EQ(run({}).code, kExitValidation);
  EXPECT_EQ(run({"stability"}).code, kExitValidation);
  EXPECT_EQ(run({"frobnicate"}).code, kExitValidation);
  const Outcome bad_override = run({"stability", "--config", cfg.string(), "--set", "novalue"});
  EXPECT_EQ(bad_override.code, kExitValidation);
}

TEST(Cli, MissingFilesExitTwo) {
  const auto dir = oracle::scratch_dir("cli_missing");
  const Outcome no_config = run({"stability", "--config", (dir / "absent.json").string()});
  EXPECT_EQ(no_config.code, kExitRuntime);
  EXPECT_NE(no_config.err.find("error_code="), std::string::npos);

  const auto cfg = write_text(dir / "cfg.json", R"({"dataset": ")" + (dir / "absent.svm").string() + R"(", "eta": 0.1})");
  const Outcome no_data = run({"stability", "--config", cfg.string()});
  EXPECT_EQ(no_data.code, kExitRuntime);
}

TEST(Cli, MalformedDataExitsTwoWithParseCode) {
  const auto dir = oracle::scratch_dir("cli_parse");
  const auto data = write_text(dir / "bad.svm", "+1 1:0.5\n-1 3:1 2:1\n");
  const Outcome o = run({"parse-data", data.string()});
  EXPECT_EQ(o.code, kExitRuntime);
  EXPECT_NE(o.err.find("error_code=parse"), std::string::npos);
  EXPECT_NE(o.err.find("line 2"), std::string::npos);
}

TEST(Cli, ParseDataReportsShapeAndRoundTrips) {
  const auto dir = oracle::scratch_dir("cli_parse_ok");
  const auto data = write_text(dir / "in.svm", "3 1:0.5 4:2\n1 2:1\n");
  const Outcome o = run({"parse-data", data.string(), "--output", (dir / "copy.svm").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(lines(o.out)[0], "samples=2 dimension=4 nnz=3");
  const Dataset a = load_libsvm(data);
  const Dataset b = load_libsvm(dir / "copy.svm");
  EXPECT_EQ(serialize_libsvm(a), serialize_libsvm(b));
}

TEST(Cli, SelectParams) {
  const Outcome ok = run({"select-params", "--method", "svrg", "--n", "1000", "--alpha", "0.25",
                          "--initial-risk", "0.69"});
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_NE(ok.out.find("method=svrg"), std::string::npos);
  EXPECT_NE(ok.out.find("m=1000"), std::string::npos);

  const Outcome bad = run({"select-params", "--method", "saga", "--regime", "strongly_convex", "--n", "5",
                           "--alpha", "1", "--mu", "0.1"});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("error_code=regime"), std::string::npos);

  EXPECT_EQ(run({"select-params", "--method", "adam", "--n", "5", "--alpha", "1"}).code, kExitValidation);
}

TEST(Cli, CheckLossesPasses) {
  const Outcome o = run({"check-losses", "--pairs", "500"});
  ASSERT_EQ(o.code, kExitOk) << o.out;
  const auto rows = lines(o.out);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_EQ(r.rfind("PASS ", 0), 0u) << r;
}

TEST(Cli, DivergenceExitsThree) {
  const auto dir = oracle::scratch_dir("cli_divergence");
  const auto cfg = write_text(dir / "cfg.json", R"({
    "method": "sgd", "loss": "least_squares",
    "dataset": {"synthetic": {"n": 20, "dimension": 3, "weight_value": 3, "seed": 1}},
    "eta": 50, "iterations": 2000, "replicates": 2})");
  const Outcome o = run({"stability", "--config", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(o.code, kExitDivergence) << o.err;
  EXPECT_NE(o.err.find("error_code=divergence"), std::string::npos);
  EXPECT_NE(o.err.find("warning: step size 50"), std::string::npos);
}

TEST(Cli, ConvergenceAndEpr) {
  const auto dir = oracle::scratch_dir("cli_conv");
  const auto cfg = write_text(dir / "cfg.json", kSmallLogistic);
  const Outcome conv = run({"convergence", "--config", cfg.string(), "--out", (dir / "c").string(), "--set", "l2=0.1"});
  ASSERT_EQ(conv.code, kExitOk) << conv.err;
  EXPECT_EQ(lines(conv.out).size(), 2u);

  const auto epr = write_text(dir / "epr.json", R"({
    "method": "svrg", "loss": "least_squares", "regime": "strongly_convex", "l2": 0.5,
    "dataset": {"synthetic": {"n": 16, "dimension": 2, "noise": 0.5}},
    "n_grid": [16, 32], "replicates": 3, "seed": 2})");
  const Outcome e = run({"epr", "--config", epr.string(), "--out", (dir / "e").string()});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_NE(e.err.find("log-log slope"), std::string::npos);
}
