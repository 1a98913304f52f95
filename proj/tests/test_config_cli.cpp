#include "levylab/cli.hpp"
#include "levylab/config.hpp"
#include "levylab/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace levylab;
namespace fs = std::filesystem;

namespace {

const char *kStable = R"({
  "experiment_id": "stable15",
  "seed": 7,
  "model": {
    "nu": {"variant": "stable_density", "alpha": 1.5}
  },
  "drift": {"family": "sign_x", "K": 1.0},
  "solver": {"dt": 0.01, "n_paths": 200},
  "sample": {"n_paths": 10000, "xi_count": 5, "export_paths": 2, "dt": 0.05}
})";

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "levylab_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path &path, const std::string &text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string &args) {
  const std::string cmd = std::string(LEVYLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string verdict_of(const fs::path &summary, const std::string &check) {
  std::ifstream in(summary);
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string id, c, v;
    std::getline(ss, id, ',');
    std::getline(ss, c, ',');
    std::getline(ss, v, ',');
    if (c == check) return v;
  }
  return "";
}

std::string cli_args(const std::string &sub, const fs::path &cfg, const fs::path &out, const std::string &extra = "") {
  return sub + " --config " + cfg.string() + " --out " + out.string() + (extra.empty() ? "" : " " + extra);
}

} // namespace

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig def;
  const auto text = serialize_config(def);
  EXPECT_EQ(parse_config(text), def);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
}

TEST(Config, ParsedConfigRoundTrips) {
  const auto cfg = parse_config(kStable);
  EXPECT_EQ(cfg.model.alpha, 1.5);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, OverridesApply) {
  const auto cfg = parse_config(kStable, "x.json", {"model.nu.alpha=1.2", "drift.family=checkerboard", "seed=99"});
  EXPECT_EQ(cfg.model.alpha, 1.2);
  EXPECT_EQ(cfg.drift.family, "checkerboard");
  EXPECT_EQ(cfg.seed, 99u);
}

TEST(Config, ErrorsAreLineAnchored) {
  const std::string bad = "{\n  \"seed\": 1,\n  \"drift\": {\n    \"family\": \"zigzag\"\n  }\n}";
  try {
    parse_config(bad, "bad.json");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:4:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("drift.family"), std::string::npos) << e.what();
  }
  try {
    parse_config("{\n\"seed\": 1,\n\"sede\": 2\n}", "typo.json");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("typo.json:3:"), std::string::npos) << e.what();
  }
  try {
    parse_config("{\n\"seed\": 1,\n", "trunc.json");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("trunc.json:"), std::string::npos) << e.what();
  }
  try {
    parse_config(kStable, "x.json", {"drift.K=-1"});
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("--set drift.K"), std::string::npos) << e.what();
  }
}

TEST(Config, BuildersFollowConfig) {
  auto cfg = parse_config(kStable);
  EXPECT_EQ(build_model(cfg.model).closed_form(), ClosedForm::symmetric_stable);
  EXPECT_EQ(build_drift(cfg.drift).K(), 1.0);
  cfg.drift.mollify = 0.1;
  EXPECT_EQ(build_drift(cfg.drift).family(), DriftFamily::mollified);
  cfg.model.closed_form = "custom";
  EXPECT_EQ(build_model(cfg.model).closed_form(), ClosedForm::none);
}

TEST(Cli, CheckPsiSatisfied) {
  const auto dir = scratch("psi15");
  const auto cfg = write_file(dir / "c.json", kStable);
  EXPECT_EQ(run_binary(cli_args("check-psi", cfg, dir / "out")), 0);
  EXPECT_EQ(verdict_of(dir / "out" / "SUMMARY.csv", "condition"), "satisfied");
  EXPECT_TRUE(fs::exists(dir / "out" / "constants.csv"));
}

TEST(Cli, CheckPsiViolatedStillSucceeds) {
  const auto dir = scratch("psi10");
  const auto cfg = write_file(dir / "c.json", kStable);
  EXPECT_EQ(run_binary(cli_args("check-psi", cfg, dir / "out", "--set model.nu.alpha=1.0")), 0);
  EXPECT_EQ(verdict_of(dir / "out" / "SUMMARY.csv", "condition"), "violated");
  EXPECT_FALSE(fs::exists(dir / "out" / "constants.csv"));
}

TEST(Cli, FixedLambdaBelowThresholdIsRefused) {
  const auto dir = scratch("refuse");
  const auto cfg = write_file(dir / "c.json", kStable);
  EXPECT_EQ(run_binary(cli_args("krylov", cfg, dir / "out",
                                "--set lambda.policy=fixed --set lambda.value=1e-6 --set drift.K=5")),
            2);
  std::ostringstream log, err;
  const int code = run({"krylov", cfg.string(), {"lambda.policy=fixed", "lambda.value=1e-6", "drift.K=5"},
                        (dir / "out").string(), {}},
                       log, err);
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.str().find("lambda"), std::string::npos) << err.str();
}

TEST(Cli, UsageAndConfigErrors) {
  const auto dir = scratch("usage");
  const auto cfg = write_file(dir / "c.json", kStable);
  const auto bad = write_file(dir / "bad.json", "{\n\"seed\": 1,\n\"bogus\": 2\n}");
  EXPECT_EQ(run_binary("check-psi"), 2);
  EXPECT_EQ(run_binary(cli_args("frobnicate", cfg, dir / "out")), 2);
  EXPECT_EQ(run_binary(cli_args("check-psi", bad, dir / "out")), 2);
  EXPECT_EQ(run_binary(cli_args("check-psi", dir / "missing.json", dir / "out")), 2);
  std::ostringstream log, err;
  EXPECT_EQ(run({"check-psi", bad.string(), {}, (dir / "out").string(), {}}, log, err), 2);
  EXPECT_NE(err.str().find("bad.json:3:"), std::string::npos) << err.str();
}

TEST(Cli, RerunsAreByteIdentical) {
  const auto dir = scratch("rerun");
  const auto cfg = write_file(dir / "c.json", kStable);
  ASSERT_EQ(run_binary(cli_args("sample", cfg, dir / "a")), 0);
  ASSERT_EQ(run_binary(cli_args("sample", cfg, dir / "b")), 0);
  std::size_t files = 0;
  for (const auto &e : fs::directory_iterator(dir / "a")) {
    const auto other = dir / "b" / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    ++files;
  }
  EXPECT_GE(files, 4u);
  // A different seed changes the sampled output.
  ASSERT_EQ(run_binary(cli_args("sample", cfg, dir / "c", "--seed 8")), 0);
  EXPECT_NE(slurp(dir / "a" / "ecf.csv"), slurp(dir / "c" / "ecf.csv"));
}
