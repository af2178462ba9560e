#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "impact/negative_demo.hpp"

namespace fs = std::filesystem;
using namespace impact;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("impact_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + IMPACT_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

const char* kSmall = R"([experiment]
T = 1500
runs = 5
master_seed = 3
checkpoints = 30

[environment]
K = 2
gamma = 0.3

[policy.hducb]
[policy.exp3]
[policy.ts]
)";

}  // namespace

TEST_F(Cli, UnknownPolicyIsAConfigError) {
  const auto cfg = write("bad.cfg", "[experiment]\nT = 100\n[environment]\n[policy.foo]\n");
  const auto r = run("run --config " + cfg.string() + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("policy.foo.type"), std::string::npos) << r.err;
}

TEST_F(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(run("run --config " + (dir_ / "missing.cfg").string()).code, 2);
  EXPECT_EQ(run("run --config " + write("syntax.cfg", "[experiment\n").string()).code, 2);
  EXPECT_EQ(run("run").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("enumerate --K 2 --epsilon 0.3").code, 2);
  EXPECT_EQ(run("enumerate --K 3 --epsilon 1/2").code, 2);
  EXPECT_EQ(run("gen-instance --kind example1 --K 3").code, 2);
}

TEST_F(Cli, RuntimeFailureExitsWithOne) {
  const auto cfg = write("ok.cfg", kSmall);
  write("blocker", "not a directory");
  EXPECT_EQ(run("run --config " + cfg.string() + " --out " + (dir_ / "blocker" / "sub").string()).code, 1);
}

TEST_F(Cli, RunWritesCurvesForEveryPolicy) {
  const auto cfg = write("small.cfg", kSmall);
  const auto out = dir_ / "o";
  const auto r = run("run --config " + cfg.string() + " --jobs 2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"hducb.csv", "exp3.csv", "ts.csv", "regret.csv", "regret.dat", "config.cfg"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto csv = slurp(out / "regret.csv");
  EXPECT_TRUE(csv.starts_with("policy,gamma,t,mean_regret,std,runs\n"));
  EXPECT_NE(csv.find("\nhducb,0.3,1500,"), std::string::npos);
  EXPECT_NE(r.out.find("ts final_mean_regret="), std::string::npos);
  // The echoed config reproduces the run.
  const auto again = run("run --config " + (out / "config.cfg").string() + " --jobs 1 --out " +
                         (dir_ / "o2").string());
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(slurp(dir_ / "o2" / "regret.csv"), csv);
}

TEST_F(Cli, OutputDoesNotDependOnJobs) {
  const auto cfg = write("small.cfg", kSmall);
  ASSERT_EQ(run("run --config " + cfg.string() + " --jobs 1 --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --jobs 3 --out " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "regret.csv"), slurp(dir_ / "b" / "regret.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "regret.dat"), slurp(dir_ / "b" / "regret.dat"));
}

TEST_F(Cli, SeedOverrideChangesTheRun) {
  const auto cfg = write("small.cfg", kSmall);
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --seed 99 --out " + (dir_ / "b").string()).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "regret.csv"), slurp(dir_ / "b" / "regret.csv"));
  EXPECT_NE(slurp(dir_ / "b" / "config.cfg").find("master_seed = 99"), std::string::npos);
}

TEST_F(Cli, SingleRunShortHorizon) {
  const auto cfg = write("one.cfg", "[experiment]\nT = 100\nruns = 1\n[environment]\nK = 2\n[policy.exp3]\n");
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (dir_ / "o").string()).code, 0);
  std::istringstream in(slurp(dir_ / "o" / "exp3.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_TRUE(line.ends_with(",0,1")) << line;
  }
  EXPECT_GE(rows, 1u);
  EXPECT_LE(rows, 100u);
}

TEST_F(Cli, EnumerateListsTheGrid) {
  const auto r = run("enumerate --K 2 --epsilon 1/4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.25,0.75\n0.5,0.5\n0.75,0.25\ncount 3\n");
  EXPECT_NE(run("enumerate --K 4 --epsilon 0.1").out.find("count 84\n"), std::string::npos);
}

TEST_F(Cli, GeneratedInstanceDrivesARun) {
  const auto model = dir_ / "inst.model";
  ASSERT_EQ(run("gen-instance --kind bump --K 2 --epsilon-bump 1/4 --seed 3 --out " + model.string()).code, 0);
  const auto text = slurp(model);
  EXPECT_TRUE(text.find("peaks = 0.25, 0.75") != std::string::npos ||
              text.find("peaks = 0.75, 0.25") != std::string::npos)
      << text;
  const auto cfg = write("m.cfg", "[experiment]\nT = 400\nruns = 2\nepsilon = 1/8\n[environment]\nmodel_file = " +
                                      model.filename().string() + "\n[policy.aducb]\n");
  EXPECT_EQ(run("run --config " + cfg.string() + " --out " + (dir_ / "o").string()).code, 0);
  EXPECT_EQ(run("gen-instance --kind gaussian --K 3 --seed 5").out,
            run("gen-instance --kind gaussian --K 3 --seed 5").out);
}

TEST_F(Cli, NegativeDemoFlagsShortHorizons) {
  const auto r = run("negative-demo --T 10 --epsilon-inst 0.2 --seed 1 --runs 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("summary: horizon too short for asymptotic claim"), std::string::npos) << r.out;
  const auto ok = run("negative-demo --T 2000 --runs 2 --out " + (dir_ / "d").string());
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("summary: ok"), std::string::npos);
  EXPECT_NE(ok.out.find("ts regret_per_round="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "d" / "negative_demo.csv"));
}

TEST_F(Cli, HistoryDependentRecipeRanksThePhasedLearnerFirst) {
  const auto cfg = write("fig.cfg", R"([experiment]
T = 50000
runs = 40
master_seed = 12
rho = 0.2

[environment]
kind = gaussian
K = 2
gamma = 0.2

[policy.hducb]
[policy.exp3]
[policy.ducb]
gamma_d = 0.8
xi = 1
[policy.swucb]
window = 200
xi = 1
)");
  const auto r = run("run --config " + cfg.string() + " --out " + (dir_ / "o").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, double> final;
  std::istringstream in(slurp(dir_ / "o" / "regret.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string policy, gamma, t, mean;
    std::getline(row, policy, ',');
    std::getline(row, gamma, ',');
    std::getline(row, t, ',');
    std::getline(row, mean, ',');
    if (t == "50000") final[policy] = std::stod(mean);
  }
  ASSERT_EQ(final.size(), 4u);
  for (const auto& [name, value] : final) {
    if (name != "hducb") EXPECT_LT(final["hducb"], value) << name;
  }
}

// Lock-in instance at the reference horizon.
class NegativeDemo : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { demo_ = new DemoResult(negative_demo(50000, 0.2, 1, 20, default_jobs())); }
  static void TearDownTestSuite() { delete demo_; }
  static const DemoLine& line(const std::string& name) {
    for (const auto& l : demo_->lines) {
      if (l.policy == name) return l;
    }
    throw std::runtime_error("no line for " + name);
  }
  static DemoResult* demo_;
};
DemoResult* NegativeDemo::demo_ = nullptr;

TEST_F(NegativeDemo, GridContainsTheOptimum) {
  EXPECT_NEAR(demo_->benchmark.arm[0], 0.8, 1e-12);
  EXPECT_NEAR(demo_->benchmark.utility, 0.9, 1e-12);
  EXPECT_FALSE(demo_->short_horizon);
}

TEST_F(NegativeDemo, ThompsonSamplingKeepsLinearLateRegret) {
  EXPECT_GE(line("ts").late_window, 0.025);
  EXPECT_GE(line("ucb1").late_window, 0.025);
}

TEST_F(NegativeDemo, SimplexLearnersAreSublinear) {
  EXPECT_LE(line("aducb").slope, 0.85);
  EXPECT_LE(line("hducb").slope, 0.85);
}

TEST_F(NegativeDemo, PhasedLearnerHalvesThompsonRegretPerRound) {
  EXPECT_LE(line("hducb").regret_per_round, 0.5 * line("ts").regret_per_round);
}
