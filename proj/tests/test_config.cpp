#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "impact/config.hpp"
#include "impact/report.hpp"

using namespace impact;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kMinimal = R"(
# comment
[experiment]
T = 500
runs = 3
epsilon = 1/8

[environment]
kind = gaussian
K = 2
tau = 0.47, 0.53
gamma = 0.25

[policy.aducb]
[policy.slow]
type = ducb
; comment
gamma_d = 0.9
)";

std::string config_error(const std::string& text) {
  try {
    prepare_experiment(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string with_policy(const std::string& section) {
  return "[experiment]\nT = 200\nruns = 1\n[environment]\nK = 2\ntau = 0.5, 0.5\n" + section;
}

}  // namespace

TEST(ParseConfig, ReadsEverySection) {
  const auto cfg = parse(kMinimal);
  EXPECT_EQ(cfg.T, 500);
  EXPECT_EQ(cfg.runs, 3u);
  EXPECT_EQ(cfg.levels, 8);
  EXPECT_EQ(cfg.environment.gamma, 0.25);
  EXPECT_EQ(cfg.environment.model.tau, (std::vector<double>{0.47, 0.53}));
  ASSERT_EQ(cfg.policies.size(), 2u);
  EXPECT_EQ(cfg.policies[0].type, "aducb");
  EXPECT_EQ(cfg.policies[1].label, "slow");
  EXPECT_EQ(cfg.policies[1].type, "ducb");
  EXPECT_EQ(cfg.policies[1].params, (ParamList{{"gamma_d", "0.9"}}));
}

TEST(ParseConfig, DefaultsWhenKeysAreAbsent) {
  const auto cfg = parse("[experiment]\n[environment]\n[policy.exp3]\n");
  EXPECT_EQ(cfg.T, 10000);
  EXPECT_EQ(cfg.runs, 20u);
  EXPECT_EQ(cfg.levels, 0);
  EXPECT_EQ(cfg.rho, 0.2);
  EXPECT_EQ(cfg.environment.model.kind, "gaussian");
}

TEST(ParseConfig, SerializationIsIdempotent) {
  const auto cfg = parse(kMinimal);
  const auto once = to_string(cfg);
  const auto again = parse(once);
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(to_string(again), once);
}

TEST(ParseConfig, ShippedConfigsRoundTrip) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(IMPACT_CONFIGS)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    const auto cfg = load_config(entry.path());
    const auto text = to_string(cfg);
    EXPECT_EQ(parse(text), cfg) << entry.path();
    EXPECT_EQ(to_string(parse(text)), text) << entry.path();
    EXPECT_NO_THROW(prepare_experiment(cfg)) << entry.path();
  }
  EXPECT_GE(seen, 5);
}

TEST(ParseConfig, SyntaxErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("[experiment]\nT 5\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("T = 5\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("[experiment]\n[experiment]\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("[experiment]\nT = 1\nT = 2\n").find("line 3"), std::string::npos);
}

TEST(ParseConfig, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse("[experiment]\nhorizon = 5\n[environment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\nshape = x\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\n[policy.a]\n[plot]\n"), ConfigError);
  EXPECT_THROW(parse("[environment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\n"), ConfigError);
}

TEST(ParseConfig, RejectsOutOfRangeValues) {
  EXPECT_THROW(parse("[experiment]\nepsilon = 0.3\n[environment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nrho = 1\n[environment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nruns = 0\n[environment]\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\ngamma = 1\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\nkind = example1\nK = 3\n[policy.a]\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\n[environment]\ntau = 0.5\n[policy.a]\n"), ConfigError);
}

TEST(ParseConfig, PolicyLabelsMustBeFileNameSafe) {
  EXPECT_NO_THROW(parse(with_policy("[policy.rho-0.1_b]\ntype = hducb\n")));
  EXPECT_THROW(parse(with_policy("[policy.a/b]\n")), ConfigError);
  EXPECT_THROW(parse(with_policy("[policy.]\n")), ConfigError);
}

TEST(PrepareExperiment, UnknownPolicyNamesTheKey) {
  EXPECT_NE(config_error(with_policy("[policy.foo]\n")).find("policy.foo.type"), std::string::npos);
  EXPECT_NE(config_error(with_policy("[policy.a]\ntype = aducb\nbogus = 1\n")).find("policy.a.bogus"),
            std::string::npos);
  EXPECT_NE(config_error(with_policy("[policy.e]\ntype = exp3\nrate = -1\n")).find("policy.e.rate"),
            std::string::npos);
}

TEST(PrepareExperiment, InfeasibleGridIsAConfigError) {
  const auto text = "[experiment]\nepsilon = 1/2\n[environment]\nK = 3\n[policy.aducb]\n";
  EXPECT_FALSE(config_error(text).empty());
}

TEST(PrepareExperiment, HorizonShorterThanInitializationIsRejected) {
  const auto text = "[experiment]\nT = 3\nepsilon = 1/20\n[environment]\nK = 2\n[policy.aducb]\n";
  EXPECT_NE(config_error(text).find("aducb"), std::string::npos);
}

TEST(PrepareExperiment, InstanceSweepPairsEveryInstanceWithEveryRun) {
  auto cfg = parse("[experiment]\nT = 100\nruns = 3\ninstances = 4\n[environment]\nK = 2\n[policy.aducb]\n");
  const auto ex = prepare_experiment(cfg);
  ASSERT_EQ(ex.scenarios.size(), 4u);
  ASSERT_EQ(ex.episodes.size(), 12u);
  std::set<std::vector<double>> centers;
  for (const auto& sc : ex.scenarios) centers.insert(describe_model(sc->model).tau);
  EXPECT_EQ(centers.size(), 4u);
  for (std::size_t i = 0; i < ex.episodes.size(); ++i) EXPECT_EQ(ex.episodes[i].scenario, ex.scenarios[i / 3]);
  std::set<std::uint64_t> seeds;
  for (const auto& e : ex.episodes) seeds.insert(e.seed);
  EXPECT_EQ(seeds.size(), 12u);
}

TEST(PrepareExperiment, AutomaticGridFollowsTheSchedule) {
  const auto ex = prepare_experiment(parse("[experiment]\nT = 50000\n[environment]\nK = 2\n[policy.aducb]\n"));
  EXPECT_EQ(ex.levels, schedule_params(50000, 2, 0.0, 0.2).levels);
}

TEST(PrepareExperiment, ModelFileIsResolvedNextToTheConfig) {
  const auto cfg = load_config(fs::path(IMPACT_CONFIGS) / "bump.cfg");
  const auto ex = prepare_experiment(cfg);
  EXPECT_EQ(ex.scenarios.front()->model.kind(), "bump");
  EXPECT_EQ(ex.scenarios.front()->model.arms(), 3u);
}

TEST(Models, WriteReadRoundTrip) {
  Rng rng(4);
  const std::vector<RewardModel> models{
      make_gaussian_model({0.46, 0.51, 0.549}),
      make_example1_model(0.15),
      make_bump_instance(4, 0.125, rng),
      make_bump_model({0.25, 0.75}, 0.25, {1.0, 2.0}),
      make_table_model({{{0.0, 0.1}, {0.5, 0.9}, {1.0, 0.2}}, {{0.0, 0.3}, {1.0, 0.3}}}),
  };
  for (const auto& m : models) {
    std::ostringstream out;
    write_model(out, m);
    std::istringstream in(out.str());
    const auto back = read_model(in);
    std::ostringstream again;
    write_model(again, back);
    EXPECT_EQ(again.str(), out.str());
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
      for (std::size_t k = 0; k < m.arms(); ++k) EXPECT_EQ(back.mean(k, x), m.mean(k, x));
    }
  }
}

TEST(Models, ReadRejectsMalformedFiles) {
  std::istringstream two("[model]\nkind = example1\n[model2]\n");
  EXPECT_THROW(read_model(two), ConfigError);
  std::istringstream bad("[model]\nkind = bump\nK = 2\nepsilon_bump = 1/4\npeaks = 0.3, 0.6\n");
  EXPECT_THROW(read_model(bad), ConfigError);
  std::istringstream table("[model]\nkind = table\nK = 2\ntable.0 = 0:0.5, 1:0.5\n");
  EXPECT_THROW(read_model(table), ConfigError);
}

TEST(GenInstance, GaussianCentersAreReproducibleAndInRange) {
  ModelParams p;
  p.K = 4;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto tau = describe_model(build_model(p, seed, 0)).tau;
    ASSERT_EQ(tau.size(), 4u);
    for (double c : tau) {
      EXPECT_GE(c, 0.45);
      EXPECT_LE(c, 0.55);
    }
    EXPECT_EQ(describe_model(build_model(p, seed, 0)).tau, tau);
  }
  EXPECT_NE(describe_model(build_model(p, 1, 0)).tau, describe_model(build_model(p, 2, 0)).tau);
  EXPECT_NE(describe_model(build_model(p, 1, 0)).tau, describe_model(build_model(p, 1, 1)).tau);
}

TEST(GenInstance, LockInInstanceIgnoresTheSeed) {
  ModelParams p;
  p.kind = "example1";
  p.epsilon_inst = 0.2;
  std::ostringstream a, b;
  write_model(a, build_model(p, 1, 0));
  write_model(b, build_model(p, 99, 0));
  EXPECT_EQ(a.str(), b.str());
}

TEST(GenInstance, TwoArmQuarterBumpPeaksAreOneOfTwoVectors) {
  ModelParams p;
  p.kind = "bump";
  p.epsilon_bump = 0.25;
  const std::set<std::vector<double>> allowed{{0.25, 0.75}, {0.75, 0.25}};
  std::set<std::vector<double>> drawn;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto peaks = describe_model(build_model(p, seed, 0)).peaks;
    EXPECT_TRUE(allowed.contains(peaks));
    drawn.insert(peaks);
  }
  EXPECT_EQ(drawn, allowed);
}

TEST(Report, HeaderAndNineDigitNumbers) {
  EXPECT_STREQ(kCurveHeader, "policy,gamma,t,mean_regret,std,runs");
  EXPECT_EQ(format_sig9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_sig9(123456789012.0), "1.23456789e+11");
  EXPECT_EQ(format_sig9(0.0), "0");
  EXPECT_EQ(format_sig9(0.2), "0.2");
}

TEST(Report, CsvRowsFollowTheCheckpoints) {
  const auto cfg = parse(with_policy("[policy.aducb]\n[policy.exp3]\n"));
  auto c = cfg;
  c.T = 100;
  const auto ex = prepare_experiment(c);
  std::vector<LabeledCurve> curves;
  for (const auto& spec : c.policies) {
    curves.push_back({spec.label, c.environment.gamma, replicate(ex.episodes, spec, c.T, ex.checkpoints)});
  }
  std::ostringstream out;
  write_csv(out, curves);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCurveHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
    EXPECT_TRUE(line.ends_with(",1"));
  }
  EXPECT_LE(rows, 2 * c.checkpoints);
  EXPECT_EQ(rows, 2 * ex.checkpoints.size());
}

TEST(Report, DatHasOneBlockPerPolicy) {
  AggregateCurve a{{10, 20}, {1.0, 2.0}, {0.5, 0.5}, 2};
  std::ostringstream out;
  write_dat(out, {{"x", 0.0, a}, {"y", 0.2, a}});
  const auto text = out.str();
  EXPECT_NE(text.find("# policy x gamma 0 runs 2\n"), std::string::npos);
  EXPECT_NE(text.find("\n\n\n# policy y gamma 0.2"), std::string::npos);
  EXPECT_NE(text.find("20 2 1 3\n"), std::string::npos);
}
