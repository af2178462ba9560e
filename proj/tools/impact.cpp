// impact: command-line driver for delayed-impact bandit experiments.
//
//   impact run --config FILE [--jobs N] [--out DIR] [--seed U64]
//   impact enumerate --K 3 --epsilon 1/4
//   impact gen-instance --kind bump --K 2 --epsilon-bump 1/4 --seed 3 [--out FILE]
//   impact negative-demo --T 50000 --epsilon-inst 0.2 --seed 1 [--runs 20] [--out DIR]
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "impact/config.hpp"
#include "impact/negative_demo.hpp"
#include "impact/report.hpp"

namespace fs = std::filesystem;
using namespace impact;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

int cmd_run(const std::string& config_path, std::optional<unsigned> jobs, const std::string& out_override,
            std::optional<std::uint64_t> seed) {
  auto cfg = load_config(config_path);
  if (seed) cfg.master_seed = *seed;
  if (!out_override.empty()) cfg.output = out_override;
  const auto ex = prepare_experiment(cfg);
  const unsigned workers = jobs.value_or(default_jobs());
  const auto dir = prepare_out_dir(cfg.output);

  std::cerr << "grid epsilon=1/" << ex.levels << ", " << ex.scenarios.front()->space->size() << " meta arms, "
            << ex.episodes.size() << " episodes per policy\n";
  std::vector<LabeledCurve> curves;
  for (const auto& spec : cfg.policies) {
    LabeledCurve c{spec.label, cfg.environment.gamma, replicate(ex.episodes, spec, cfg.T, ex.checkpoints, workers)};
    write_file(dir / (spec.label + ".csv"), [&](std::ostream& o) { write_csv(o, {c}); });
    std::cout << spec.label << " final_mean_regret=" << format_sig9(c.curve.mean.back())
              << " std=" << format_sig9(c.curve.std.back()) << " runs=" << c.curve.runs << '\n';
    curves.push_back(std::move(c));
  }
  write_file(dir / "regret.csv", [&](std::ostream& o) { write_csv(o, curves); });
  write_file(dir / "regret.dat", [&](std::ostream& o) { write_dat(o, curves); });
  write_file(dir / "config.cfg", [&](std::ostream& o) { write_config(o, cfg); });
  return 0;
}

int cmd_enumerate(std::size_t K, const std::string& epsilon) {
  const SimplexGrid grid(K, parse_grid_levels(epsilon));
  std::size_t count = 0;
  for_each_composition(grid, [&](const std::vector<int>& levels) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      std::cout << (k ? "," : "") << format_sig9(static_cast<double>(levels[k]) / grid.levels());
    }
    std::cout << '\n';
    ++count;
    return true;
  });
  std::cout << "count " << count << '\n';
  return 0;
}

int cmd_gen_instance(const std::string& kind, std::size_t K, double epsilon_inst, const std::string& epsilon_bump,
                     std::uint64_t seed, const std::string& out) {
  ModelParams params;
  params.kind = kind;
  params.K = K;
  params.epsilon_inst = epsilon_inst;
  params.epsilon_bump = 1.0 / parse_grid_levels(epsilon_bump);
  if (kind == "example1" && K != 2) throw ConfigError("example1 has exactly two arms (--K 2)");
  const auto model = build_model(params, seed, 0);
  if (out.empty()) {
    write_model(std::cout, model);
  } else {
    write_file(out, [&](std::ostream& o) { write_model(o, model); });
  }
  return 0;
}

int cmd_negative_demo(long T, double epsilon_inst, std::uint64_t seed, std::size_t runs,
                      std::optional<unsigned> jobs, const std::string& out) {
  const auto demo = negative_demo(T, epsilon_inst, seed, runs, jobs.value_or(default_jobs()));
  if (!out.empty()) {
    const auto dir = prepare_out_dir(out);
    write_file(dir / "negative_demo.csv", [&](std::ostream& o) { write_csv(o, demo.curves); });
  }
  std::cout << "instance example1 epsilon_inst=" << format_sig9(epsilon_inst) << " grid=1/" << demo.levels
            << " optimum=(" << format_sig9(demo.benchmark.arm[0]) << "," << format_sig9(demo.benchmark.arm[1])
            << ") T=" << T << " runs=" << runs << '\n';
  for (const auto& line : demo.lines) {
    if (line.skipped) {
      std::cout << line.policy << " skipped: initialization longer than the horizon\n";
      continue;
    }
    std::cout << line.policy << " regret_per_round=" << format_sig9(line.regret_per_round)
              << " late_window_regret=" << format_sig9(line.late_window)
              << " slope=" << (std::isnan(line.slope) ? std::string("undefined") : format_sig9(line.slope)) << '\n';
  }
  std::cout << "summary: " << (demo.short_horizon ? "horizon too short for asymptotic claim" : "ok") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandits with delayed impact of actions: experiments and instances"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run every policy of a config and write regret curves");
  std::string config_path, run_out;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--jobs", jobs, "worker threads (default: available parallelism)")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "output directory (overrides experiment.output)");
  run->add_option("--seed", seed, "master seed (overrides experiment.master_seed)");

  auto* enumerate = app.add_subcommand("enumerate", "list the meta arms of a simplex grid");
  std::size_t K = 2;
  std::string epsilon = "1/4";
  enumerate->add_option("--K", K, "number of base arms")->check(CLI::PositiveNumber);
  enumerate->add_option("--epsilon", epsilon, "grid step, 1/n or a decimal");

  auto* gen = app.add_subcommand("gen-instance", "write a reward model file");
  std::string kind = "gaussian", epsilon_bump = "1/4", gen_out;
  double epsilon_inst = 0.2;
  std::uint64_t gen_seed = 1;
  std::size_t gen_K = 2;
  gen->add_option("--kind", kind, "bump | example1 | gaussian")
      ->check(CLI::IsMember({"bump", "example1", "gaussian"}));
  gen->add_option("--K", gen_K, "number of base arms")->check(CLI::PositiveNumber);
  gen->add_option("--epsilon-inst", epsilon_inst, "example1 gap parameter");
  gen->add_option("--epsilon-bump", epsilon_bump, "bump height and peak grid, 1/m");
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("--out", gen_out, "model file (default: stdout)");

  auto* demo = app.add_subcommand("negative-demo", "Thompson Sampling lock-in on the example1 instance");
  long T = 50000;
  std::uint64_t demo_seed = 1;
  std::size_t runs = 20;
  double demo_eps = 0.2;
  std::string demo_out;
  demo->add_option("--T", T, "horizon");
  demo->add_option("--epsilon-inst", demo_eps, "example1 gap parameter");
  demo->add_option("--seed", demo_seed, "master seed");
  demo->add_option("--runs", runs, "replications")->check(CLI::PositiveNumber);
  demo->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_out, "directory for negative_demo.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, jobs, run_out, seed);
    if (*enumerate) return cmd_enumerate(K, epsilon);
    if (*gen) return cmd_gen_instance(kind, gen_K, epsilon_inst, epsilon_bump, gen_seed, gen_out);
    if (*demo) return cmd_negative_demo(T, demo_eps, demo_seed, runs, jobs, demo_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidDiscretization& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EmptyActionSpace& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleInstance& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
