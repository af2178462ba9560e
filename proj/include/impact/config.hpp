#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "impact/errors.hpp"
#include "impact/harness.hpp"
#include "impact/policies/factory.hpp"
#include "impact/reward_model.hpp"

namespace impact {

// ---------------------------------------------------------------------------
// Line-oriented key = value files with [section] headers. Full-line comments
// start with '#' or ';'.

struct Section {
  std::string name;
  ParamList entries;
  int line = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

// Shortest text that parses back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_number(xs[i]);
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<Section> parse_sections(std::istream& in) {
  std::vector<Section> sections;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
      auto name = detail::trim(std::string_view(text).substr(1, text.size() - 2));
      if (name.empty()) throw ConfigError("line " + std::to_string(line) + ": empty section name");
      for (const auto& s : sections) {
        if (s.name == name) throw ConfigError("line " + std::to_string(line) + ": duplicate section [" + name + "]");
      }
      sections.push_back({std::move(name), {}, line});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    if (sections.empty()) throw ConfigError("line " + std::to_string(line) + ": key outside of any section");
    auto key = detail::trim(std::string_view(text).substr(0, eq));
    auto value = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    auto& sec = sections.back();
    for (const auto& [k, v] : sec.entries) {
      if (k == key) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + sec.name + "." + key + "'");
    }
    sec.entries.emplace_back(std::move(key), std::move(value));
  }
  return sections;
}

inline void write_section(std::ostream& out, const Section& s) {
  out << '[' << s.name << "]\n";
  for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
}

// ---------------------------------------------------------------------------
// Reward models as sections.

struct ModelParams {
  std::string kind = "gaussian";  // gaussian | example1 | bump | table
  std::size_t K = 2;
  std::vector<double> tau;  // gaussian centers; empty = drawn per instance
  double epsilon_inst = 0.2;
  double epsilon_bump = 0.25;
  std::vector<double> peaks;      // bump peaks; empty = drawn per instance
  std::vector<double> lipschitz;  // bump slopes; empty = all 1
  std::vector<std::vector<std::pair<double, double>>> table;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

namespace detail {

inline std::vector<std::pair<double, double>> parse_knots(const std::string& key, const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("key '" + key + "': knots are written x:mean");
    const auto x = parse_number_list(key, item.substr(0, colon)).at(0);
    const auto y = parse_number_list(key, item.substr(colon + 1)).at(0);
    out.emplace_back(x, y);
  }
  return out;
}

inline std::string format_knots(const std::vector<std::pair<double, double>>& knots) {
  std::string out;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i) out += ", ";
    out += format_number(knots[i].first) + ":" + format_number(knots[i].second);
  }
  return out;
}

}  // namespace detail

// Reads the model keys from `r`; other keys are left for the caller.
inline ModelParams read_model_params(ParamReader& r, const std::string& scope) {
  ModelParams m;
  m.kind = r.choice("kind", m.kind, {"gaussian", "example1", "bump", "table"});
  const long K = r.integer("K", 2);
  if (K < 1) throw ConfigError("key '" + scope + ".K' must be at least 1");
  m.K = static_cast<std::size_t>(K);
  auto list = [&](const std::string& key) -> std::vector<double> {
    const auto* v = r.find(key);
    if (!v) return {};
    auto xs = parse_number_list(scope + "." + key, *v);
    if (xs.size() != m.K) throw ConfigError("key '" + scope + "." + key + "' must list K values");
    return xs;
  };
  if (m.kind == "gaussian") {
    m.tau = list("tau");
  } else if (m.kind == "example1") {
    if (m.K != 2) throw ConfigError("key '" + scope + ".K' must be 2 for example1");
    m.epsilon_inst = r.number("epsilon_inst", m.epsilon_inst);
  } else if (m.kind == "bump") {
    if (const auto* v = r.find("epsilon_bump")) {
      try {
        m.epsilon_bump = 1.0 / parse_grid_levels(*v);
      } catch (const InvalidDiscretization& e) {
        throw ConfigError("key '" + scope + ".epsilon_bump': " + e.what());
      }
    }
    m.peaks = list("peaks");
    m.lipschitz = list("lipschitz");
  } else {
    for (std::size_t k = 0; k < m.K; ++k) {
      const auto key = "table." + std::to_string(k);
      const auto* v = r.find(key);
      if (!v) throw ConfigError("key '" + scope + "." + key + "' is required for a table model");
      m.table.push_back(detail::parse_knots(scope + "." + key, *v));
    }
  }
  return m;
}

inline void append_model_params(ParamList& out, const ModelParams& m) {
  out.emplace_back("kind", m.kind);
  out.emplace_back("K", std::to_string(m.K));
  if (m.kind == "gaussian") {
    if (!m.tau.empty()) out.emplace_back("tau", detail::format_list(m.tau));
  } else if (m.kind == "example1") {
    out.emplace_back("epsilon_inst", detail::format_number(m.epsilon_inst));
  } else if (m.kind == "bump") {
    out.emplace_back("epsilon_bump", "1/" + std::to_string(std::lround(1.0 / m.epsilon_bump)));
    if (!m.peaks.empty()) out.emplace_back("peaks", detail::format_list(m.peaks));
    if (!m.lipschitz.empty()) out.emplace_back("lipschitz", detail::format_list(m.lipschitz));
  } else {
    for (std::size_t k = 0; k < m.table.size(); ++k) {
      out.emplace_back("table." + std::to_string(k), detail::format_knots(m.table[k]));
    }
  }
}

// Builds instance `index` of the family. Unspecified random parameters
// (gaussian centers, bump peaks) are drawn from derive_seed(seed, index).
inline RewardModel build_model(const ModelParams& m, std::uint64_t seed = 0, std::size_t index = 0) {
  Rng rng(derive_seed(seed, index));
  if (m.kind == "gaussian") {
    return m.tau.empty() ? make_gaussian_instance(m.K, rng) : make_gaussian_model(m.tau);
  }
  if (m.kind == "example1") return make_example1_model(m.epsilon_inst);
  if (m.kind == "bump") {
    if (m.peaks.empty()) {
      auto model = make_bump_instance(m.K, m.epsilon_bump, rng);
      if (m.lipschitz.empty()) return model;
      return make_bump_model(std::get<BumpInstance>(model.family()).peaks, m.epsilon_bump, m.lipschitz);
    }
    return make_bump_model(m.peaks, m.epsilon_bump,
                           m.lipschitz.empty() ? std::vector<double>(m.K, 1.0) : m.lipschitz);
  }
  if (m.kind == "table") return make_table_model(m.table);
  throw ConfigError("unknown environment kind '" + m.kind + "'");
}

// The fully specified parameters of a concrete model.
inline ModelParams describe_model(const RewardModel& model) {
  ModelParams m;
  m.K = model.arms();
  m.kind = std::string(model.kind());
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ScaledGaussian>) {
          m.tau = f.centers;
        } else if constexpr (std::is_same_v<F, LockInInstance>) {
          m.epsilon_inst = f.epsilon;
        } else if constexpr (std::is_same_v<F, BumpInstance>) {
          m.epsilon_bump = f.height;
          m.peaks = f.peaks;
          m.lipschitz = f.slopes;
        } else {
          m.table = f.knots;
        }
      },
      model.family());
  return m;
}

inline void write_model(std::ostream& out, const RewardModel& model) {
  Section s{"model", {}, 0};
  append_model_params(s.entries, describe_model(model));
  write_section(out, s);
}

inline RewardModel read_model(std::istream& in) {
  const auto sections = parse_sections(in);
  if (sections.size() != 1 || sections[0].name != "model") {
    throw ConfigError("a model file holds exactly one [model] section");
  }
  ParamReader r(sections[0].entries, "model");
  auto params = read_model_params(r, "model");
  r.finish();
  try {
    return build_model(params);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline RewardModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path.string() + "'");
  return read_model(in);
}

// ---------------------------------------------------------------------------
// Experiment configuration.

struct EnvironmentConfig {
  ModelParams model;
  double gamma = 0.0;
  std::string model_file;  // when set, replaces the inline model keys

  friend bool operator==(const EnvironmentConfig&, const EnvironmentConfig&) = default;
};

struct ExperimentConfig {
  long T = 10000;
  std::size_t runs = 20;
  std::uint64_t master_seed = 1;
  std::size_t instances = 1;  // instance-seed sweep: instances x runs episodes
  std::uint64_t instance_seed = 1;
  int levels = 0;             // policy grid 1/levels; 0 = automatic schedule
  double c_epsilon = 1.0;
  double rho = 0.2;
  std::size_t checkpoints = 100;
  std::string output = "results";
  int benchmark_levels = 0;  // 0 = automatic refinement of the policy grid
  EnvironmentConfig environment;
  std::vector<PolicySpec> policies;
  std::filesystem::path base_dir;  // resolves relative model_file paths; not serialized

  bool operator==(const ExperimentConfig& o) const {
    auto same_policies = policies.size() == o.policies.size();
    for (std::size_t i = 0; same_policies && i < policies.size(); ++i) {
      same_policies = policies[i].label == o.policies[i].label && policies[i].type == o.policies[i].type &&
                      policies[i].params == o.policies[i].params;
    }
    return T == o.T && runs == o.runs && master_seed == o.master_seed && instances == o.instances &&
           instance_seed == o.instance_seed && levels == o.levels && c_epsilon == o.c_epsilon && rho == o.rho &&
           checkpoints == o.checkpoints && output == o.output && benchmark_levels == o.benchmark_levels &&
           environment == o.environment && same_policies;
  }
};

namespace detail {

inline int read_levels(ParamReader& r, const std::string& key, const std::string& scope) {
  const auto* v = r.find(key);
  if (!v || *v == "auto") return 0;
  try {
    return parse_grid_levels(*v);
  } catch (const InvalidDiscretization& e) {
    throw ConfigError("key '" + scope + "." + key + "': " + e.what());
  }
}

inline std::string format_levels(int levels) { return levels == 0 ? "auto" : "1/" + std::to_string(levels); }

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  const auto sections = parse_sections(in);
  ExperimentConfig cfg;
  bool saw_experiment = false, saw_environment = false;
  for (const auto& sec : sections) {
    if (sec.name == "experiment") {
      saw_experiment = true;
      ParamReader r(sec.entries, "experiment");
      cfg.T = r.integer("T", cfg.T);
      const long runs = r.integer("runs", static_cast<long>(cfg.runs));
      if (const auto* v = r.find("master_seed")) cfg.master_seed = detail::parse_u64("experiment.master_seed", *v);
      const long instances = r.integer("instances", static_cast<long>(cfg.instances));
      if (const auto* v = r.find("instance_seed")) {
        cfg.instance_seed = detail::parse_u64("experiment.instance_seed", *v);
      }
      cfg.levels = detail::read_levels(r, "epsilon", "experiment");
      cfg.c_epsilon = r.number("c_epsilon", cfg.c_epsilon);
      cfg.rho = r.number("rho", cfg.rho);
      const long checkpoints = r.integer("checkpoints", static_cast<long>(cfg.checkpoints));
      cfg.output = r.text("output", cfg.output);
      cfg.benchmark_levels = detail::read_levels(r, "benchmark_resolution", "experiment");
      r.finish();
      if (cfg.T < 1) throw ConfigError("key 'experiment.T' must be at least 1");
      if (runs < 1) throw ConfigError("key 'experiment.runs' must be at least 1");
      if (instances < 1) throw ConfigError("key 'experiment.instances' must be at least 1");
      if (checkpoints < 1) throw ConfigError("key 'experiment.checkpoints' must be at least 1");
      if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw ConfigError("key 'experiment.rho' must lie in (0, 1)");
      if (!(cfg.c_epsilon > 0.0)) throw ConfigError("key 'experiment.c_epsilon' must be positive");
      cfg.runs = static_cast<std::size_t>(runs);
      cfg.instances = static_cast<std::size_t>(instances);
      cfg.checkpoints = static_cast<std::size_t>(checkpoints);
    } else if (sec.name == "environment") {
      saw_environment = true;
      ParamReader r(sec.entries, "environment");
      cfg.environment.gamma = r.number("gamma", 0.0);
      if (!(cfg.environment.gamma >= 0.0 && cfg.environment.gamma < 1.0)) {
        throw ConfigError("key 'environment.gamma' must lie in [0, 1)");
      }
      cfg.environment.model_file = r.text("model_file", "");
      if (cfg.environment.model_file.empty()) cfg.environment.model = read_model_params(r, "environment");
      r.finish();
    } else if (sec.name.starts_with("policy.")) {
      PolicySpec spec;
      spec.label = sec.name.substr(7);
      if (spec.label.empty()) throw ConfigError("line " + std::to_string(sec.line) + ": empty policy label");
      for (char c : spec.label) {
        // Labels name output files.
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
          throw ConfigError("line " + std::to_string(sec.line) + ": policy label '" + spec.label +
                            "' may only use letters, digits, '_', '-' and '.'");
        }
      }
      spec.type = spec.label;
      for (const auto& [k, v] : sec.entries) {
        if (k == "type") {
          spec.type = v;
        } else {
          spec.params.emplace_back(k, v);
        }
      }
      cfg.policies.push_back(std::move(spec));
    } else {
      throw ConfigError("line " + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
    }
  }
  if (!saw_experiment) throw ConfigError("missing [experiment] section");
  if (!saw_environment) throw ConfigError("missing [environment] section");
  if (cfg.policies.empty()) throw ConfigError("no [policy.*] section");
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  auto cfg = parse_config(in);
  cfg.base_dir = path.parent_path();
  return cfg;
}

// Canonical form: fixed section and key order, every experiment key spelled out.
inline void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  Section exp{"experiment", {}, 0};
  exp.entries = {{"T", std::to_string(cfg.T)},
                 {"runs", std::to_string(cfg.runs)},
                 {"master_seed", std::to_string(cfg.master_seed)},
                 {"instances", std::to_string(cfg.instances)},
                 {"instance_seed", std::to_string(cfg.instance_seed)},
                 {"epsilon", detail::format_levels(cfg.levels)},
                 {"c_epsilon", detail::format_number(cfg.c_epsilon)},
                 {"rho", detail::format_number(cfg.rho)},
                 {"checkpoints", std::to_string(cfg.checkpoints)},
                 {"output", cfg.output},
                 {"benchmark_resolution", detail::format_levels(cfg.benchmark_levels)}};
  write_section(out, exp);
  out << '\n';
  Section env{"environment", {}, 0};
  env.entries.emplace_back("gamma", detail::format_number(cfg.environment.gamma));
  if (cfg.environment.model_file.empty()) {
    append_model_params(env.entries, cfg.environment.model);
  } else {
    env.entries.emplace_back("model_file", cfg.environment.model_file);
  }
  write_section(out, env);
  for (const auto& p : cfg.policies) {
    out << '\n';
    Section s{"policy." + p.label, {{"type", p.type}}, 0};
    for (const auto& kv : p.params) s.entries.push_back(kv);
    write_section(out, s);
  }
}

inline std::string to_string(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_config(out, cfg);
  return out.str();
}

// ---------------------------------------------------------------------------
// Materialized experiment: one scenario per instance, runs x instances episodes.

struct Experiment {
  ExperimentConfig config;
  int levels = 0;
  std::vector<std::shared_ptr<const Scenario>> scenarios;
  std::vector<Episode> episodes;
  std::vector<long> checkpoints;
};

inline int resolve_levels(const ExperimentConfig& cfg, std::size_t K) {
  if (cfg.levels > 0) return cfg.levels;
  return schedule_params(cfg.T, K, cfg.environment.gamma, cfg.rho, cfg.c_epsilon).levels;
}

// Builds every scenario and dry-constructs every policy, so configuration
// mistakes surface as ConfigError before any episode runs.
inline Experiment prepare_experiment(const ExperimentConfig& cfg) {
  Experiment ex;
  ex.config = cfg;
  try {
    std::optional<RewardModel> fixed;
    if (!cfg.environment.model_file.empty()) {
      std::filesystem::path p = cfg.environment.model_file;
      if (p.is_relative()) p = cfg.base_dir / p;
      fixed = load_model_file(p);
    }
    for (std::size_t i = 0; i < cfg.instances; ++i) {
      auto model = fixed ? *fixed : build_model(cfg.environment.model, cfg.instance_seed, i);
      if (i == 0) ex.levels = resolve_levels(cfg, model.arms());
      ex.scenarios.push_back(std::make_shared<const Scenario>(
          make_scenario(std::move(model), cfg.environment.gamma, ex.levels, cfg.rho, cfg.benchmark_levels)));
    }
    for (const auto& spec : cfg.policies) {
      auto policy = make_policy(spec, make_context(*ex.scenarios.front(), cfg.T));
      if (policy->init_rounds() > cfg.T) {
        throw ConfigError("horizon " + std::to_string(cfg.T) + " is shorter than the initialization of policy '" +
                          spec.label + "' (" + std::to_string(policy->init_rounds()) + " rounds)");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto seeds = episode_seeds(cfg.master_seed, cfg.instances * cfg.runs);
  for (std::size_t i = 0; i < seeds.size(); ++i) ex.episodes.push_back({ex.scenarios[i / cfg.runs], seeds[i]});
  ex.checkpoints = log_checkpoints(cfg.T, cfg.checkpoints);
  return ex;
}

}  // namespace impact
