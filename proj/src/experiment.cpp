#include "halpern_vr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "halpern_vr/csv.hpp"
#include "halpern_vr/extragradient.hpp"
#include "halpern_vr/halpern_coco.hpp"
#include "halpern_vr/vr_forb.hpp"

#ifndef HVR_BUILD_ID
#define HVR_BUILD_ID "unknown"
#endif

namespace hvr {

const char* build_id() { return HVR_BUILD_ID; }

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kVrHalpern: return "vr-halpern";
    case Algorithm::kInexactHalpern: return "inexact-halpern";
    case Algorithm::kVrForb: return "vr-forb";
    case Algorithm::kExtragradient: return "eg";
  }
  return "?";
}

std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::kMatrixGame: return "matrix-game";
    case ProblemKind::kOuyangXu: return "ouyang-xu";
    case ProblemKind::kSyntheticCoco: return "synthetic-coco";
    case ProblemKind::kSyntheticMonotone: return "synthetic-monotone";
  }
  return "?";
}

std::string to_string(SamplingMode s) {
  return s == SamplingMode::kImportance ? "importance" : "uniform";
}

std::string to_string(InnerSchedule s) {
  return s == InnerSchedule::kTheoretical ? "theoretical" : "practical";
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("config: invalid value '" + value + "' for '" + key + "' (expected " +
                    expected + ")");
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    bad_value(key, value, "a nonnegative integer");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite real number");
  }
  return out;
}

double parse_positive(const std::string& key, const std::string& value) {
  const double v = parse_real(key, value);
  if (!(v > 0.0)) bad_value(key, value, "a positive real number");
  return v;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string("default");
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "problem") {
    if (value == "matrix-game") c.problem = ProblemKind::kMatrixGame;
    else if (value == "ouyang-xu") c.problem = ProblemKind::kOuyangXu;
    else if (value == "synthetic-coco") c.problem = ProblemKind::kSyntheticCoco;
    else if (value == "synthetic-monotone") c.problem = ProblemKind::kSyntheticMonotone;
    else bad_value(key, value, "matrix-game|ouyang-xu|synthetic-coco|synthetic-monotone");
  } else if (key == "algorithm") {
    if (value == "vr-halpern") c.algorithm = Algorithm::kVrHalpern;
    else if (value == "inexact-halpern") c.algorithm = Algorithm::kInexactHalpern;
    else if (value == "vr-forb") c.algorithm = Algorithm::kVrForb;
    else if (value == "eg") c.algorithm = Algorithm::kExtragradient;
    else bad_value(key, value, "vr-halpern|inexact-halpern|vr-forb|eg");
  } else if (key == "m") {
    c.m = parse_integer<std::size_t>(key, value);
  } else if (key == "theta") {
    c.theta = parse_real(key, value);
  } else if (key == "n") {
    c.n = parse_integer<std::size_t>(key, value);
  } else if (key == "d") {
    c.d = parse_integer<std::size_t>(key, value);
  } else if (key == "L") {
    c.L_target = parse_positive(key, value);
  } else if (key == "mu") {
    c.mu = parse_real(key, value);
  } else if (key == "problem-seed") {
    c.problem_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "matrix") {
    c.matrix_path = value;
  } else if (key == "sampling") {
    if (value == "uniform") c.sampling = SamplingMode::kUniform;
    else if (value == "importance") c.sampling = SamplingMode::kImportance;
    else bad_value(key, value, "uniform|importance");
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "seeds") {
    c.seeds = parse_integer<std::size_t>(key, value);
  } else if (key == "epochs") {
    c.epochs = parse_positive(key, value);
  } else if (key == "max-iters") {
    c.max_iters = parse_integer<std::size_t>(key, value);
  } else if (key == "log-stride") {
    c.log_stride = parse_integer<std::size_t>(key, value);
  } else if (key == "divergence-factor") {
    c.divergence_factor = parse_positive(key, value);
  } else if (key == "eta") {
    c.eta = parse_positive(key, value);
  } else if (key == "tau") {
    c.tau = parse_positive(key, value);
  } else if (key == "forb-p") {
    c.forb_p = parse_positive(key, value);
  } else if (key == "inner-schedule") {
    if (value == "practical") c.inner_schedule = InnerSchedule::kPractical;
    else if (value == "theoretical") c.inner_schedule = InnerSchedule::kTheoretical;
    else bad_value(key, value, "practical|theoretical");
  } else if (key == "c0") {
    c.c0 = parse_positive(key, value);
  } else if (key == "out") {
    c.out = value;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void validate(const ExperimentConfig& c) {
  if (!(c.epochs > 0.0)) throw ConfigError("config: 'epochs' must be positive");
  if (c.seeds < 1) throw ConfigError("config: 'seeds' must be at least 1");
  if (c.max_iters < 1) throw ConfigError("config: 'max-iters' must be at least 1");
  if (c.log_stride < 1) throw ConfigError("config: 'log-stride' must be at least 1");
  if (c.forb_p && !(*c.forb_p < 1.0)) throw ConfigError("config: 'forb-p' must lie in (0, 1)");
  switch (c.problem) {
    case ProblemKind::kMatrixGame:
      if (c.matrix_path.empty() && c.m < 1) throw ConfigError("config: 'm' must be at least 1");
      break;
    case ProblemKind::kOuyangXu:
      if (c.m < 2) throw ConfigError("config: 'm' must be at least 2 for ouyang-xu");
      break;
    case ProblemKind::kSyntheticCoco:
    case ProblemKind::kSyntheticMonotone:
      if (c.n < 1 || c.d < 1) throw ConfigError("config: 'n' and 'd' must be at least 1");
      if (c.mu < 0.0) throw ConfigError("config: 'mu' must be nonnegative");
      break;
  }
  if (c.problem != ProblemKind::kMatrixGame && c.sampling == SamplingMode::kImportance) {
    throw ConfigError("config: importance sampling is only defined for matrix-game");
  }
}

std::map<std::string, std::string> effective_settings(const ExperimentConfig& c) {
  return {
      {"problem", to_string(c.problem)},
      {"algorithm", to_string(c.algorithm)},
      {"m", std::to_string(c.m)},
      {"theta", format_real(c.theta)},
      {"n", std::to_string(c.n)},
      {"d", std::to_string(c.d)},
      {"L", format_real(c.L_target)},
      {"mu", format_real(c.mu)},
      {"problem-seed", std::to_string(c.problem_seed)},
      {"matrix", c.matrix_path},
      {"sampling", to_string(c.sampling)},
      {"seed", std::to_string(c.seed)},
      {"seeds", std::to_string(c.seeds)},
      {"epochs", format_real(c.epochs)},
      {"max-iters", std::to_string(c.max_iters)},
      {"log-stride", std::to_string(c.log_stride)},
      {"divergence-factor", format_real(c.divergence_factor)},
      {"eta", optional_real(c.eta)},
      {"tau", optional_real(c.tau)},
      {"forb-p", optional_real(c.forb_p)},
      {"inner-schedule", to_string(c.inner_schedule)},
      {"c0", format_real(c.c0)},
      {"out", c.out},
  };
}

ProblemInstance build_problem(const ExperimentConfig& c) {
  switch (c.problem) {
    case ProblemKind::kMatrixGame: {
      MatrixGame game;
      if (!c.matrix_path.empty()) {
        game.A = load_matrix_csv(c.matrix_path);
      } else {
        RngStream rng(c.problem_seed);
        game.A = policeman_burglar_matrix(c.m, c.theta, rng);
      }
      return matrix_game_problem(game, c.sampling);
    }
    case ProblemKind::kOuyangXu:
      return ouyang_xu_problem(c.m);
    case ProblemKind::kSyntheticCoco:
      return synthetic_cocoercive(c.n, c.d, c.L_target, c.problem_seed);
    case ProblemKind::kSyntheticMonotone:
      return synthetic_affine(c.n, c.d, c.mu, c.problem_seed);
  }
  throw ConfigError("config: unknown problem");
}

std::vector<TraceRecord> run_single(const ExperimentConfig& c, const ProblemInstance& problem,
                                    std::uint64_t seed) {
  RunControl control;
  control.max_iters = c.max_iters;
  control.epoch_budget = c.epochs;
  control.log_stride = c.log_stride;
  control.divergence_factor = c.divergence_factor;
  const Vector u0 =
      problem.default_start.size() != 0 ? problem.default_start : Vector::Zero(problem.d);

  switch (c.algorithm) {
    case Algorithm::kVrHalpern: {
      CocoHalpernConfig cfg;
      cfg.L = problem.L;
      cfg.seed = seed;
      cfg.eta_override = c.eta;
      cfg.control = control;
      return run_coco_halpern(problem, u0, cfg).trace;
    }
    case Algorithm::kInexactHalpern: {
      MonotoneHalpernConfig cfg;
      cfg.L = problem.L;
      cfg.eta = c.eta;
      cfg.seed = seed;
      cfg.inner_schedule = c.inner_schedule;
      cfg.c0 = c.c0;
      cfg.inner_p = c.forb_p;
      cfg.inner_tau = c.tau;
      cfg.control = control;
      return run_monotone_halpern(problem, u0, cfg).trace;
    }
    case Algorithm::kVrForb: {
      ForbConfig cfg;
      cfg.seed = seed;
      cfg.tau_override = c.tau;
      cfg.p_override = c.forb_p;
      cfg.control = control;
      return run_forb_solver(problem, u0, cfg).trace;
    }
    case Algorithm::kExtragradient: {
      ExtragradientConfig cfg;
      cfg.tau = c.tau;
      cfg.control = control;
      return eg_baseline(problem, u0, cfg).trace;
    }
  }
  throw ConfigError("config: unknown algorithm");
}

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("HALPERN_VR_THREADS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
  validate(config);
  const ProblemInstance problem = build_problem(config);
  validate(problem);

  ExperimentResult result;
  result.algorithm = to_string(config.algorithm);
  result.problem = to_string(config.problem);
  result.metadata = effective_settings(config);
  result.metadata["build-id"] = build_id();
  result.metadata["problem.n"] = std::to_string(problem.n);
  result.metadata["problem.d"] = std::to_string(problem.d);
  result.metadata["problem.L"] = format_real(problem.L);
  result.metadata["problem.L_F"] = format_real(problem.L_F);
  result.metadata["problem.component_cost"] = format_real(problem.component_cost);

  result.runs.resize(config.seeds);
  for (std::size_t s = 0; s < config.seeds; ++s) {
    auto& run = result.runs[s];
    run.seed = config.seed + s;
    run.run_id = result.algorithm + ":" + result.problem + ":" + std::to_string(run.seed);
  }

  if (threads == 0) threads = default_threads();
  threads = std::min(threads, config.seeds);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t s = next++; s < config.seeds; s = next++) {
      try {
        result.runs[s].trace = run_single(config, problem, result.runs[s].seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

void write_experiment(const ExperimentResult& result, const std::string& path) {
  std::vector<CsvRow> rows;
  for (const auto& run : result.runs) {
    for (const auto& rec : run.trace) {
      rows.push_back({run.run_id, result.algorithm, result.problem, run.seed, rec});
    }
  }
  emit_csv(rows, path);

  nlohmann::ordered_json meta;
  meta["algorithm"] = result.algorithm;
  meta["problem"] = result.problem;
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.metadata) settings[k] = v;
  meta["settings"] = settings;
  nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
  for (const auto& run : result.runs) seeds.push_back(run.seed);
  meta["seeds"] = seeds;
  const std::string meta_path = path + ".meta.json";
  std::ofstream out(meta_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
  out << meta.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to '" + meta_path + "' failed");
}

}  // namespace hvr
