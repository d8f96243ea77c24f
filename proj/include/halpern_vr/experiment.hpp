#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halpern_vr/core.hpp"
#include "halpern_vr/inexact_halpern.hpp"
#include "halpern_vr/problems.hpp"

namespace hvr {

enum class Algorithm { kVrHalpern, kInexactHalpern, kVrForb, kExtragradient };
enum class ProblemKind { kMatrixGame, kOuyangXu, kSyntheticCoco, kSyntheticMonotone };

std::string to_string(Algorithm a);
std::string to_string(ProblemKind p);
std::string to_string(SamplingMode s);
std::string to_string(InnerSchedule s);

/// Configuration error carrying the offending key (and line, for files).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kMatrixGame;
  Algorithm algorithm = Algorithm::kVrHalpern;

  // Problem parameters.
  std::size_t m = 100;           ///< matrix game / quadratic program size
  double theta = 0.8;            ///< policeman-burglar decay
  std::size_t n = 8;             ///< synthetic: components
  std::size_t d = 4;             ///< synthetic: dimension
  double L_target = 1.0;         ///< synthetic-coco modulus
  double mu = 0.0;               ///< synthetic-monotone strong monotonicity
  std::uint64_t problem_seed = 1;
  std::string matrix_path;       ///< load the game matrix from CSV instead
  SamplingMode sampling = SamplingMode::kUniform;

  // Runs.
  std::uint64_t seed = 0;
  std::size_t seeds = 1;         ///< seeds seed, seed+1, ..., seed+seeds-1
  double epochs = 100.0;
  std::size_t max_iters = 10'000'000;
  std::size_t log_stride = 1;
  double divergence_factor = 1e6;

  // Step overrides (defaults are each method's theoretical choice).
  std::optional<double> eta;     ///< vr-halpern and inexact-halpern step
  std::optional<double> tau;     ///< eg step, vr-forb step, inexact-halpern inner step
  std::optional<double> forb_p;  ///< vr-forb / inner refresh probability
  InnerSchedule inner_schedule = InnerSchedule::kPractical;
  double c0 = 0.05;

  std::string out;               ///< CSV path; metadata goes to <out>.meta.json
};

/// Applies one key=value setting (keys match the long CLI flag names without
/// dashes, e.g. "inner-schedule"). Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat key=value file; '#' starts a comment; blank lines ignored. Errors
/// name the line number.
void apply_config_file(ExperimentConfig& config, const std::string& path);

/// Cross-field checks (positive budget, at least one seed, ...).
void validate(const ExperimentConfig& config);

/// Every effective setting as strings, for the metadata record.
std::map<std::string, std::string> effective_settings(const ExperimentConfig& config);

ProblemInstance build_problem(const ExperimentConfig& config);

struct SeedTrace {
  std::uint64_t seed = 0;
  std::string run_id;
  std::vector<TraceRecord> trace;
};

struct ExperimentResult {
  std::string algorithm;
  std::string problem;
  std::vector<SeedTrace> runs;
  std::map<std::string, std::string> metadata;
};

/// Runs one trace for a given seed on an already-built instance.
std::vector<TraceRecord> run_single(const ExperimentConfig& config, const ProblemInstance& problem,
                                    std::uint64_t seed);

/// All seeds, at most `threads` at a time (0 = HALPERN_VR_THREADS or the
/// hardware concurrency). Output order is by seed regardless of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads = 0);

/// Writes <path> (CSV) and <path>.meta.json.
void write_experiment(const ExperimentResult& result, const std::string& path);

/// Git revision the library was built from.
const char* build_id();

}  // namespace hvr
