#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "halpern_vr/errors.hpp"
#include "halpern_vr/rng.hpp"

namespace hvr {

/// Points, operator values and resolvent outputs all live in R^d.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

void require_dimension(const Vector& v, std::size_t d, const char* what);
bool all_finite(const Vector& v);

/// ||f + g||_2, the residual of 0 in F + G certified by g in G(u).
double residual_norm(const Vector& f_value, const Vector& g_value);

/**
 * Oracle-cost ledger.
 *
 * A full evaluation of F costs one epoch. A single component call costs
 * `component_cost` epochs (1/n unless the problem says otherwise), and is
 * recorded in `component_evals()` as n * component_cost "generic component
 * equivalents" so that epochs() = component_evals() / n + full_evals().
 * Resolvent calls are counted but do not contribute to epochs.
 */
class EvalCounter {
 public:
  EvalCounter() = default;
  EvalCounter(std::size_t n, double component_cost);

  void charge_full(std::uint64_t count = 1) { full_evals_ += count; }
  void charge_components(std::uint64_t count);
  void charge_resolvent(std::uint64_t count = 1) { resolvent_calls_ += count; }

  std::size_t n() const { return n_; }
  double component_cost() const { return component_cost_; }
  double component_evals() const { return component_evals_; }
  std::uint64_t component_calls() const { return component_calls_; }
  std::uint64_t full_evals() const { return full_evals_; }
  std::uint64_t resolvent_calls() const { return resolvent_calls_; }
  double epochs() const;

 private:
  std::size_t n_ = 1;
  double component_cost_ = 1.0;
  double component_evals_ = 0.0;
  std::uint64_t component_calls_ = 0;
  std::uint64_t full_evals_ = 0;
  std::uint64_t resolvent_calls_ = 0;
};

/// round(1/component_cost) clamped to [1, n]; equals n for the default cost.
std::size_t cost_ratio_n(std::size_t n, double component_cost);

/// F(u) = M u + c.
struct AffineForm {
  Matrix M;
  Vector c;
};

/**
 * Finite-sum monotone inclusion 0 in F(u) + G(u) with F = (1/n) sum_i F_i.
 *
 * The oracles are plain callables. The wrappers below check dimensions and
 * never touch an EvalCounter: solvers charge their own algorithmic calls,
 * and metric evaluations stay out of the ledger.
 *
 * `sampling` is the distribution Q used by the sampling-based solvers.
 * Component i is the finite-sum term F_i, so the unbiased single-sample
 * estimate of F is F_i(u) / (n q_i).
 */
struct ProblemInstance {
  using FullOracle = std::function<Vector(const Vector&)>;
  using ComponentOracle = std::function<Vector(std::size_t, const Vector&)>;
  using ResolventOracle = std::function<Vector(double, const Vector&)>;
  using Metric = std::function<double(const Vector&)>;

  std::string name;
  std::size_t n = 0;
  std::size_t d = 0;
  FullOracle eval_full;
  ComponentOracle eval_component;
  /// J_{eta G}; identity when G = 0.
  ResolventOracle resolvent_G;
  /// Average cocoercivity / expected Lipschitz modulus.
  double L = 0.0;
  /// Lipschitz constant of the full operator.
  double L_F = 0.0;
  double component_cost = 0.0;
  SamplingDistribution sampling;
  std::optional<Vector> known_solution;
  /// Present when F is affine; enables exact resolvent oracles in tests.
  std::optional<AffineForm> affine;
  /// Problem-specific optimality measure (gradient mapping, ||F(u)||, ...).
  /// When absent, solvers log ||F(u) + g|| with their certified g.
  Metric metric;
  Vector default_start;
  bool has_nontrivial_G = false;

  Vector F(const Vector& u) const;
  Vector F_component(std::size_t i, const Vector& u) const;
  /// F_i(u) / (n q_i).
  Vector F_sampled(std::size_t i, const Vector& u) const;
  /// n as seen by step-size and probability formulas: the number of
  /// component calls that cost one full evaluation, clamped to [1, n].
  std::size_t parameter_n() const { return cost_ratio_n(n, component_cost); }
  Vector resolvent(double eta, const Vector& u) const;
};

/// Throws InvalidArgument if the instance is structurally unusable.
void validate(const ProblemInstance& problem);

/// Identity resolvent for G = 0.
ProblemInstance::ResolventOracle zero_G_resolvent();

struct TraceRecord {
  std::size_t iter = 0;
  double oracle_epochs = 0.0;
  double residual_metric = 0.0;
  double elapsed_ms = 0.0;
};

/// Shared stopping and logging knobs for the solver drivers.
struct RunControl {
  std::size_t max_iters = 1000;
  /// Stop once the ledger reaches this many epochs (checked between
  /// iterations; the first iteration always runs).
  double epoch_budget = std::numeric_limits<double>::infinity();
  std::size_t log_stride = 1;
  /// Abort when the logged residual exceeds this multiple of the first one.
  double divergence_factor = 1e6;
};

/// Throws NumericalDivergence when `residual` is nonfinite or exceeds
/// factor * max(reference, 1e-12).
void check_divergence(double residual, double reference, double factor, std::size_t iter,
                      const char* solver);

/// Collects TraceRecords at the configured stride and applies the
/// divergence guard to every logged residual.
class TraceLogger {
 public:
  TraceLogger(const RunControl& control, const char* solver);

  bool due(std::size_t iter) const { return iter % control_.log_stride == 0; }
  void record(std::size_t iter, double epochs, double residual);
  bool logged(std::size_t iter) const { return !trace_.empty() && trace_.back().iter == iter; }
  bool empty() const { return trace_.empty(); }
  std::vector<TraceRecord> take() { return std::move(trace_); }

 private:
  RunControl control_;
  const char* solver_;
  std::chrono::steady_clock::time_point start_;
  std::vector<TraceRecord> trace_;
  double reference_ = 0.0;
};

// Structural probes of the standing assumptions, used by tests and the CLI's
// instance check.

/// max over random probes of ||(1/n) sum_i F_i(u) - F(u)|| / (1 + ||F(u)||).
double finite_sum_consistency_error(const ProblemInstance& problem, RngStream& rng,
                                    std::size_t probes, double scale = 1.0);

/// max over random probe pairs of ||J(a) - J(b)|| - ||a - b|| (should be <= 0).
double resolvent_expansion_excess(const ProblemInstance& problem, RngStream& rng,
                                  std::size_t probes, double eta = 1.0, double scale = 1.0);

Vector random_vector(std::size_t d, RngStream& rng, double scale = 1.0);

}  // namespace hvr
