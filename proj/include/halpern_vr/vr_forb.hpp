#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "halpern_vr/core.hpp"

namespace hvr {

/// A + B with A = (1/n) sum_i A_i single-valued and B given by its resolvent.
struct SplitOperator {
  std::size_t n = 0;
  std::size_t d = 0;
  std::function<Vector(const Vector&)> A_full;
  std::function<Vector(std::size_t, const Vector&)> A_component;
  std::function<Vector(double, const Vector&)> B_resolvent;
  /// Expected Lipschitz constant of A under the sampling distribution.
  double L_A = 0.0;
  /// Strong monotonicity modulus of A + B (0 when only monotone).
  double mu = 0.0;
  /// Epoch cost of one A_i call.
  double component_cost = 0.0;

  std::size_t parameter_n() const { return cost_ratio_n(n, component_cost); }
};

/// Wraps a problem as A = F, B = G.
SplitOperator split_from_problem(const ProblemInstance& problem);

struct ForbParams {
  double p = 1.0;
  double alpha = 0.0;
  double tau = 0.0;
};

/// p = 1/n, alpha = 1 - p, tau = sqrt(p(1-p))/(2 L_A). For n = 1 the step
/// would vanish, so the deterministic method p = 1, tau = 1/(2 L_A) is used.
ForbParams forb_params(std::size_t n, double L_A);
/// Same formulas with an explicit refresh probability p in (0, 1).
ForbParams forb_params_with_p(double p, double L_A);

struct ForbState {
  std::size_t k = 0;
  Vector v;
  Vector w;
  Vector w_prev;
  /// A(w), refreshed only when w moves.
  Vector A_w;
  /// Element of B(v) recovered from the last resolvent step.
  Vector g;
};

ForbState forb_init(const Vector& u, const SplitOperator& op, EvalCounter& counter);

/// v_hat = alpha v + (1-alpha) w; draw i ~ Q;
/// v+ = J_{tau B}(v_hat - tau [A(w) - A_i(w_prev)/(n q_i) + A_i(v)/(n q_i)]);
/// then w <- v+ with probability p (one full evaluation of A).
void forb_step(ForbState& state, const SplitOperator& op, const ForbParams& params,
               const SamplingDistribution& q, RngStream& rng, EvalCounter& counter);

/// ceil(14 max{n, sqrt(n) L_A / mu} log(sqrt(6) dist0 / eps_bar)); 1 when the
/// logarithm is not positive.
std::size_t theorem3_iterations(std::size_t n, double L_A, double mu, double dist0,
                                double eps_bar);

/// M steps from v_0 = w_0 = w_{-1} = u_init; returns v_M.
Vector run_forb(const Vector& u_init, std::size_t M, const SplitOperator& op,
                const SamplingDistribution& q, RngStream& rng, EvalCounter& counter,
                std::optional<ForbParams> params = std::nullopt);

/// Standalone use of the method on 0 in F + G.
struct ForbConfig {
  std::uint64_t seed = 0;
  /// Overrides tau from forb_params.
  std::optional<double> tau_override;
  /// Overrides the refresh probability (defaults to 1/n).
  std::optional<double> p_override;
  RunControl control;
};

struct ForbResult {
  ForbState state;
  EvalCounter counter;
  std::vector<TraceRecord> trace;
};

/// Logs the problem metric if present, else ||F(v_k) + g_k||.
ForbResult run_forb_solver(const ProblemInstance& problem, const Vector& u0,
                           const ForbConfig& config);

}  // namespace hvr
