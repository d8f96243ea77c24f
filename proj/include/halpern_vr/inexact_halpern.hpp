#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "halpern_vr/core.hpp"
#include "halpern_vr/vr_forb.hpp"

namespace hvr {

enum class InnerSchedule { kTheoretical, kPractical };

/// Halpern iteration on the resolvent of eta (F + G), each resolvent
/// approximated by VR-FoRB.
struct MonotoneHalpernConfig {
  /// Expected Lipschitz constant of F under the sampling distribution.
  double L = 1.0;
  /// Defaults to sqrt(n)/L.
  std::optional<double> eta;
  std::uint64_t seed = 0;
  InnerSchedule inner_schedule = InnerSchedule::kPractical;
  /// Constant of the practical schedule floor(c0 n log(k+2)).
  double c0 = 0.05;
  /// Defaults to the problem's distribution.
  std::optional<SamplingDistribution> sampling;
  /// Inner refresh probability; defaults to 1/n.
  std::optional<double> inner_p;
  /// Inner step; defaults to the forb_params value for L_A = eta L + 1.
  std::optional<double> inner_tau;
  /// control.max_iters counts outer iterations.
  RunControl control;

  double step(std::size_t n) const;
};

/// lambda_k = 1/(k+2), k >= 0.
double outer_lambda(std::size_t k);

/// Theoretical: ceil(56 max{n, sqrt(n)(eta L + 1)} log(1.252 (k+2))).
/// Practical: max(1, floor(c0 n log(k+2))).
std::size_t inner_iteration_count(std::size_t k, std::size_t n, double eta, double L,
                                  InnerSchedule schedule, double c0 = 0.05);

/// A(u) = eta F(u) + u - anchor, A_i(u) = eta F_i(u) + u - anchor, B = eta G.
/// The returned operator references `problem`; keep it alive.
SplitOperator make_subproblem_operator(const ProblemInstance& problem, const Vector& anchor,
                                       double eta, double L);

struct MonotoneHalpernState {
  std::size_t k = 0;
  Vector u0;
  Vector u;
  /// Subsolver output at the last outer step, approximating J_{eta(F+G)}(u_{k-1}).
  Vector last_resolvent;
  /// Outer iterate the last subproblem was anchored at.
  Vector last_anchor;
  EvalCounter counter;
  RngStream rng;
};

MonotoneHalpernState monotone_initial_state(const ProblemInstance& problem, const Vector& u0,
                                            const MonotoneHalpernConfig& config);

/// u_{k+1} = lambda_k u0 + (1 - lambda_k) VR-FoRB(u_k, M_k, subproblem at u_k).
void outer_step(MonotoneHalpernState& state, const ProblemInstance& problem,
                const MonotoneHalpernConfig& config);

/// (I + eta M)^{-1}(u - eta c) for affine F = M u + c and G = 0.
Vector exact_resolvent_affine(const ProblemInstance& problem, double eta, const Vector& u);

/// ||u - resolvent_value||, i.e. ||P^eta(u)|| when resolvent_value is exact.
double p_eta_norm(const Vector& u, const Vector& resolvent_value);

struct ResidualPoint {
  Vector u_bar;
  double residual = 0.0;
};

/// u_bar = resolvent_value with g_bar = (u - u_bar)/eta - F(u_bar) in G(u_bar)
/// when the resolvent is exact; residual = ||F(u_bar) + g_bar||.
ResidualPoint convert_to_residual_point(const ProblemInstance& problem, double eta,
                                        const Vector& u, const Vector& resolvent_value);

/// ceil(42 (n + sqrt(n)) log(19 n)).
std::size_t post_process_iterations(std::size_t n);

/// One more VR-FoRB solve of the subproblem anchored at u_K with the
/// post-processing iteration count.
Vector post_process(const ProblemInstance& problem, const Vector& u_K,
                    const MonotoneHalpernConfig& config, RngStream& rng, EvalCounter& counter);

struct MonotoneHalpernResult {
  MonotoneHalpernState state;
  std::vector<TraceRecord> trace;
};

/// Logs, per outer iteration, the problem metric at u_{k+1} if the problem
/// has one, else the residual certified at the subsolver output,
/// ||u_k - u_bar|| / eta.
MonotoneHalpernResult run_monotone_halpern(const ProblemInstance& problem, const Vector& u0,
                                           const MonotoneHalpernConfig& config);

}  // namespace hvr
