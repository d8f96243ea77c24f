#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "halpern_vr/core.hpp"
#include "halpern_vr/page_estimator.hpp"

namespace hvr {

/// Single-loop constrained Halpern iteration driven by the PAGE estimator,
/// for operators that are 1/L-cocoercive on average.
struct CocoHalpernConfig {
  double L = 1.0;
  std::uint64_t seed = 0;
  /// Replaces the default step 1/(4L).
  std::optional<double> eta_override;
  RunControl control;

  double eta() const;
};

struct CocoHalpernState {
  std::size_t k = 1;
  Vector u0;
  Vector u;
  PageState page;
  /// Element of G(u) recovered from the resolvent step that produced u.
  Vector g;
  EvalCounter counter;
  RngStream rng;
};

/// lambda_k = 2/(k+4), k >= 1.
double coco_lambda(std::size_t k);
/// p_{k+1}: 4/(k+5) while k <= sqrt(n), then 4/(sqrt(n)+5). Real sqrt.
double coco_p(std::size_t k, std::size_t n);
/// b = ceil(sqrt(n)).
std::size_t coco_batch_size(std::size_t n);
/// c_k = (sqrt(n)+2)(k+4)/(4L).
double coco_potential_weight(std::size_t k, std::size_t n, double L);

/// u_1 = J_{s G}(u_0 - s F(u_0)) with s = eta/(2 lambda_1); the estimator
/// starts exact at u_1.
CocoHalpernState coco_initial_step(const ProblemInstance& problem, const Vector& u0,
                                   const CocoHalpernConfig& config);

void coco_step(CocoHalpernState& state, const ProblemInstance& problem,
               const CocoHalpernConfig& config);

/// Potential C_k. Uses one uncounted full evaluation at u_k.
double coco_potential(const CocoHalpernState& state, const ProblemInstance& problem,
                      const CocoHalpernConfig& config);

/// ||F(u_k) + g_k||, uncounted.
double coco_residual(const CocoHalpernState& state, const ProblemInstance& problem);

struct CocoHalpernResult {
  CocoHalpernState state;
  std::vector<TraceRecord> trace;
};

/// Runs the initial step and then up to max_iters - 1 further steps, logging
/// the problem metric if it has one and ||F(u_k) + g_k|| otherwise.
CocoHalpernResult run_coco_halpern(const ProblemInstance& problem, const Vector& u0,
                                   const CocoHalpernConfig& config);

}  // namespace hvr
