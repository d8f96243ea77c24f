#pragma once

#include <cstddef>

#include "halpern_vr/core.hpp"

namespace hvr {

/// Recursive PAGE estimate of F at `anchor`.
struct PageState {
  Vector estimate;
  Vector anchor;
  std::size_t batch_size = 1;
};

/// Estimate = F(u) exactly; charges one full evaluation.
PageState page_init_full(const ProblemInstance& problem, const Vector& u, std::size_t batch_size,
                         EvalCounter& counter);

/**
 * Moves the estimate to `u_next`.
 *
 * With probability p the estimate is refreshed with a full evaluation.
 * Otherwise a uniform batch S of size b is drawn without replacement and
 *   estimate += (1/b) sum_{i in S} (F_i(u_next) - F_i(anchor)),
 * charging 2b component calls (both terms are evaluated fresh). The coin is
 * drawn before the batch; the batch is only drawn on the incremental branch.
 */
void page_update(PageState& state, const ProblemInstance& problem, const Vector& u_next, double p,
                 RngStream& rng, EvalCounter& counter);

struct PageUpdateMoments {
  Vector mean;
  /// E || new estimate - F(u_next) ||^2
  double error_second_moment = 0.0;
};

/// Exact distribution of page_update's output, by enumerating the coin and
/// every size-b batch. Requires n <= 8 and C(n, b) <= 70.
PageUpdateMoments enumerate_update_expectation(const PageState& state,
                                               const ProblemInstance& problem,
                                               const Vector& u_next, double p);

}  // namespace hvr
