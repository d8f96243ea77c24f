#include "halpern_vr/page_estimator.hpp"

#include <string>
#include <vector>

namespace hvr {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(what) + ": probability " + std::to_string(p) +
                          " outside [0, 1]");
  }
}

void check_batch(const ProblemInstance& problem, std::size_t b) {
  if (b < 1 || b > problem.n) {
    throw InvalidArgument("page estimator: batch size " + std::to_string(b) + " not in [1, n]");
  }
}

}  // namespace

PageState page_init_full(const ProblemInstance& problem, const Vector& u, std::size_t batch_size,
                         EvalCounter& counter) {
  check_batch(problem, batch_size);
  PageState state{problem.F(u), u, batch_size};
  counter.charge_full();
  return state;
}

void page_update(PageState& state, const ProblemInstance& problem, const Vector& u_next, double p,
                 RngStream& rng, EvalCounter& counter) {
  check_probability(p, "page_update");
  require_dimension(u_next, problem.d, "page_update");
  require_dimension(state.anchor, problem.d, "page_update anchor");
  if (rng.bernoulli(p)) {
    state.estimate = problem.F(u_next);
    counter.charge_full();
  } else {
    const auto batch = sample_batch_without_replacement(problem.n, state.batch_size, rng);
    Vector delta = Vector::Zero(u_next.size());
    for (std::size_t i : batch) {
      delta += problem.F_component(i, u_next) - problem.F_component(i, state.anchor);
    }
    state.estimate += delta / static_cast<double>(state.batch_size);
    counter.charge_components(2 * state.batch_size);
  }
  state.anchor = u_next;
}

PageUpdateMoments enumerate_update_expectation(const PageState& state,
                                               const ProblemInstance& problem,
                                               const Vector& u_next, double p) {
  check_probability(p, "enumerate_update_expectation");
  const std::size_t n = problem.n;
  const std::size_t b = state.batch_size;
  check_batch(problem, b);
  if (n > 8 || binomial(n, b) > 70) {
    throw InvalidArgument("enumerate_update_expectation: instance too large to enumerate");
  }
  require_dimension(u_next, problem.d, "enumerate_update_expectation");

  const Vector target = problem.F(u_next);
  std::vector<Vector> diffs;
  diffs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    diffs.push_back(problem.F_component(i, u_next) - problem.F_component(i, state.anchor));
  }

  Vector incremental_mean = Vector::Zero(target.size());
  double incremental_second = 0.0;
  std::size_t subsets = 0;
  // Bitmask enumeration of the size-b subsets of {0..n-1}.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != b) continue;
    Vector sum = Vector::Zero(target.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += diffs[i];
    }
    const Vector outcome = state.estimate + sum / static_cast<double>(b);
    incremental_mean += outcome;
    incremental_second += (outcome - target).squaredNorm();
    ++subsets;
  }
  const double count = static_cast<double>(subsets);
  incremental_mean /= count;
  incremental_second /= count;

  // The full branch contributes F(u_next) with zero error.
  return {p * target + (1.0 - p) * incremental_mean, (1.0 - p) * incremental_second};
}

}  // namespace hvr
