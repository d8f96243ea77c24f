#include "halpern_vr/halpern_coco.hpp"

#include <cmath>
#include <string>

namespace hvr {

double CocoHalpernConfig::eta() const {
  if (eta_override) {
    if (!(*eta_override > 0.0)) throw InvalidArgument("vr-halpern: step override must be positive");
    return *eta_override;
  }
  if (!(L > 0.0)) throw InvalidArgument("vr-halpern: L must be positive");
  return 1.0 / (4.0 * L);
}

double coco_lambda(std::size_t k) {
  if (k < 1) throw InvalidArgument("coco_lambda: k must be >= 1");
  return 2.0 / (static_cast<double>(k) + 4.0);
}

double coco_p(std::size_t k, std::size_t n) {
  if (k < 1 || n < 1) throw InvalidArgument("coco_p: need k >= 1 and n >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double kd = static_cast<double>(k);
  return kd <= root_n ? 4.0 / (kd + 5.0) : 4.0 / (root_n + 5.0);
}

std::size_t coco_batch_size(std::size_t n) {
  if (n < 1) throw InvalidArgument("coco_batch_size: n must be >= 1");
  auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  // Guard against sqrt rounding on perfect squares.
  while (b > 1 && (b - 1) * (b - 1) >= n) --b;
  while (b * b < n) ++b;
  return b;
}

double coco_potential_weight(std::size_t k, std::size_t n, double L) {
  return (std::sqrt(static_cast<double>(n)) + 2.0) * (static_cast<double>(k) + 4.0) / (4.0 * L);
}

namespace {

void require_finite(const Vector& u, std::size_t k) {
  if (!u.allFinite()) {
    throw NumericalDivergence("vr-halpern: nonfinite iterate at k=" + std::to_string(k));
  }
}

}  // namespace

CocoHalpernState coco_initial_step(const ProblemInstance& problem, const Vector& u0,
                                   const CocoHalpernConfig& config) {
  validate(problem);
  require_dimension(u0, problem.d, "vr-halpern u0");
  const double eta = config.eta();
  const double first_step = eta / (2.0 * coco_lambda(1));

  CocoHalpernState state;
  state.counter = EvalCounter(problem.n, problem.component_cost);
  state.rng = RngStream(config.seed);
  state.u0 = u0;

  const Vector x = u0 - first_step * problem.F(u0);
  state.counter.charge_full();
  state.u = problem.resolvent(first_step, x);
  state.counter.charge_resolvent();
  require_finite(state.u, 1);
  state.g = (x - state.u) / first_step;
  state.page =
      page_init_full(problem, state.u, coco_batch_size(problem.parameter_n()), state.counter);
  state.k = 1;
  return state;
}

void coco_step(CocoHalpernState& state, const ProblemInstance& problem,
               const CocoHalpernConfig& config) {
  if (state.k < 1) throw InvalidArgument("coco_step: state.k must be >= 1");
  const double eta = config.eta();
  const double lambda = coco_lambda(state.k);
  const Vector x = lambda * state.u0 + (1.0 - lambda) * state.u - eta * state.page.estimate;
  Vector next = problem.resolvent(eta, x);
  state.counter.charge_resolvent();
  require_finite(next, state.k + 1);
  state.g = (x - next) / eta;
  page_update(state.page, problem, next, coco_p(state.k, problem.parameter_n()), state.rng,
              state.counter);
  state.u = std::move(next);
  ++state.k;
}

double coco_residual(const CocoHalpernState& state, const ProblemInstance& problem) {
  return residual_norm(problem.F(state.u), state.g);
}

double coco_potential(const CocoHalpernState& state, const ProblemInstance& problem,
                      const CocoHalpernConfig& config) {
  const double eta = config.eta();
  const double lambda = coco_lambda(state.k);
  const Vector full = problem.F(state.u);
  const Vector r = full + state.g;
  const double c_k = coco_potential_weight(state.k, problem.parameter_n(), config.L);
  return eta / (2.0 * lambda) * r.squaredNorm() + r.dot(state.u - state.u0) +
         c_k * (full - state.page.estimate).squaredNorm();
}

CocoHalpernResult run_coco_halpern(const ProblemInstance& problem, const Vector& u0,
                                   const CocoHalpernConfig& config) {
  const RunControl& control = config.control;
  if (control.max_iters < 1) throw InvalidArgument("vr-halpern: max_iters must be >= 1");
  TraceLogger log(control, "vr-halpern");
  auto residual = [&](const CocoHalpernState& s) {
    return problem.metric ? problem.metric(s.u) : coco_residual(s, problem);
  };

  CocoHalpernResult result{coco_initial_step(problem, u0, config), {}};
  CocoHalpernState& state = result.state;
  log.record(state.k, state.counter.epochs(), residual(state));
  while (state.k < control.max_iters && state.counter.epochs() < control.epoch_budget) {
    coco_step(state, problem, config);
    if (log.due(state.k - 1)) log.record(state.k, state.counter.epochs(), residual(state));
  }
  if (!log.logged(state.k)) log.record(state.k, state.counter.epochs(), residual(state));
  result.trace = log.take();
  return result;
}

}  // namespace hvr
