#include "halpern_vr/vr_forb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hvr {

SplitOperator split_from_problem(const ProblemInstance& problem) {
  validate(problem);
  SplitOperator op;
  op.n = problem.n;
  op.d = problem.d;
  op.A_full = [&problem](const Vector& u) { return problem.F(u); };
  op.A_component = [&problem](std::size_t i, const Vector& u) {
    return problem.F_component(i, u);
  };
  op.B_resolvent = [&problem](double tau, const Vector& u) { return problem.resolvent(tau, u); };
  op.L_A = problem.L;
  op.mu = 0.0;
  op.component_cost = problem.component_cost;
  return op;
}

ForbParams forb_params(std::size_t n, double L_A) {
  if (n < 1) throw InvalidArgument("forb_params: n must be >= 1");
  if (!(L_A > 0.0)) throw InvalidArgument("forb_params: L_A must be positive");
  if (n == 1) return {1.0, 0.0, 1.0 / (2.0 * L_A)};
  return forb_params_with_p(1.0 / static_cast<double>(n), L_A);
}

ForbParams forb_params_with_p(double p, double L_A) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("forb_params: p must lie in (0, 1)");
  if (!(L_A > 0.0)) throw InvalidArgument("forb_params: L_A must be positive");
  return {p, 1.0 - p, std::sqrt(p * (1.0 - p)) / (2.0 * L_A)};
}

ForbState forb_init(const Vector& u, const SplitOperator& op, EvalCounter& counter) {
  require_dimension(u, op.d, "vr-forb init");
  ForbState state;
  state.v = u;
  state.w = u;
  state.w_prev = u;
  state.A_w = op.A_full(u);
  counter.charge_full();
  state.g = Vector::Zero(u.size());
  return state;
}

void forb_step(ForbState& state, const SplitOperator& op, const ForbParams& params,
               const SamplingDistribution& q, RngStream& rng, EvalCounter& counter) {
  const Vector v_hat = params.alpha * state.v + (1.0 - params.alpha) * state.w;
  const std::size_t i = q.sample(rng);
  const double inv_nq = 1.0 / (static_cast<double>(op.n) * q.weight(i));
  const Vector forward =
      state.A_w + inv_nq * (op.A_component(i, state.v) - op.A_component(i, state.w_prev));
  counter.charge_components(2);
  const Vector x = v_hat - params.tau * forward;
  Vector next = op.B_resolvent(params.tau, x);
  counter.charge_resolvent();
  if (!next.allFinite()) {
    throw NumericalDivergence("vr-forb: nonfinite iterate at k=" + std::to_string(state.k + 1));
  }
  state.g = (x - next) / params.tau;
  state.w_prev = state.w;
  if (rng.bernoulli(params.p)) {
    state.w = next;
    state.A_w = op.A_full(state.w);
    counter.charge_full();
  }
  state.v = std::move(next);
  ++state.k;
}

std::size_t theorem3_iterations(std::size_t n, double L_A, double mu, double dist0,
                                double eps_bar) {
  if (n < 1 || !(L_A > 0.0) || !(mu > 0.0) || !(dist0 > 0.0) || !(eps_bar > 0.0)) {
    throw InvalidArgument("theorem3_iterations: arguments must be positive");
  }
  const double nd = static_cast<double>(n);
  const double log_term = std::log(std::sqrt(6.0) * dist0 / eps_bar);
  if (!(log_term > 0.0)) return 1;
  const double scale = std::max(nd, std::sqrt(nd) * L_A / mu);
  return static_cast<std::size_t>(std::ceil(14.0 * scale * log_term));
}

Vector run_forb(const Vector& u_init, std::size_t M, const SplitOperator& op,
                const SamplingDistribution& q, RngStream& rng, EvalCounter& counter,
                std::optional<ForbParams> params) {
  if (M == 0) return u_init;
  const ForbParams used = params ? *params : forb_params(op.parameter_n(), op.L_A);
  ForbState state = forb_init(u_init, op, counter);
  for (std::size_t k = 0; k < M; ++k) forb_step(state, op, used, q, rng, counter);
  return state.v;
}

ForbResult run_forb_solver(const ProblemInstance& problem, const Vector& u0,
                           const ForbConfig& config) {
  const RunControl& control = config.control;
  if (control.max_iters < 1) throw InvalidArgument("vr-forb: max_iters must be >= 1");
  const SplitOperator op = split_from_problem(problem);
  ForbParams params = config.p_override ? forb_params_with_p(*config.p_override, op.L_A)
                                        : forb_params(op.parameter_n(), op.L_A);
  if (config.tau_override) {
    if (!(*config.tau_override > 0.0)) throw InvalidArgument("vr-forb: tau must be positive");
    params.tau = *config.tau_override;
  }

  ForbResult result;
  result.counter = EvalCounter(problem.n, problem.component_cost);
  RngStream rng(config.seed);
  TraceLogger log(control, "vr-forb");
  auto residual = [&](const ForbState& s) {
    return problem.metric ? problem.metric(s.v) : residual_norm(problem.F(s.v), s.g);
  };

  result.state = forb_init(u0, op, result.counter);
  ForbState& state = result.state;
  do {
    forb_step(state, op, params, problem.sampling, rng, result.counter);
    if (log.due(state.k - 1)) log.record(state.k, result.counter.epochs(), residual(state));
  } while (state.k < control.max_iters && result.counter.epochs() < control.epoch_budget);
  if (!log.logged(state.k)) log.record(state.k, result.counter.epochs(), residual(state));
  result.trace = log.take();
  return result;
}

}  // namespace hvr
