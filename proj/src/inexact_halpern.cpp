#include "halpern_vr/inexact_halpern.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hvr {

double MonotoneHalpernConfig::step(std::size_t n) const {
  if (eta) {
    if (!(*eta > 0.0)) throw InvalidArgument("inexact-halpern: eta must be positive");
    return *eta;
  }
  if (!(L > 0.0)) throw InvalidArgument("inexact-halpern: L must be positive");
  return std::sqrt(static_cast<double>(n)) / L;
}

double outer_lambda(std::size_t k) { return 1.0 / (static_cast<double>(k) + 2.0); }

std::size_t inner_iteration_count(std::size_t k, std::size_t n, double eta, double L,
                                  InnerSchedule schedule, double c0) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (schedule == InnerSchedule::kTheoretical) {
    const double scale = std::max(nd, std::sqrt(nd) * (eta * L + 1.0));
    return static_cast<std::size_t>(std::ceil(56.0 * scale * std::log(1.252 * (kd + 2.0))));
  }
  const double count = std::floor(c0 * nd * std::log(kd + 2.0));
  return count < 1.0 ? 1 : static_cast<std::size_t>(count);
}

SplitOperator make_subproblem_operator(const ProblemInstance& problem, const Vector& anchor,
                                       double eta, double L) {
  require_dimension(anchor, problem.d, "subproblem anchor");
  if (!(eta > 0.0)) throw InvalidArgument("subproblem: eta must be positive");
  SplitOperator op;
  op.n = problem.n;
  op.d = problem.d;
  op.A_full = [&problem, anchor, eta](const Vector& u) -> Vector {
    return eta * problem.F(u) + u - anchor;
  };
  op.A_component = [&problem, anchor, eta](std::size_t i, const Vector& u) -> Vector {
    return eta * problem.F_component(i, u) + u - anchor;
  };
  op.B_resolvent = [&problem, eta](double tau, const Vector& u) {
    return problem.resolvent(tau * eta, u);
  };
  op.L_A = eta * L + 1.0;
  op.mu = 1.0;
  op.component_cost = problem.component_cost;
  return op;
}

MonotoneHalpernState monotone_initial_state(const ProblemInstance& problem, const Vector& u0,
                                            const MonotoneHalpernConfig& config) {
  validate(problem);
  require_dimension(u0, problem.d, "inexact-halpern u0");
  MonotoneHalpernState state;
  state.k = 0;
  state.u0 = u0;
  state.u = u0;
  state.last_resolvent = u0;
  state.last_anchor = u0;
  state.counter = EvalCounter(problem.n, problem.component_cost);
  state.rng = RngStream(config.seed);
  return state;
}

namespace {

ForbParams inner_params(const MonotoneHalpernConfig& config, const SplitOperator& op) {
  ForbParams params = config.inner_p ? forb_params_with_p(*config.inner_p, op.L_A)
                                     : forb_params(op.parameter_n(), op.L_A);
  if (config.inner_tau) {
    if (!(*config.inner_tau > 0.0)) throw InvalidArgument("inexact-halpern: inner tau must be positive");
    params.tau = *config.inner_tau;
  }
  return params;
}

}  // namespace

void outer_step(MonotoneHalpernState& state, const ProblemInstance& problem,
                const MonotoneHalpernConfig& config) {
  const double eta = config.step(problem.parameter_n());
  const SamplingDistribution& q = config.sampling ? *config.sampling : problem.sampling;
  const SplitOperator op = make_subproblem_operator(problem, state.u, eta, config.L);
  const std::size_t inner =
      inner_iteration_count(state.k, problem.parameter_n(), eta, config.L,
                            config.inner_schedule, config.c0);
  Vector approx = run_forb(state.u, inner, op, q, state.rng, state.counter, inner_params(config, op));
  const double lambda = outer_lambda(state.k);
  Vector next = lambda * state.u0 + (1.0 - lambda) * approx;
  if (!next.allFinite()) {
    throw NumericalDivergence("inexact-halpern: nonfinite iterate at k=" +
                              std::to_string(state.k + 1));
  }
  state.last_anchor = std::move(state.u);
  state.last_resolvent = std::move(approx);
  state.u = std::move(next);
  ++state.k;
}

Vector exact_resolvent_affine(const ProblemInstance& problem, double eta, const Vector& u) {
  if (!problem.affine) throw InvalidArgument("exact_resolvent_affine: problem is not affine");
  if (problem.has_nontrivial_G) throw InvalidArgument("exact_resolvent_affine: requires G = 0");
  require_dimension(u, problem.d, "exact_resolvent_affine");
  const auto& [M, c] = *problem.affine;
  const Matrix system = Matrix::Identity(M.rows(), M.cols()) + eta * M;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw InvalidArgument("exact_resolvent_affine: singular system");
  return lu.solve(u - eta * c);
}

double p_eta_norm(const Vector& u, const Vector& resolvent_value) {
  if (u.size() != resolvent_value.size()) throw DimensionMismatch("p_eta_norm: dimension mismatch");
  return (u - resolvent_value).norm();
}

ResidualPoint convert_to_residual_point(const ProblemInstance& problem, double eta,
                                        const Vector& u, const Vector& resolvent_value) {
  const Vector f = problem.F(resolvent_value);
  const Vector g = (u - resolvent_value) / eta - f;
  return {resolvent_value, residual_norm(f, g)};
}

std::size_t post_process_iterations(std::size_t n) {
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(42.0 * (nd + std::sqrt(nd)) * std::log(19.0 * nd)));
}

Vector post_process(const ProblemInstance& problem, const Vector& u_K,
                    const MonotoneHalpernConfig& config, RngStream& rng, EvalCounter& counter) {
  const double eta = config.step(problem.parameter_n());
  const SamplingDistribution& q = config.sampling ? *config.sampling : problem.sampling;
  const SplitOperator op = make_subproblem_operator(problem, u_K, eta, config.L);
  return run_forb(u_K, post_process_iterations(problem.parameter_n()), op, q, rng, counter,
                  inner_params(config, op));
}

MonotoneHalpernResult run_monotone_halpern(const ProblemInstance& problem, const Vector& u0,
                                           const MonotoneHalpernConfig& config) {
  const RunControl& control = config.control;
  if (control.max_iters < 1) throw InvalidArgument("inexact-halpern: max_outer must be >= 1");
  const double eta = config.step(problem.parameter_n());
  TraceLogger log(control, "inexact-halpern");
  auto residual = [&](const MonotoneHalpernState& s) {
    if (problem.metric) return problem.metric(s.u);
    return p_eta_norm(s.last_anchor, s.last_resolvent) / eta;
  };

  MonotoneHalpernResult result{monotone_initial_state(problem, u0, config), {}};
  MonotoneHalpernState& state = result.state;
  do {
    outer_step(state, problem, config);
    if (log.due(state.k - 1)) log.record(state.k, state.counter.epochs(), residual(state));
  } while (state.k < control.max_iters && state.counter.epochs() < control.epoch_budget);
  if (!log.logged(state.k)) log.record(state.k, state.counter.epochs(), residual(state));
  result.trace = log.take();
  return result;
}

}  // namespace hvr
