#include "halpern_vr/extragradient.hpp"

#include <string>

namespace hvr {

double ExtragradientConfig::step(const ProblemInstance& problem) const {
  if (tau) {
    if (!(*tau > 0.0)) throw InvalidArgument("eg: tau must be positive");
    return *tau;
  }
  if (!(problem.L_F > 0.0)) throw InvalidArgument("eg: problem has no positive L_F");
  return 1.0 / (2.0 * problem.L_F);
}

ExtragradientResult eg_baseline(const ProblemInstance& problem, const Vector& u0,
                                const ExtragradientConfig& config) {
  validate(problem);
  require_dimension(u0, problem.d, "eg u0");
  const RunControl& control = config.control;
  if (control.max_iters < 1) throw InvalidArgument("eg: max_iters must be >= 1");
  const double tau = config.step(problem);

  ExtragradientResult result{u0, EvalCounter(problem.n, problem.component_cost), {}};
  TraceLogger log(control, "eg");
  std::size_t k = 0;
  do {
    const Vector half = problem.resolvent(tau, result.u - tau * problem.F(result.u));
    const Vector x = result.u - tau * problem.F(half);
    Vector next = problem.resolvent(tau, x);
    result.counter.charge_full(2);
    result.counter.charge_resolvent(2);
    ++k;
    if (!next.allFinite()) throw NumericalDivergence("eg: nonfinite iterate at k=" + std::to_string(k));
    if (log.due(k - 1)) {
      const double residual = problem.metric ? problem.metric(next)
                                             : residual_norm(problem.F(next), (x - next) / tau);
      log.record(k, result.counter.epochs(), residual);
    }
    result.u = std::move(next);
    if (!(k < control.max_iters && result.counter.epochs() < control.epoch_budget) &&
        !log.logged(k)) {
      const Vector g = (x - result.u) / tau;
      log.record(k, result.counter.epochs(),
                 problem.metric ? problem.metric(result.u)
                                : residual_norm(problem.F(result.u), g));
    }
  } while (k < control.max_iters && result.counter.epochs() < control.epoch_budget);
  result.trace = log.take();
  return result;
}

}  // namespace hvr
