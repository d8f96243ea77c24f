#include "halpern_vr/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hvr {

void require_dimension(const Vector& v, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(v.size()) != d) {
    std::ostringstream msg;
    msg << what << ": dimension " << v.size() << " does not match problem dimension " << d;
    throw DimensionMismatch(msg.str());
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

double residual_norm(const Vector& f_value, const Vector& g_value) {
  if (f_value.size() != g_value.size()) {
    throw DimensionMismatch("residual_norm: operands have different dimensions");
  }
  return (f_value + g_value).norm();
}

std::size_t cost_ratio_n(std::size_t n, double component_cost) {
  if (!(component_cost > 0.0)) return std::max<std::size_t>(n, 1);
  const double ratio = std::round(1.0 / component_cost);
  if (!(ratio >= 1.0)) return 1;
  return std::min(n, static_cast<std::size_t>(ratio));
}

EvalCounter::EvalCounter(std::size_t n, double component_cost)
    : n_(n), component_cost_(component_cost) {
  if (n == 0) throw InvalidArgument("EvalCounter: n must be positive");
  if (!(component_cost > 0.0)) throw InvalidArgument("EvalCounter: component cost must be positive");
}

void EvalCounter::charge_components(std::uint64_t count) {
  component_calls_ += count;
  component_evals_ += static_cast<double>(count) * component_cost_ * static_cast<double>(n_);
}

double EvalCounter::epochs() const {
  return component_evals_ / static_cast<double>(n_) + static_cast<double>(full_evals_);
}

Vector ProblemInstance::F(const Vector& u) const {
  require_dimension(u, d, "F");
  return eval_full(u);
}

Vector ProblemInstance::F_component(std::size_t i, const Vector& u) const {
  require_dimension(u, d, "F_i");
  if (i >= n) throw InvalidArgument("F_i: component index out of range");
  return eval_component(i, u);
}

Vector ProblemInstance::F_sampled(std::size_t i, const Vector& u) const {
  const double nq = static_cast<double>(n) * sampling.weight(i);
  if (sampling.is_uniform()) return F_component(i, u);
  return F_component(i, u) / nq;
}

Vector ProblemInstance::resolvent(double eta, const Vector& u) const {
  require_dimension(u, d, "resolvent");
  if (!(eta > 0.0)) throw InvalidArgument("resolvent: step must be positive");
  return resolvent_G(eta, u);
}

void validate(const ProblemInstance& problem) {
  if (problem.n == 0 || problem.d == 0) throw InvalidArgument("problem: n and d must be positive");
  if (!problem.eval_full || !problem.eval_component || !problem.resolvent_G) {
    throw InvalidArgument("problem '" + problem.name + "': missing oracle");
  }
  if (!(problem.L > 0.0)) throw InvalidArgument("problem '" + problem.name + "': L must be positive");
  if (!(problem.component_cost > 0.0)) {
    throw InvalidArgument("problem '" + problem.name + "': component cost must be positive");
  }
  if (problem.sampling.size() != problem.n) {
    throw InvalidArgument("problem '" + problem.name + "': sampling distribution has wrong size");
  }
  if (problem.known_solution) require_dimension(*problem.known_solution, problem.d, "known_solution");
  if (problem.default_start.size() != 0) {
    require_dimension(problem.default_start, problem.d, "default_start");
  }
}

ProblemInstance::ResolventOracle zero_G_resolvent() {
  return [](double, const Vector& u) { return u; };
}

void check_divergence(double residual, double reference, double factor, std::size_t iter,
                      const char* solver) {
  if (!std::isfinite(residual) || residual > factor * std::max(reference, 1e-12)) {
    std::ostringstream msg;
    msg << solver << ": diverged at iteration " << iter << " (residual " << residual
        << ", threshold " << factor << " x initial " << reference << ")";
    throw NumericalDivergence(msg.str());
  }
}

TraceLogger::TraceLogger(const RunControl& control, const char* solver)
    : control_(control), solver_(solver), start_(std::chrono::steady_clock::now()) {
  if (control_.log_stride == 0) throw InvalidArgument("log stride must be at least 1");
}

void TraceLogger::record(std::size_t iter, double epochs, double residual) {
  if (trace_.empty()) {
    reference_ = residual;
  }
  check_divergence(residual, reference_, control_.divergence_factor, iter, solver_);
  const auto now = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
  trace_.push_back({iter, epochs, residual, ms});
}

Vector random_vector(std::size_t d, RngStream& rng, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * rng.normal();
  return v;
}

double finite_sum_consistency_error(const ProblemInstance& problem, RngStream& rng,
                                    std::size_t probes, double scale) {
  double worst = 0.0;
  for (std::size_t t = 0; t < probes; ++t) {
    const Vector u = random_vector(problem.d, rng, scale);
    const Vector full = problem.F(u);
    Vector avg = Vector::Zero(full.size());
    for (std::size_t i = 0; i < problem.n; ++i) avg += problem.F_component(i, u);
    avg /= static_cast<double>(problem.n);
    worst = std::max(worst, (avg - full).norm() / (1.0 + full.norm()));
  }
  return worst;
}

double resolvent_expansion_excess(const ProblemInstance& problem, RngStream& rng,
                                  std::size_t probes, double eta, double scale) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < probes; ++t) {
    const Vector a = random_vector(problem.d, rng, scale);
    const Vector b = random_vector(problem.d, rng, scale);
    const double out = (problem.resolvent(eta, a) - problem.resolvent(eta, b)).norm();
    worst = std::max(worst, out - (a - b).norm());
  }
  return worst;
}

}  // namespace hvr
