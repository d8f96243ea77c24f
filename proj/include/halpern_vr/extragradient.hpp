#pragma once

#include <optional>
#include <vector>

#include "halpern_vr/core.hpp"

namespace hvr {

/// Deterministic extragradient with the resolvent of G as the projection:
///   u_half = J_{tau G}(u - tau F(u)),  u+ = J_{tau G}(u - tau F(u_half)).
struct ExtragradientConfig {
  /// Defaults to 1/(2 L_F).
  std::optional<double> tau;
  RunControl control;

  double step(const ProblemInstance& problem) const;
};

struct ExtragradientResult {
  Vector u;
  EvalCounter counter;
  std::vector<TraceRecord> trace;
};

/// Logs the problem metric if present, else ||F(u+) + g+|| with g+ from the
/// second resolvent step.
ExtragradientResult eg_baseline(const ProblemInstance& problem, const Vector& u0,
                                const ExtragradientConfig& config);

}  // namespace hvr
