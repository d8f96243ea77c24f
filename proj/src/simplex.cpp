#include "halpern_vr/simplex.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace hvr {

Vector project_simplex(const Vector& v) {
  const auto m = v.size();
  if (m == 0) throw InvalidArgument("project_simplex: empty input");
  if (!v.allFinite()) throw InvalidArgument("project_simplex: nonfinite input");

  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) threshold = candidate;
  }

  Vector x = (v.array() - threshold).max(0.0).matrix();
  Eigen::Index largest = 0;
  x.maxCoeff(&largest);
  x[largest] -= x.sum() - 1.0;
  return x;
}

}  // namespace hvr
