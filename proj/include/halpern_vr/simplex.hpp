#pragma once

#include "halpern_vr/core.hpp"

namespace hvr {

/// Euclidean projection onto {x >= 0, sum x = 1}. Sort-based, O(m log m).
/// The largest coordinate absorbs the final rounding so the output sums to
/// one up to a single rounding error.
Vector project_simplex(const Vector& v);

}  // namespace hvr
