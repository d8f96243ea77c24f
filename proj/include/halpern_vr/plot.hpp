#pragma once

#include <string>
#include <vector>

namespace hvr {

/// Residual-vs-epochs chart as SVG with a log-scale y axis. Rows are grouped
/// into one series per (algorithm, problem); within a series the runs are
/// aligned by record index and drawn as the mean with a min-max band.
/// Nonpositive residuals are clamped to the smallest positive value shown.
/// Parse errors from read_csv propagate unchanged.
void emit_plot(const std::vector<std::string>& csv_paths, const std::string& out_path);

}  // namespace hvr
