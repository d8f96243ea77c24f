#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "halpern_vr/core.hpp"

namespace hvr {

/// One line of a trace CSV:
/// run_id,algorithm,problem,seed,iter,oracle_epochs,residual,elapsed_ms
struct CsvRow {
  std::string run_id;
  std::string algorithm;
  std::string problem;
  std::uint64_t seed = 0;
  TraceRecord record;
};

inline constexpr const char* kCsvHeader =
    "run_id,algorithm,problem,seed,iter,oracle_epochs,residual,elapsed_ms";

/// LF line endings, '.' decimal point, reals at 17 significant digits.
/// Throws InvalidArgument for an empty row list (no file is created) and
/// std::runtime_error with the path on I/O failure.
void emit_csv(const std::vector<CsvRow>& rows, const std::string& path);

/// Parses a file written by emit_csv. Errors name the 1-based line.
std::vector<CsvRow> read_csv(const std::string& path);

/// Locale-independent "%.17g".
std::string format_real(double value);

}  // namespace hvr
