#include "halpern_vr/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace hvr {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void check_field(const std::string& field, const char* what) {
  if (field.find_first_of(",\n\r\"") != std::string::npos) {
    throw InvalidArgument(std::string("emit_csv: ") + what + " '" + field +
                          "' contains a reserved character");
  }
}

[[noreturn]] void parse_failure(const std::string& path, std::size_t line, const std::string& why) {
  throw InvalidArgument("read_csv: " + path + ":" + std::to_string(line) + ": " + why);
}

template <typename T>
T parse_number(const std::string& text, const std::string& path, std::size_t line,
               const char* column) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    parse_failure(path, line, std::string("bad ") + column + " value '" + text + "'");
  }
  return value;
}

}  // namespace

void emit_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  if (rows.empty()) throw InvalidArgument("emit_csv: no trace records to write");
  for (const auto& row : rows) {
    check_field(row.run_id, "run_id");
    check_field(row.algorithm, "algorithm");
    check_field(row.problem, "problem");
  }
  std::ostringstream body;
  body << kCsvHeader << '\n';
  for (const auto& row : rows) {
    body << row.run_id << ',' << row.algorithm << ',' << row.problem << ',' << row.seed << ','
         << row.record.iter << ',' << format_real(row.record.oracle_epochs) << ','
         << format_real(row.record.residual_metric) << ',' << format_real(row.record.elapsed_ms)
         << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  out << body.str();
  out.close();
  if (!out) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kCsvHeader) parse_failure(path, line_no, "unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) {
      parse_failure(path, line_no, "expected 8 fields, found " + std::to_string(fields.size()));
    }
    CsvRow row;
    row.run_id = fields[0];
    row.algorithm = fields[1];
    row.problem = fields[2];
    row.seed = parse_number<std::uint64_t>(fields[3], path, line_no, "seed");
    row.record.iter = parse_number<std::size_t>(fields[4], path, line_no, "iter");
    row.record.oracle_epochs = parse_number<double>(fields[5], path, line_no, "oracle_epochs");
    row.record.residual_metric = parse_number<double>(fields[6], path, line_no, "residual");
    row.record.elapsed_ms = parse_number<double>(fields[7], path, line_no, "elapsed_ms");
    rows.push_back(std::move(row));
  }
  if (line_no == 0) parse_failure(path, 1, "empty file");
  return rows;
}

}  // namespace hvr
