#include "halpern_vr/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "halpern_vr/csv.hpp"
#include "halpern_vr/errors.hpp"

namespace hvr {

namespace {

struct SeriesPoint {
  double epochs = 0.0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct Series {
  std::string label;
  std::vector<SeriesPoint> points;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<Series> collect(const std::vector<std::string>& paths) {
  // (algorithm, problem) -> run_id -> records in file order.
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<TraceRecord>>>
      groups;
  for (const auto& path : paths) {
    for (auto& row : read_csv(path)) {
      groups[{row.algorithm, row.problem}][row.run_id].push_back(row.record);
    }
  }
  std::vector<Series> out;
  for (const auto& [key, runs] : groups) {
    std::size_t longest = 0;
    for (const auto& [id, recs] : runs) longest = std::max(longest, recs.size());
    Series s;
    s.label = key.first + " / " + key.second;
    for (std::size_t j = 0; j < longest; ++j) {
      SeriesPoint p;
      p.lo = std::numeric_limits<double>::infinity();
      p.hi = -std::numeric_limits<double>::infinity();
      std::size_t count = 0;
      for (const auto& [id, recs] : runs) {
        if (j >= recs.size()) continue;
        p.epochs += recs[j].oracle_epochs;
        p.mean += recs[j].residual_metric;
        p.lo = std::min(p.lo, recs[j].residual_metric);
        p.hi = std::max(p.hi, recs[j].residual_metric);
        ++count;
      }
      p.epochs /= static_cast<double>(count);
      p.mean /= static_cast<double>(count);
      if (std::isfinite(p.mean)) s.points.push_back(p);
    }
    if (!s.points.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void emit_plot(const std::vector<std::string>& csv_paths, const std::string& out_path) {
  if (csv_paths.empty()) throw InvalidArgument("emit_plot: no input CSV files");
  const auto series = collect(csv_paths);
  if (series.empty()) throw InvalidArgument("emit_plot: inputs contain no finite records");

  double x_max = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      x_max = std::max(x_max, p.epochs);
      for (double v : {p.lo, p.hi, p.mean}) {
        if (v > 0.0 && std::isfinite(v)) {
          y_min = std::min(y_min, v);
          y_max = std::max(y_max, v);
        }
      }
    }
  }
  if (!std::isfinite(y_min)) {
    y_min = 1e-16;
    y_max = 1.0;
  }
  double dec_lo = std::floor(std::log10(y_min));
  double dec_hi = std::ceil(std::log10(y_max));
  if (dec_hi <= dec_lo) dec_hi = dec_lo + 1.0;
  if (x_max <= 0.0) x_max = 1.0;

  const double W = 800, H = 520, left = 80, right = 220, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double e) { return left + pw * e / x_max; };
  auto Y = [&](double r) {
    const double lr = std::log10(std::max(r, std::pow(10.0, dec_lo)));
    return top + ph * (dec_hi - lr) / (dec_hi - dec_lo);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double dec = dec_lo; dec <= dec_hi; dec += 1.0) {
    const double y = Y(std::pow(10.0, dec));
    svg << "<line x1=\"" << left << "\" y1=\"" << fmt(y) << "\" x2=\"" << left + pw << "\" y2=\""
        << fmt(y) << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(dec) << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    const double e = x_max * t / 5.0;
    svg << "<text x=\"" << fmt(X(e)) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << fmt(e) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">epochs</text>\n"
      << "<text transform=\"translate(20," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">residual</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<g class=\"series\">\n";
    if (s.points.size() > 1) {
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (const auto& p : s.points) svg << fmt(X(p.epochs)) << ',' << fmt(Y(p.hi)) << ' ';
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
        svg << fmt(X(it->epochs)) << ',' << fmt(Y(it->lo)) << ' ';
      }
      svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.points) svg << fmt(X(p.epochs)) << ',' << fmt(Y(p.mean)) << ' ';
      svg << "\"/>\n";
    } else {
      const auto& p = s.points.front();
      svg << "<circle cx=\"" << fmt(X(p.epochs)) << "\" cy=\"" << fmt(Y(p.mean))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    svg << "</g>\n";
    const double ly = top + 14 + 20.0 * static_cast<double>(i);
    svg << "<g class=\"legend-entry\"><line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\">"
        << escape_xml(s.label) << "</text></g>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_plot: cannot open '" + out_path + "' for writing");
  out << svg.str();
  out.close();
  if (!out) throw std::runtime_error("emit_plot: write to '" + out_path + "' failed");
}

}  // namespace hvr
