#include "teatpose/harness/report_writer.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace teatpose::harness {

namespace {

const char* kRawColumns = "cycle,teat_id,tip_error_mm,axis_error_deg";

std::string optional_exact(const std::optional<double>& v) { return v ? exact(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_optional(const std::string& field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size()) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_input, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::invalid_input, "write failed for " + path.string());
}

bool same_rows(const std::vector<TeatRow>& a, const std::vector<TeatRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.teat_id != y.teat_id || x.samples != y.samples || x.estimated != y.estimated ||
        x.mean_error_mm != y.mean_error_mm || x.std_error_mm != y.std_error_mm ||
        x.mean_axis_error_deg != y.mean_axis_error_deg || x.success_rate != y.success_rate) {
      return false;
    }
  }
  return true;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string raw_samples_csv(const std::vector<Sample>& samples) {
  std::ostringstream out;
  out << kReportHeader << '\n' << kRawColumns << '\n';
  for (const auto& s : samples) {
    out << s.cycle << ',' << s.teat_id << ',' << optional_exact(s.tip_error_mm) << ','
        << optional_exact(s.axis_error_deg) << '\n';
  }
  return out.str();
}

std::vector<Sample> parse_raw_samples_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Sample> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kRawColumns) throw Error(ErrorCode::parse_error, "unexpected raw sample columns: " + line);
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected 4 fields");
    Sample s;
    try {
      std::size_t used = 0;
      s.cycle = std::stoull(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument("cycle");
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad cycle '" + f[0] + "'");
    }
    s.teat_id = f[1];
    s.tip_error_mm = parse_optional(f[2], line_no);
    s.axis_error_deg = parse_optional(f[3], line_no);
    out.push_back(std::move(s));
  }
  if (!header_seen) throw Error(ErrorCode::parse_error, "raw sample table has no header");
  return out;
}

std::string teat_summary_csv(const std::vector<TeatRow>& rows, std::size_t cycles, double overall_success) {
  std::ostringstream out;
  out << kReportHeader << '\n';
  out << "teat_id,samples,estimated,mean_error_mm,std_error_mm,mean_axis_error_deg,success_rate_5mm\n";
  for (const auto& r : rows) {
    out << r.teat_id << ',' << r.samples << ',' << r.estimated << ',' << exact(r.mean_error_mm) << ','
        << exact(r.std_error_mm) << ',' << exact(r.mean_axis_error_deg) << ',' << exact(r.success_rate) << '\n';
  }
  out << "ALL," << cycles << " cycles,,,,," << exact(overall_success) << '\n';
  return out.str();
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream out;
  out << kReportHeader << '\n' << "stage,mean_ms,p50_ms,p95_ms\n";
  for (const auto& r : rows) {
    out << r.stage << ',' << fixed(r.mean_ms, 4) << ',' << fixed(r.p50_ms, 4) << ',' << fixed(r.p95_ms, 4) << '\n';
  }
  return out.str();
}

std::string error_histogram_svg(const std::string& title, const std::vector<double>& errors_mm) {
  constexpr double kBin = 0.5;
  constexpr int kWidth = 480, kHeight = 260, kMargin = 40;
  double top = 5.0;
  for (double e : errors_mm) top = std::max(top, e);
  const int bins = static_cast<int>(std::ceil(top / kBin));
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double e : errors_mm) {
    const int b = std::min(bins - 1, static_cast<int>(e / kBin));
    ++counts[static_cast<std::size_t>(b)];
  }
  const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
  const double bar_w = static_cast<double>(kWidth - 2 * kMargin) / bins;
  const double plot_h = kHeight - 2 * kMargin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"20\" font-size=\"14\">" << svg_escape(title) << " (n=" << errors_mm.size()
      << ")</text>\n";
  for (int b = 0; b < bins; ++b) {
    const double h = plot_h * counts[static_cast<std::size_t>(b)] / peak;
    out << "<rect x=\"" << fixed(kMargin + b * bar_w, 2) << "\" y=\"" << fixed(kHeight - kMargin - h, 2)
        << "\" width=\"" << fixed(bar_w * 0.9, 2) << "\" height=\"" << fixed(h, 2) << "\" fill=\"steelblue\"/>\n";
  }
  const double x5 = kMargin + (5.0 / kBin) * bar_w;
  out << "<line x1=\"" << fixed(x5, 2) << "\" y1=\"" << kMargin << "\" x2=\"" << fixed(x5, 2) << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"red\" stroke-dasharray=\"4\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 10 << "\" font-size=\"11\">0 mm</text>\n";
  out << "<text x=\"" << kWidth - kMargin - 40 << "\" y=\"" << kHeight - 10 << "\" font-size=\"11\">"
      << fixed(bins * kBin, 1) << " mm</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string curve_csv(const CurveReport& report) {
  std::ostringstream out;
  out << kReportHeader << '\n' << "preset,distance_mm,points,measured_mm,rms_error_mm\n";
  for (const auto& r : report.rows) {
    out << r.preset << ',' << exact(r.distance_mm) << ',' << r.points << ',' << optional_exact(r.measured_mm) << ','
        << optional_exact(r.error_mm) << '\n';
  }
  return out.str();
}

std::string curve_fit_csv(const CurveReport& report) {
  std::ostringstream out;
  out << kReportHeader << '\n'
      << "preset,true_a_mm,true_b_mm_per_m2,fit_a_mm,fit_b_mm_per_m2,max_error_1m_mm,warning\n";
  for (const auto& f : report.fits) {
    out << f.preset << ',' << exact(f.truth.a_mm) << ',' << exact(f.truth.b_mm_per_m2) << ',';
    if (f.fit) out << exact(f.fit->a_mm) << ',' << exact(f.fit->b_mm_per_m2) << ',' << exact(f.fit->max_error_1m_mm);
    else out << ",,";
    out << ',' << f.warning << '\n';
  }
  return out.str();
}

std::string curve_svg(const CurveReport& report) {
  constexpr int kWidth = 560, kHeight = 320, kMargin = 50;
  static const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson", "purple", "gray"};
  double max_d = 1.0, max_e = 1e-3;
  for (const auto& r : report.rows) {
    max_d = std::max(max_d, r.distance_mm);
    if (r.error_mm) max_e = std::max(max_e, *r.error_mm);
  }
  auto sx = [&](double d) { return kMargin + (kWidth - 2 * kMargin) * d / max_d; };
  auto sy = [&](double e) { return kHeight - kMargin - (kHeight - 2 * kMargin) * e / (max_e * 1.1); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth - kMargin - 60 << "\" y=\"" << kHeight - 15 << "\" font-size=\"11\">"
      << fixed(max_d, 0) << " mm</text>\n";
  out << "<text x=\"5\" y=\"" << kMargin - 10 << "\" font-size=\"11\">error " << fixed(max_e * 1.1, 2)
      << " mm</text>\n";
  for (std::size_t p = 0; p < report.fits.size(); ++p) {
    const auto& fit = report.fits[p];
    const char* color = colors[p % 6];
    for (const auto& r : report.rows) {
      if (r.preset != fit.preset || !r.error_mm) continue;
      out << "<circle cx=\"" << fixed(sx(r.distance_mm), 2) << "\" cy=\"" << fixed(sy(*r.error_mm), 2)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    if (fit.fit) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (int i = 0; i <= 50; ++i) {
        const double d = max_d * i / 50.0;
        out << fixed(sx(d), 2) << ',' << fixed(sy(fit.fit->at(d)), 2) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 14 * static_cast<int>(p) << "\" font-size=\"11\" fill=\""
        << color << "\">" << svg_escape(fit.preset) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string rate_csv(const RateReport& report) {
  std::ostringstream out;
  out << kReportHeader << '\n' << "stride,contour_vertices,extracted_points,teats_estimated,max_tip_delta_mm\n";
  for (const auto& r : report.rows) {
    out << r.stride << ',' << r.contour_vertices << ',' << r.extracted_points << ',' << r.teats_estimated << ','
        << exact(r.max_tip_delta_mm) << '\n';
  }
  return out.str();
}

std::string rate_timing_csv(const RateReport& report) {
  std::ostringstream out;
  out << kReportHeader << '\n' << "stride,extract_mean_ms,extract_p95_ms,geometry_mean_ms,geometry_p95_ms\n";
  for (const auto& r : report.rows) {
    out << r.stride << ',' << fixed(r.extract_mean_ms, 4) << ',' << fixed(r.extract_p95_ms, 4) << ','
        << fixed(r.geometry_mean_ms, 4) << ',' << fixed(r.geometry_p95_ms, 4) << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_repeatability(const std::filesystem::path& dir,
                                                       const ExperimentReport& report, bool with_timing) {
  const std::string raw = raw_samples_csv(report.samples);
  const auto parsed = parse_raw_samples_csv(raw);
  double success = 0.0;
  const auto rederived = summarize(parsed, &success);
  if (!same_rows(rederived, report.teats) || success != report.success_rate) {
    throw std::logic_error("summary does not match the raw sample table");
  }
  std::size_t cycles_seen = 0;
  for (const auto& s : parsed) cycles_seen = std::max(cycles_seen, s.cycle + 1);
  if (cycles_seen != report.cycles) throw std::logic_error("raw sample table does not cover every cycle");

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(dir / name);
  };
  emit("repeatability_raw.csv", raw);
  emit("repeatability_summary.csv", teat_summary_csv(rederived, report.cycles, success));
  for (const auto& row : rederived) {
    std::vector<double> errors;
    for (const auto& s : parsed) {
      if (s.teat_id == row.teat_id && s.tip_error_mm) errors.push_back(*s.tip_error_mm);
    }
    emit("histogram_" + row.teat_id + ".svg", error_histogram_svg("tip error " + row.teat_id, errors));
  }
  if (with_timing) emit("repeatability_timing.csv", timing_csv(report.timing));
  return written;
}

std::vector<std::filesystem::path> write_camera_curve(const std::filesystem::path& dir, const CurveReport& report) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : {std::pair<std::string, std::string>{"camera_curve.csv", curve_csv(report)},
                                  {"camera_curve_fit.csv", curve_fit_csv(report)},
                                  {"camera_curve.svg", curve_svg(report)}}) {
    write_file(dir / name, text);
    written.push_back(dir / name);
  }
  return written;
}

std::vector<std::filesystem::path> write_rate(const std::filesystem::path& dir, const RateReport& report,
                                              bool with_timing) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written{dir / "rate.csv"};
  write_file(dir / "rate.csv", rate_csv(report));
  if (with_timing) {
    write_file(dir / "rate_timing.csv", rate_timing_csv(report));
    written.push_back(dir / "rate_timing.csv");
  }
  return written;
}

}  // namespace teatpose::harness
