#pragma once

#include "teatpose/harness/experiments.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace teatpose::harness {

inline constexpr const char* kReportHeader = "# teatpose-report v1";

std::string raw_samples_csv(const std::vector<Sample>& samples);
/// Inverse of raw_samples_csv. Throws parse_error on malformed input.
std::vector<Sample> parse_raw_samples_csv(const std::string& text);

std::string teat_summary_csv(const std::vector<TeatRow>& rows, std::size_t cycles, double overall_success);
std::string timing_csv(const std::vector<TimingRow>& rows);

/// Histogram of tip errors in 0.5 mm bins.
std::string error_histogram_svg(const std::string& title, const std::vector<double>& errors_mm);

std::string curve_csv(const CurveReport& report);
std::string curve_fit_csv(const CurveReport& report);
std::string curve_svg(const CurveReport& report);

/// Deterministic columns only.
std::string rate_csv(const RateReport& report);
std::string rate_timing_csv(const RateReport& report);

/// Writes raw, summary, and per-teat histogram files to `dir`. The summary
/// is re-derived from the serialized raw table and must match the report
/// exactly before anything is written; throws std::logic_error otherwise.
/// Wall-clock timings are written only when `with_timing` is set.
std::vector<std::filesystem::path> write_repeatability(const std::filesystem::path& dir,
                                                       const ExperimentReport& report, bool with_timing);
std::vector<std::filesystem::path> write_camera_curve(const std::filesystem::path& dir, const CurveReport& report);
std::vector<std::filesystem::path> write_rate(const std::filesystem::path& dir, const RateReport& report,
                                              bool with_timing);

}  // namespace teatpose::harness
