#pragma once

#include <span>

namespace teatpose::harness {

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);
/// Linear-interpolated percentile, p in [0, 100]. NaN for an empty input.
double percentile(std::span<const double> values, double p);

}  // namespace teatpose::harness
