#pragma once

#include <cstdio>
#include <string>

namespace teatpose {

/// Round-trip exact decimal form of a double (%.17g).
inline std::string exact(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return {buf, static_cast<std::size_t>(n)};
}

/// Fixed-point form with `decimals` digits.
inline std::string fixed(double value, int decimals) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return {buf, static_cast<std::size_t>(n)};
}

}  // namespace teatpose
