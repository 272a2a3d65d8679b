#include "teatpose/geom/teat_mask.hpp"

#include "teatpose/errors.hpp"

#include <algorithm>

namespace teatpose::geom {

namespace {

using I64 = long long;

int orientation(const Pixel& a, const Pixel& b, const Pixel& c) {
  const I64 cross = static_cast<I64>(b.u - a.u) * (c.v - a.v) - static_cast<I64>(b.v - a.v) * (c.u - a.u);
  return (cross > 0) - (cross < 0);
}

// c is known to be collinear with ab.
bool on_segment(const Pixel& a, const Pixel& b, const Pixel& c) {
  return std::min(a.u, b.u) <= c.u && c.u <= std::max(a.u, b.u) && std::min(a.v, b.v) <= c.v &&
         c.v <= std::max(a.v, b.v);
}

// True when segments ab and cd share anything other than common endpoints.
bool bad_intersection(const Pixel& a, const Pixel& b, const Pixel& c, const Pixel& d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;

  if (o1 == 0 && o2 == 0) {
    // Collinear: overlap of positive length is a violation.
    const bool use_u = a.u != b.u || c.u != d.u;
    auto key = [&](const Pixel& p) { return use_u ? p.u : p.v; };
    const int lo = std::max(std::min(key(a), key(b)), std::min(key(c), key(d)));
    const int hi = std::min(std::max(key(a), key(b)), std::max(key(c), key(d)));
    return hi > lo;
  }
  auto touches = [](const Pixel& p, const Pixel& s0, const Pixel& s1, int o) {
    return o == 0 && on_segment(s0, s1, p) && !(p == s0) && !(p == s1);
  };
  return touches(c, a, b, o1) || touches(d, a, b, o2) || touches(a, c, d, o3) || touches(b, c, d, o4);
}

}  // namespace

TeatMask::TeatMask(std::string teat_id, std::int64_t stamp_us, Contour contour, ImageSize bounds)
    : teat_id_(std::move(teat_id)), stamp_us_(stamp_us), contour_(std::move(contour)) {
  if (contour_.size() < 3) {
    throw Error(ErrorCode::invalid_input, "mask contour needs at least 3 vertices");
  }
  for (const auto& p : contour_) {
    if (p.u < 0 || p.v < 0 || p.u > bounds.width || p.v > bounds.height) {
      throw Error(ErrorCode::invalid_input, "mask contour vertex outside the image");
    }
  }
  if (!is_simple_polygon(contour_)) {
    throw Error(ErrorCode::invalid_input, "mask contour is not a simple polygon");
  }
}

TeatMask TeatMask::with_stamp(std::int64_t stamp_us) const {
  TeatMask copy = *this;
  copy.stamp_us_ = stamp_us;
  return copy;
}

Contour subsample_contour(std::span<const Pixel> contour, int stride) {
  if (stride < 1) throw Error(ErrorCode::invalid_parameter, "contour stride must be >= 1");
  Contour out;
  out.reserve(contour.size() / static_cast<std::size_t>(stride) + 1);
  for (std::size_t i = 0; i < contour.size(); i += static_cast<std::size_t>(stride)) {
    out.push_back(contour[i]);
  }
  return out;
}

double signed_area(std::span<const Pixel> contour) {
  I64 twice = 0;
  for (std::size_t i = 0, j = contour.size() - 1; i < contour.size(); j = i++) {
    twice += static_cast<I64>(contour[j].u) * contour[i].v - static_cast<I64>(contour[i].u) * contour[j].v;
  }
  return contour.empty() ? 0.0 : 0.5 * static_cast<double>(twice);
}

bool is_simple_polygon(std::span<const Pixel> contour) {
  const std::size_t n = contour.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel& prev = contour[(i + n - 1) % n];
    const Pixel& cur = contour[i];
    const Pixel& next = contour[(i + 1) % n];
    if (cur == next) return false;
    // Adjacent edges folding back onto each other.
    if (orientation(prev, cur, next) == 0) {
      const I64 dot = static_cast<I64>(cur.u - prev.u) * (next.u - cur.u) +
                      static_cast<I64>(cur.v - prev.v) * (next.v - cur.v);
      if (dot < 0) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel& a = contour[i];
    const Pixel& b = contour[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (bad_intersection(a, b, contour[j], contour[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(std::span<const Pixel> contour, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = contour.size() - 1; i < contour.size(); j = i++) {
    const double xi = contour[i].u, yi = contour[i].v;
    const double xj = contour[j].u, yj = contour[j].v;
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

}  // namespace teatpose::geom
