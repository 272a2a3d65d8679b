#pragma once

#include "teatpose/geom/teat_mask.hpp"

#include <cstdint>
#include <vector>

namespace teatpose::synth {

/// Row-major binary image.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int u, int v) const {
    return u >= 0 && v >= 0 && u < width && v < height && data[static_cast<std::size_t>(v) * width + u] != 0;
  }
  void set(int u, int v, bool value = true) { data[static_cast<std::size_t>(v) * width + u] = value; }
};

/// 4-connected components, each listed in scan order; components are
/// ordered by their first pixel in scan order.
std::vector<std::vector<Pixel>> connected_components(const BinaryImage& image);

/// Outer boundary of the 4-connected component containing `first`, which
/// must be the component's first pixel in scan order. Follows pixel edges
/// (cracks) clockwise on screen with one vertex per unit step, no
/// simplification. Pixel centers strictly inside the returned polygon are
/// exactly the component's pixels, holes excepted.
geom::Contour trace_outer_boundary(const BinaryImage& image, Pixel first);

}  // namespace teatpose::synth
