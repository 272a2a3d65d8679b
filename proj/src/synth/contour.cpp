#include "teatpose/synth/contour.hpp"

#include "teatpose/errors.hpp"

#include <algorithm>

namespace teatpose::synth {

std::vector<std::vector<Pixel>> connected_components(const BinaryImage& image) {
  std::vector<std::vector<Pixel>> components;
  std::vector<std::uint8_t> seen(image.data.size(), 0);
  auto index = [&](int u, int v) { return static_cast<std::size_t>(v) * image.width + u; };
  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      if (!image.at(u, v) || seen[index(u, v)]) continue;
      std::vector<Pixel> members{{u, v}};
      seen[index(u, v)] = 1;
      for (std::size_t head = 0; head < members.size(); ++head) {
        const Pixel p = members[head];
        const Pixel nbrs[4] = {{p.u + 1, p.v}, {p.u - 1, p.v}, {p.u, p.v + 1}, {p.u, p.v - 1}};
        for (const Pixel& q : nbrs) {
          if (image.at(q.u, q.v) && !seen[index(q.u, q.v)]) {
            seen[index(q.u, q.v)] = 1;
            members.push_back(q);
          }
        }
      }
      std::sort(members.begin(), members.end(),
                [](const Pixel& a, const Pixel& b) { return a.v != b.v ? a.v < b.v : a.u < b.u; });
      components.push_back(std::move(members));
    }
  }
  return components;
}

geom::Contour trace_outer_boundary(const BinaryImage& image, Pixel first) {
  if (!image.at(first.u, first.v) || image.at(first.u, first.v - 1) || image.at(first.u - 1, first.v)) {
    throw Error(ErrorCode::invalid_input, "trace_outer_boundary: start must be a component's first pixel");
  }
  // Directions in lattice coordinates (y down): E, S, W, N.
  static constexpr int kDu[4] = {1, 0, -1, 0};
  static constexpr int kDv[4] = {0, 1, 0, -1};
  auto right = [](int d) { return (d + 1) % 4; };
  auto left = [](int d) { return (d + 3) % 4; };

  // Pixels ahead of lattice vertex (x, y) when moving in direction d,
  // as (ahead-left, ahead-right). The component stays on the right.
  auto ahead = [&](int x, int y, int d) -> std::pair<bool, bool> {
    const bool nw = image.at(x - 1, y - 1), ne = image.at(x, y - 1);
    const bool sw = image.at(x - 1, y), se = image.at(x, y);
    switch (d) {
      case 0: return {ne, se};
      case 1: return {se, sw};
      case 2: return {sw, nw};
      default: return {nw, ne};
    }
  };

  geom::Contour contour;
  Pixel p = first;
  int d = 0;
  do {
    contour.push_back(p);
    p = {p.u + kDu[d], p.v + kDv[d]};
    const auto [al, ar] = ahead(p.u, p.v, d);
    if (!ar) {
      d = right(d);
    } else if (al) {
      d = left(d);
    }
  } while (!(p == first && d == 0));
  return contour;
}

}  // namespace teatpose::synth
