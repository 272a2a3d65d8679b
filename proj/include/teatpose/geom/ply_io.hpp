#pragma once

#include "teatpose/geom/point_cloud.hpp"

#include <filesystem>
#include <iosfwd>

namespace teatpose::geom {

enum class PlyFormat { ascii, binary_little_endian };

/// x, y, z as float32 (mm), plus uchar red/green/blue when the cloud has
/// colors. The frame tag travels as a `comment frame <name>` header line.
void write_ply(std::ostream& out, const PointCloud& cloud, PlyFormat format);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format);

/// Reads the `vertex` element of an ascii or binary_little_endian PLY.
/// Unknown vertex properties are skipped; other elements are ignored when
/// they come after the vertices. Throws parse_error on malformed input.
PointCloud read_ply(std::istream& in);
PointCloud read_ply(const std::filesystem::path& path);

}  // namespace teatpose::geom
