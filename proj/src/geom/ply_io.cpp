#include "teatpose/geom/ply_io.hpp"

#include "teatpose/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace teatpose::geom {

static_assert(std::endian::native == std::endian::little, "binary PLY IO assumes a little-endian host");

namespace {

enum class ScalarType { i8, u8, i16, u16, i32, u32, f32, f64 };

ScalarType parse_type(const std::string& name) {
  if (name == "char" || name == "int8") return ScalarType::i8;
  if (name == "uchar" || name == "uint8") return ScalarType::u8;
  if (name == "short" || name == "int16") return ScalarType::i16;
  if (name == "ushort" || name == "uint16") return ScalarType::u16;
  if (name == "int" || name == "int32") return ScalarType::i32;
  if (name == "uint" || name == "uint32") return ScalarType::u32;
  if (name == "float" || name == "float32") return ScalarType::f32;
  if (name == "double" || name == "float64") return ScalarType::f64;
  throw Error(ErrorCode::parse_error, "ply: unknown property type '" + name + "'");
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::i8:
    case ScalarType::u8: return 1;
    case ScalarType::i16:
    case ScalarType::u16: return 2;
    case ScalarType::i32:
    case ScalarType::u32:
    case ScalarType::f32: return 4;
    case ScalarType::f64: return 8;
  }
  return 0;
}

template <typename T>
double load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

double decode(ScalarType t, const char* p) {
  switch (t) {
    case ScalarType::i8: return load<std::int8_t>(p);
    case ScalarType::u8: return load<std::uint8_t>(p);
    case ScalarType::i16: return load<std::int16_t>(p);
    case ScalarType::u16: return load<std::uint16_t>(p);
    case ScalarType::i32: return load<std::int32_t>(p);
    case ScalarType::u32: return load<std::uint32_t>(p);
    case ScalarType::f32: return load<float>(p);
    case ScalarType::f64: return load<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type;
};

}  // namespace

void write_ply(std::ostream& out, const PointCloud& cloud, PlyFormat format) {
  const bool colored = cloud.has_colors();
  out << "ply\n"
      << (format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment frame " << to_string(cloud.frame()) << "\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (colored) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const float xyz[3] = {static_cast<float>(cloud[i].x()), static_cast<float>(cloud[i].y()),
                          static_cast<float>(cloud[i].z())};
    if (format == PlyFormat::ascii) {
      char line[128];
      int n = std::snprintf(line, sizeof line, "%.9g %.9g %.9g", xyz[0], xyz[1], xyz[2]);
      out.write(line, n);
      if (colored) {
        const Rgb& c = cloud.colors()[i];
        out << ' ' << int(c.r) << ' ' << int(c.g) << ' ' << int(c.b);
      }
      out << '\n';
    } else {
      out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
      if (colored) {
        const Rgb& c = cloud.colors()[i];
        const std::uint8_t rgb[3] = {c.r, c.g, c.b};
        out.write(reinterpret_cast<const char*>(rgb), sizeof rgb);
      }
    }
  }
  if (!out) throw Error(ErrorCode::invalid_input, "ply: write failed");
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_input, "ply: cannot open " + path.string());
  write_ply(out, cloud, format);
}

PointCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw Error(ErrorCode::parse_error, "ply: missing magic");
  }
  bool binary = false;
  bool have_format = false;
  Frame frame = Frame::camera;
  std::size_t count = 0;
  bool in_vertex = false, seen_vertex = false;
  std::vector<Property> props;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw Error(ErrorCode::parse_error, "ply: unsupported format '" + fmt + "'");
      have_format = true;
    } else if (key == "comment") {
      std::string tag, value;
      ls >> tag >> value;
      if (tag == "frame") frame = value == "world" ? Frame::world : Frame::camera;
    } else if (key == "element") {
      std::string name;
      ls >> name;
      if (name == "vertex") {
        if (!(ls >> count)) throw Error(ErrorCode::parse_error, "ply: bad vertex count");
        in_vertex = seen_vertex = true;
      } else {
        if (!seen_vertex) throw Error(ErrorCode::parse_error, "ply: vertex must be the first element");
        in_vertex = false;
      }
    } else if (key == "property" && in_vertex) {
      std::string type, name;
      ls >> type;
      if (type == "list") throw Error(ErrorCode::parse_error, "ply: list properties on vertices are unsupported");
      ls >> name;
      props.push_back({name, parse_type(type)});
    }
  }
  if (!have_format || !seen_vertex) throw Error(ErrorCode::parse_error, "ply: incomplete header");

  int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
  std::vector<std::size_t> offsets;
  std::size_t stride = 0;
  for (std::size_t k = 0; k < props.size(); ++k) {
    const auto& n = props[k].name;
    const int ki = static_cast<int>(k);
    if (n == "x") ix = ki;
    else if (n == "y") iy = ki;
    else if (n == "z") iz = ki;
    else if (n == "red" || n == "r") ir = ki;
    else if (n == "green" || n == "g") ig = ki;
    else if (n == "blue" || n == "b") ib = ki;
    offsets.push_back(stride);
    stride += type_size(props[k].type);
  }
  if (ix < 0 || iy < 0 || iz < 0) throw Error(ErrorCode::parse_error, "ply: vertex lacks x/y/z");
  const bool colored = ir >= 0 && ig >= 0 && ib >= 0;

  std::vector<Vec3> points;
  std::vector<Rgb> colors;
  points.reserve(count);
  std::vector<double> values(props.size());
  std::vector<char> record(stride);
  for (std::size_t i = 0; i < count; ++i) {
    if (binary) {
      if (!in.read(record.data(), static_cast<std::streamsize>(stride))) {
        throw Error(ErrorCode::parse_error, "ply: truncated binary vertex data");
      }
      for (std::size_t k = 0; k < props.size(); ++k) values[k] = decode(props[k].type, record.data() + offsets[k]);
    } else {
      if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "ply: truncated ascii vertex data");
      std::istringstream ls(line);
      for (std::size_t k = 0; k < props.size(); ++k) {
        if (!(ls >> values[k])) throw Error(ErrorCode::parse_error, "ply: malformed vertex line");
        // Same value a binary file of the declared type would carry.
        if (props[k].type == ScalarType::f32) values[k] = static_cast<float>(values[k]);
      }
    }
    points.emplace_back(values[ix], values[iy], values[iz]);
    if (colored) {
      colors.push_back({static_cast<std::uint8_t>(values[ir]), static_cast<std::uint8_t>(values[ig]),
                        static_cast<std::uint8_t>(values[ib])});
    }
  }
  try {
    return PointCloud(frame, std::move(points), std::move(colors));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, std::string("ply: ") + e.what());
  }
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "ply: cannot open " + path.string());
  return read_ply(in);
}

}  // namespace teatpose::geom
