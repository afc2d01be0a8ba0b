#ifndef DEGEN_ICP_IO_HPP
#define DEGEN_ICP_IO_HPP

// Plain-text interchange: ASCII PLY and CSV clouds, 4x4 poses.
// Numbers are written in shortest round-trip form, independent of locale.

#include <degen_icp/geometry.hpp>
#include <degen_icp/types.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace degen_icp::io {

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty or one per point

  bool has_normals() const { return !normals.empty(); }
};

inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view token, const std::string& context) {
  double value = 0.0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw Error(Errc::Parse, context + ": invalid number '" + std::string(token) + "'");
  }
  return value;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) end = line.size();
    std::string_view tok = line.substr(start, end - start);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
    if (sep != ' ' || !tok.empty()) out.push_back(tok);
    start = end + 1;
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline void check_normals(const PointCloud& cloud) {
  if (cloud.has_normals() && cloud.normals.size() != cloud.points.size()) {
    throw Error(Errc::InvalidArgument, "normals must match points one to one");
  }
}

}  // namespace detail

inline void write_ply(std::ostream& out, const PointCloud& cloud) {
  detail::check_normals(cloud);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) out << "property double nx\nproperty double ny\nproperty double nz\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_number(p.x()) << ' ' << format_number(p.y()) << ' ' << format_number(p.z());
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normals[i];
      out << ' ' << format_number(n.x()) << ' ' << format_number(n.y()) << ' ' << format_number(n.z());
    }
    out << '\n';
  }
}

inline void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = detail::open_out(path);
  write_ply(out, cloud);
  if (!out) throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

/// ASCII PLY reader: vertex element with x y z and optional nx ny nz;
/// other vertex properties are skipped, other elements must come after.
inline PointCloud read_ply(std::istream& in, const std::string& name = "<ply>") {
  std::string line;
  if (!std::getline(in, line) || detail::split_ws(line) != std::vector<std::string_view>{"ply"})
    throw Error(Errc::Parse, name + ": missing 'ply' magic");
  std::size_t vertices = 0;
  bool in_vertex = false, seen_vertex = false, ascii = false;
  std::vector<std::string> props;
  while (std::getline(in, line)) {
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") throw Error(Errc::Parse, name + ": only ASCII PLY is supported");
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw Error(Errc::Parse, name + ": malformed element line");
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        if (seen_vertex) throw Error(Errc::Parse, name + ": duplicate vertex element");
        seen_vertex = true;
        vertices = static_cast<std::size_t>(parse_number(tok[2], name));
      } else if (!seen_vertex) {
        throw Error(Errc::Parse, name + ": vertex element must come first");
      }
    } else if (tok[0] == "property") {
      if (in_vertex) {
        if (tok.size() != 3) throw Error(Errc::Parse, name + ": unsupported vertex property '" + line + "'");
        props.emplace_back(tok[2]);
      }
    } else {
      throw Error(Errc::Parse, name + ": unexpected header line '" + line + "'");
    }
  }
  if (!ascii) throw Error(Errc::Parse, name + ": missing format line");
  auto index_of = [&](const char* p) {
    const auto it = std::find(props.begin(), props.end(), p);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  };
  const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
  const int inx = index_of("nx"), iny = index_of("ny"), inz = index_of("nz");
  if (ix < 0 || iy < 0 || iz < 0) throw Error(Errc::Parse, name + ": vertex needs x, y, z");
  const bool normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud;
  cloud.points.reserve(vertices);
  for (std::size_t i = 0; i < vertices; ++i) {
    if (!std::getline(in, line)) throw Error(Errc::Parse, name + ": expected " + std::to_string(vertices) + " vertices");
    const auto tok = detail::split_ws(line);
    if (tok.size() != props.size()) throw Error(Errc::Parse, name + ": vertex " + std::to_string(i) + " has wrong arity");
    cloud.points.emplace_back(parse_number(tok[ix], name), parse_number(tok[iy], name), parse_number(tok[iz], name));
    if (normals) {
      cloud.normals.emplace_back(parse_number(tok[inx], name), parse_number(tok[iny], name),
                                 parse_number(tok[inz], name));
    }
  }
  return cloud;
}

inline PointCloud read_ply(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_ply(in, path.string());
}

inline void write_csv(std::ostream& out, const PointCloud& cloud) {
  detail::check_normals(cloud);
  out << (cloud.has_normals() ? "x,y,z,nx,ny,nz\n" : "x,y,z\n");
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z());
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normals[i];
      out << ',' << format_number(n.x()) << ',' << format_number(n.y()) << ',' << format_number(n.z());
    }
    out << '\n';
  }
}

inline void write_csv(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = detail::open_out(path);
  write_csv(out, cloud);
  if (!out) throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

/// CSV with a header naming x,y,z and optionally nx,ny,nz in any column order.
inline PointCloud read_csv(std::istream& in, const std::string& name = "<csv>") {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Parse, name + ": empty file");
  const auto header = detail::split(line, ',');
  auto col = [&](std::string_view key) {
    const auto it = std::find(header.begin(), header.end(), key);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int ix = col("x"), iy = col("y"), iz = col("z");
  const int inx = col("nx"), iny = col("ny"), inz = col("nz");
  if (ix < 0 || iy < 0 || iz < 0) throw Error(Errc::Parse, name + ": header needs x, y, z columns");
  const bool normals = inx >= 0 && iny >= 0 && inz >= 0;
  PointCloud cloud;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto tok = detail::split(line, ',');
    if (tok.size() != header.size()) throw Error(Errc::Parse, name + ": row " + std::to_string(row) + " has wrong arity");
    cloud.points.emplace_back(parse_number(tok[ix], name), parse_number(tok[iy], name), parse_number(tok[iz], name));
    if (normals) {
      cloud.normals.emplace_back(parse_number(tok[inx], name), parse_number(tok[iny], name),
                                 parse_number(tok[inz], name));
    }
  }
  return cloud;
}

inline PointCloud read_csv(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_csv(in, path.string());
}

/// Dispatches on extension: .ply or .csv.
inline PointCloud read_cloud(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".ply") return read_ply(path);
  if (ext == ".csv") return read_csv(path);
  throw Error(Errc::InvalidArgument, "unsupported cloud extension '" + ext + "' (use .ply or .csv)");
}

inline void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  const auto ext = path.extension().string();
  if (ext == ".ply") return write_ply(path, cloud);
  if (ext == ".csv") return write_csv(path, cloud);
  throw Error(Errc::InvalidArgument, "unsupported cloud extension '" + ext + "' (use .ply or .csv)");
}

/// Row-major matrix, one row per line, space separated.
template <typename Derived>
void write_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_number(m(r, c));
    out << '\n';
  }
}

inline void write_pose(const std::filesystem::path& path, const Pose& pose) {
  auto out = detail::open_out(path);
  write_matrix(out, pose.matrix());
}

/// 16 whitespace-separated numbers, row-major homogeneous transform.
inline Pose read_pose(std::istream& in, const std::string& name = "<pose>") {
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto tok = detail::split_ws(text);
  if (tok.size() != 16) throw Error(Errc::Parse, name + ": pose needs 16 numbers, got " + std::to_string(tok.size()));
  Mat4 m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = parse_number(tok[i], name);
  const Pose pose = Pose::from_matrix(m);
  if (!pose.is_valid(1e-6)) throw Error(Errc::Parse, name + ": rotation block is not a proper rotation");
  return pose;
}

inline Pose read_pose(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_pose(in, path.string());
}

}  // namespace degen_icp::io

#endif  // DEGEN_ICP_IO_HPP
