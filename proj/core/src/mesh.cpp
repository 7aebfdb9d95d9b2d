#include "flameforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

constexpr const char* kBuiltinBox = "builtin:box";
constexpr const char* kBuiltinSphere = "builtin:sphere";

class VertexWelder {
 public:
  explicit VertexWelder(TriangleMesh& mesh) : mesh_(mesh) {}

  std::uint32_t add(const Vec3& p) {
    const auto key = std::make_tuple(p.x, p.y, p.z);
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(p);
    index_.emplace(key, id);
    return id;
  }

 private:
  TriangleMesh& mesh_;
  std::map<std::tuple<double, double, double>, std::uint32_t> index_;
};

void add_triangle(TriangleMesh& mesh, VertexWelder& welder, const Vec3& a, const Vec3& b, const Vec3& c) {
  const std::uint32_t ia = welder.add(a), ib = welder.add(b), ic = welder.add(c);
  if (ia == ib || ib == ic || ia == ic) return;
  mesh.faces.push_back({ia, ib, ic});
}

TriangleMesh parse_ascii_stl(std::istream& in) {
  TriangleMesh mesh;
  VertexWelder welder(mesh);
  std::string token;
  std::vector<Vec3> loop;
  while (in >> token) {
    if (token == "vertex") {
      Vec3 p;
      if (!(in >> p.x >> p.y >> p.z)) throw IoError("malformed STL vertex");
      loop.push_back(p);
    } else if (token == "endloop") {
      for (std::size_t n = 1; n + 1 < loop.size(); ++n) add_triangle(mesh, welder, loop[0], loop[n], loop[n + 1]);
      loop.clear();
    }
  }
  return mesh;
}

TriangleMesh parse_binary_stl(const std::string& bytes) {
  if (bytes.size() < 84) throw IoError("binary STL too short");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + 80, 4);
  if (bytes.size() < 84 + static_cast<std::size_t>(count) * 50) throw IoError("binary STL truncated");
  TriangleMesh mesh;
  VertexWelder welder(mesh);
  for (std::uint32_t t = 0; t < count; ++t) {
    const char* rec = bytes.data() + 84 + static_cast<std::size_t>(t) * 50;
    Vec3 v[3];
    for (int n = 0; n < 3; ++n) {
      float xyz[3];
      std::memcpy(xyz, rec + 12 + n * 12, 12);
      v[n] = {xyz[0], xyz[1], xyz[2]};
    }
    add_triangle(mesh, welder, v[0], v[1], v[2]);
  }
  return mesh;
}

double signed_area(double au, double av, double bu, double bv, double cu, double cv) {
  return (bu - au) * (cv - av) - (bv - av) * (cu - au);
}

// Half-open coverage rule: a point on an edge belongs to exactly one of the
// two triangles sharing it (edges are assumed counter-clockwise).
bool edge_owns_boundary(double au, double av, double bu, double bv) {
  return (av == bv && bu < au) || (bv < av);
}

// Crossing positions of rays along `axis` through cell centers, per row.
std::vector<std::vector<double>> cast_rays(const TriangleMesh& mesh, const GridDesc& desc, int axis) {
  const int ua = (axis + 1) % 3;
  const int va = (axis + 2) % 3;
  const int nu = desc.resolution[static_cast<std::size_t>(ua)];
  const int nv = desc.resolution[static_cast<std::size_t>(va)];
  const double h = desc.voxel_size;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv));

  for (const auto& f : mesh.faces) {
    Vec3 p[3] = {mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]};
    double area = signed_area(p[0][ua], p[0][va], p[1][ua], p[1][va], p[2][ua], p[2][va]);
    if (area == 0.0) continue;
    if (area < 0.0) {
      std::swap(p[1], p[2]);
      area = -area;
    }
    double umin = std::min({p[0][ua], p[1][ua], p[2][ua]}), umax = std::max({p[0][ua], p[1][ua], p[2][ua]});
    double vmin = std::min({p[0][va], p[1][va], p[2][va]}), vmax = std::max({p[0][va], p[1][va], p[2][va]});
    const int i0 = std::max(0, static_cast<int>(std::ceil((umin - desc.origin[ua]) / h - 0.5)));
    const int i1 = std::min(nu - 1, static_cast<int>(std::floor((umax - desc.origin[ua]) / h - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::ceil((vmin - desc.origin[va]) / h - 0.5)));
    const int j1 = std::min(nv - 1, static_cast<int>(std::floor((vmax - desc.origin[va]) / h - 0.5)));
    for (int j = j0; j <= j1; ++j) {
      const double pv = desc.origin[va] + (j + 0.5) * h;
      for (int i = i0; i <= i1; ++i) {
        const double pu = desc.origin[ua] + (i + 0.5) * h;
        double w[3];
        bool inside = true;
        for (int e = 0; e < 3 && inside; ++e) {
          const Vec3& a = p[(e + 1) % 3];
          const Vec3& b = p[(e + 2) % 3];
          w[e] = signed_area(a[ua], a[va], b[ua], b[va], pu, pv);
          if (w[e] < 0.0 || (w[e] == 0.0 && !edge_owns_boundary(a[ua], a[va], b[ua], b[va]))) inside = false;
        }
        if (!inside) continue;
        const double x = (w[0] * p[0][axis] + w[1] * p[1][axis] + w[2] * p[2][axis]) / area;
        rows[static_cast<std::size_t>(i) + static_cast<std::size_t>(nu) * static_cast<std::size_t>(j)].push_back(x);
      }
    }
  }
  for (auto& r : rows) std::sort(r.begin(), r.end());
  return rows;
}

// Adds one vote to every cell whose center has odd crossing parity along `axis`.
void parity_votes(const TriangleMesh& mesh, const GridDesc& desc, int axis, std::vector<std::uint8_t>& votes) {
  const int ua = (axis + 1) % 3;
  const int va = (axis + 2) % 3;
  const int nu = desc.resolution[static_cast<std::size_t>(ua)];
  const int na = desc.resolution[static_cast<std::size_t>(axis)];
  const auto rows = cast_rays(mesh, desc, axis);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& hits = rows[r];
    if (hits.empty()) continue;
    const int i = static_cast<int>(r % static_cast<std::size_t>(nu));
    const int j = static_cast<int>(r / static_cast<std::size_t>(nu));
    std::size_t passed = 0;
    for (int n = 0; n < na; ++n) {
      const double x = desc.origin[axis] + (n + 0.5) * desc.voxel_size;
      while (passed < hits.size() && hits[passed] < x) ++passed;
      if (passed % 2 == 1) {
        Coord c;
        c[axis] = n;
        c[ua] = i;
        c[va] = j;
        ++votes[desc.linear_index(c)];
      }
    }
  }
}

}  // namespace

Vec3 Transform::apply(const Vec3& p) const {
  Vec3 q = cwise_mul(p, scale);
  const double rx = rotate_deg.x * std::numbers::pi / 180.0;
  const double ry = rotate_deg.y * std::numbers::pi / 180.0;
  const double rz = rotate_deg.z * std::numbers::pi / 180.0;
  if (rx != 0.0) q = {q.x, std::cos(rx) * q.y - std::sin(rx) * q.z, std::sin(rx) * q.y + std::cos(rx) * q.z};
  if (ry != 0.0) q = {std::cos(ry) * q.x + std::sin(ry) * q.z, q.y, -std::sin(ry) * q.x + std::cos(ry) * q.z};
  if (rz != 0.0) q = {std::cos(rz) * q.x - std::sin(rz) * q.y, std::sin(rz) * q.x + std::cos(rz) * q.y, q.z};
  return q + translate;
}

TriangleMesh load_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const bool ascii = bytes.rfind("solid", 0) == 0 && bytes.find("facet") != std::string::npos;
  if (ascii) {
    std::istringstream text(bytes);
    return parse_ascii_stl(text);
  }
  return parse_binary_stl(bytes);
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  std::vector<Vec3> positions;
  TriangleMesh mesh;
  VertexWelder welder(mesh);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      ls >> p.x >> p.y >> p.z;
      positions.push_back(p);
    } else if (tag == "f") {
      std::vector<Vec3> poly;
      std::string corner;
      while (ls >> corner) {
        const long idx = std::stol(corner.substr(0, corner.find('/')));
        const long resolved = idx < 0 ? static_cast<long>(positions.size()) + idx : idx - 1;
        if (resolved < 0 || resolved >= static_cast<long>(positions.size()))
          throw IoError("OBJ face index out of range in '" + path.string() + "'");
        poly.push_back(positions[static_cast<std::size_t>(resolved)]);
      }
      for (std::size_t n = 1; n + 1 < poly.size(); ++n) add_triangle(mesh, welder, poly[0], poly[n], poly[n + 1]);
    }
  }
  return mesh;
}

bool is_builtin_mesh(const std::string& source) { return source == kBuiltinBox || source == kBuiltinSphere; }

TriangleMesh load_mesh(const std::string& source) {
  if (source == kBuiltinBox) return make_box_mesh({{0, 0, 0}, {1, 1, 1}});
  if (source == kBuiltinSphere) return make_sphere_mesh({0, 0, 0}, 1.0);
  std::filesystem::path path(source);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".stl") return load_stl(path);
  if (ext == ".obj") return load_obj(path);
  throw IoError("unsupported mesh format '" + ext + "' for '" + source + "'");
}

TriangleMesh make_box_mesh(const Aabb& b) {
  TriangleMesh m;
  for (int n = 0; n < 8; ++n)
    m.vertices.push_back({(n & 1) ? b.max.x : b.min.x, (n & 2) ? b.max.y : b.min.y, (n & 4) ? b.max.z : b.min.z});
  // Counter-clockwise when seen from outside.
  const std::uint32_t quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                     {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh make_sphere_mesh(const Vec3& center, double radius, int segments) {
  const int rings = std::max(segments / 2, 3);
  const int slices = std::max(segments, 3);
  TriangleMesh m;
  m.vertices.push_back(center + Vec3{0, 0, radius});
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s < slices; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / slices;
      m.vertices.push_back(center + Vec3{radius * std::sin(theta) * std::cos(phi),
                                         radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta)});
    }
  }
  m.vertices.push_back(center + Vec3{0, 0, -radius});
  const auto ring_vertex = [&](int r, int s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * slices + (s % slices));
  };
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  for (int s = 0; s < slices; ++s) m.faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r)
    for (int s = 0; s < slices; ++s) {
      m.faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s), ring_vertex(r + 1, s + 1)});
      m.faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s + 1), ring_vertex(r, s + 1)});
    }
  for (int s = 0; s < slices; ++s) m.faces.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  return m;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Transform& transform) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = transform.apply(v);
  // A mirroring scale flips orientation; restore outward winding.
  if (transform.scale.x * transform.scale.y * transform.scale.z < 0.0)
    for (auto& f : out.faces) std::swap(f[1], f[2]);
  return out;
}

bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& f : mesh.faces)
    for (int e = 0; e < 3; ++e) ++directed[{f[static_cast<std::size_t>(e)], f[static_cast<std::size_t>((e + 1) % 3)]}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end() || twin->second != 1) return false;
  }
  return true;
}

ScalarGrid voxelize_mesh(const TriangleMesh& mesh, const Transform& transform, const GridDesc& desc,
                         std::vector<std::string>* warnings) {
  if (mesh.empty()) throw ConfigError("cannot voxelize an empty mesh");
  desc.validate();
  const TriangleMesh world = transformed(mesh, transform);
  GridDesc d = desc;
  d.background = 0.0;
  ScalarGrid occupancy(d, 0.0);
  std::vector<std::uint8_t> votes(d.cell_count(), 0);
  const bool closed = is_watertight(world);
  int needed = 1;
  parity_votes(world, d, 0, votes);
  if (!closed) {
    if (warnings) warnings->push_back("mesh is not watertight; using majority vote of x/y/z ray parity");
    parity_votes(world, d, 1, votes);
    parity_votes(world, d, 2, votes);
    needed = 2;
  }
  for (std::uint64_t n = 0; n < votes.size(); ++n)
    if (votes[n] >= needed) occupancy.set(d.coord_of(n), 1.0);
  return occupancy;
}

}  // namespace flameforge
