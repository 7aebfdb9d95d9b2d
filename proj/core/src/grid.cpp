#include "flameforge/grid.hpp"

#include <algorithm>
#include <cmath>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

struct AxisWeights {
  int lo;
  int hi;
  double w;
};

AxisWeights axis_weights(double x, int n) {
  if (!(x > 0.0)) return {0, 0, 0.0};  // also catches NaN
  const double top = static_cast<double>(n - 1);
  if (x >= top) return {n - 1, n - 1, 0.0};
  const int lo = static_cast<int>(x);
  return {lo, lo + 1, x - lo};
}

inline double lerp(double a, double b, double w) { return a + w * (b - a); }

template <class Fetch>
double trilinear(const Vec3& x, const std::array<int, 3>& res, Fetch&& fetch) {
  const AxisWeights ax = axis_weights(x.x, res[0]);
  const AxisWeights ay = axis_weights(x.y, res[1]);
  const AxisWeights az = axis_weights(x.z, res[2]);
  const double c00 = lerp(fetch(ax.lo, ay.lo, az.lo), fetch(ax.hi, ay.lo, az.lo), ax.w);
  const double c10 = lerp(fetch(ax.lo, ay.hi, az.lo), fetch(ax.hi, ay.hi, az.lo), ax.w);
  const double c01 = lerp(fetch(ax.lo, ay.lo, az.hi), fetch(ax.hi, ay.lo, az.hi), ax.w);
  const double c11 = lerp(fetch(ax.lo, ay.hi, az.hi), fetch(ax.hi, ay.hi, az.hi), ax.w);
  return lerp(lerp(c00, c10, ay.w), lerp(c01, c11, ay.w), az.w);
}

}  // namespace

void GridDesc::validate() const {
  for (int a = 0; a < 3; ++a)
    if (resolution[static_cast<std::size_t>(a)] < 1)
      throw ConfigError("grid resolution must be >= 1 along every axis");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
    throw ConfigError("grid voxel_size must be positive, got " + std::to_string(voxel_size));
}

Coord GridDesc::cell_of(const Vec3& p) const {
  return {static_cast<int>(std::floor((p.x - origin.x) / voxel_size)),
          static_cast<int>(std::floor((p.y - origin.y) / voxel_size)),
          static_cast<int>(std::floor((p.z - origin.z) / voxel_size))};
}

ScalarGrid create_grid(GridDesc desc, double fill) {
  desc.validate();
  desc.background = fill;
  return ScalarGrid(desc, fill);
}

ScalarGrid create_dense_grid(const GridDesc& desc, double value) {
  ScalarGrid g = create_grid(desc, value);
  g.fill_all(value);
  return g;
}

double sample_index_space(const ScalarGrid& grid, const Vec3& x) {
  return trilinear(x, grid.desc().resolution, [&](int i, int j, int k) { return grid.get({i, j, k}); });
}

double sample_trilinear(const ScalarGrid& grid, const Vec3& p) {
  return sample_index_space(grid, grid.desc().to_index_space(p));
}

std::size_t CellMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

MacVelocityField::MacVelocityField(const GridDesc& cell_desc, const Vec3& fill) : desc_(cell_desc) {
  for (int a = 0; a < 3; ++a) {
    const auto r = face_resolution(a);
    data_[static_cast<std::size_t>(a)].assign(
        static_cast<std::size_t>(r[0]) * static_cast<std::size_t>(r[1]) * static_cast<std::size_t>(r[2]), fill[a]);
  }
}

Vec3 MacVelocityField::face_position(int axis, const Coord& f) const {
  Vec3 p = desc_.world_pos(f);
  p[axis] -= 0.5 * desc_.voxel_size;
  return p;
}

double MacVelocityField::sample_component_index(int axis, const Vec3& x) const {
  Vec3 lattice = x;
  lattice[axis] += 0.5;
  const auto r = face_resolution(axis);
  const auto& d = data_[static_cast<std::size_t>(axis)];
  return trilinear(lattice, r, [&](int i, int j, int k) {
    return d[static_cast<std::size_t>(i) +
             static_cast<std::size_t>(r[0]) * (static_cast<std::size_t>(j) +
                                               static_cast<std::size_t>(r[1]) * static_cast<std::size_t>(k))];
  });
}

GridDesc MacVelocityField::component_desc(int axis) const {
  GridDesc d = desc_;
  d.resolution = face_resolution(axis);
  d.origin[axis] -= 0.5 * desc_.voxel_size;
  d.background = 0.0;
  return d;
}

ScalarGrid MacVelocityField::component_grid(int axis) const {
  const GridDesc d = component_desc(axis);
  ScalarGrid g(d, 0.0);
  const auto& v = data_[static_cast<std::size_t>(axis)];
  for (std::uint64_t n = 0; n < v.size(); ++n) g.set(d.coord_of(n), v[n]);
  return g;
}

void MacVelocityField::set_component(int axis, const ScalarGrid& g) {
  const GridDesc d = component_desc(axis);
  auto& v = data_[static_cast<std::size_t>(axis)];
  for (std::uint64_t n = 0; n < v.size(); ++n) v[n] = g.get(d.coord_of(n));
}

double MacVelocityField::max_abs() const {
  double m = 0.0;
  for (const auto& c : data_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace flameforge
