#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flameforge/parallel.hpp"
#include "flameforge/vec.hpp"

namespace flameforge {

/// Geometry of an axis-aligned grid of cubic cells.
struct GridDesc {
  std::array<int, 3> resolution{1, 1, 1};
  double voxel_size = 1.0;
  Vec3 origin{};
  double background = 0.0;

  /// Throws ConfigError when resolution or voxel size is not positive.
  void validate() const;

  constexpr bool contains(const Coord& c) const {
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < resolution[0] && c.j < resolution[1] &&
           c.k < resolution[2];
  }

  /// World position of a cell center.
  Vec3 world_pos(const Coord& c) const {
    return {origin.x + (c.i + 0.5) * voxel_size, origin.y + (c.j + 0.5) * voxel_size,
            origin.z + (c.k + 0.5) * voxel_size};
  }

  /// Continuous index coordinates in which cell centers sit on integers.
  Vec3 to_index_space(const Vec3& p) const {
    return {(p.x - origin.x) / voxel_size - 0.5, (p.y - origin.y) / voxel_size - 0.5,
            (p.z - origin.z) / voxel_size - 0.5};
  }

  Coord cell_of(const Vec3& p) const;

  Vec3 upper_corner() const {
    return {origin.x + resolution[0] * voxel_size, origin.y + resolution[1] * voxel_size,
            origin.z + resolution[2] * voxel_size};
  }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(resolution[0]) * static_cast<std::size_t>(resolution[1]) *
           static_cast<std::size_t>(resolution[2]);
  }

  std::uint64_t linear_index(const Coord& c) const {
    return static_cast<std::uint64_t>(c.i) +
           static_cast<std::uint64_t>(resolution[0]) *
               (static_cast<std::uint64_t>(c.j) +
                static_cast<std::uint64_t>(resolution[1]) * static_cast<std::uint64_t>(c.k));
  }

  Coord coord_of(std::uint64_t index) const {
    const auto nx = static_cast<std::uint64_t>(resolution[0]);
    const auto ny = static_cast<std::uint64_t>(resolution[1]);
    return {static_cast<int>(index % nx), static_cast<int>((index / nx) % ny),
            static_cast<int>(index / (nx * ny))};
  }

  friend bool operator==(const GridDesc&, const GridDesc&) = default;
};

/// Sparse grid built from 8x8x8 tiles. Absent tiles and inactive cells read
/// as the background value. Copies are deep.
template <class T>
class BasicGrid {
 public:
  static constexpr int kTileBits = 3;
  static constexpr int kTileDim = 1 << kTileBits;
  static constexpr int kTileMask = kTileDim - 1;
  static constexpr int kTileCells = kTileDim * kTileDim * kTileDim;

  struct Tile {
    std::array<T, kTileCells> values;
    std::bitset<kTileCells> mask;
  };

  BasicGrid() = default;

  BasicGrid(const GridDesc& desc, T background) : desc_(desc), background_(background) {
    for (int a = 0; a < 3; ++a) tile_res_[a] = (desc.resolution[a] + kTileMask) >> kTileBits;
    tiles_.resize(static_cast<std::size_t>(tile_res_[0]) * tile_res_[1] * tile_res_[2]);
  }

  BasicGrid(const BasicGrid& other)
      : desc_(other.desc_), background_(other.background_), tile_res_(other.tile_res_) {
    tiles_.resize(other.tiles_.size());
    for (std::size_t s = 0; s < tiles_.size(); ++s)
      if (other.tiles_[s]) tiles_[s] = std::make_unique<Tile>(*other.tiles_[s]);
  }

  BasicGrid& operator=(const BasicGrid& other) {
    if (this != &other) {
      BasicGrid copy(other);
      *this = std::move(copy);
    }
    return *this;
  }

  BasicGrid(BasicGrid&&) noexcept = default;
  BasicGrid& operator=(BasicGrid&&) noexcept = default;

  const GridDesc& desc() const { return desc_; }
  T background() const { return background_; }
  void set_background(T value) { background_ = value; }

  T get(const Coord& c) const {
    if (!desc_.contains(c)) return background_;
    const Tile* t = tiles_[slot_of(c)].get();
    if (!t) return background_;
    const int l = local_of(c);
    return t->mask.test(static_cast<std::size_t>(l)) ? t->values[static_cast<std::size_t>(l)] : background_;
  }

  bool is_active(const Coord& c) const {
    if (!desc_.contains(c)) return false;
    const Tile* t = tiles_[slot_of(c)].get();
    return t && t->mask.test(static_cast<std::size_t>(local_of(c)));
  }

  /// Writes a value and activates the cell. Writing outside the index domain throws.
  void set(const Coord& c, T value) {
    if (!desc_.contains(c)) throw std::out_of_range("grid write outside index domain");
    auto& t = tiles_[slot_of(c)];
    if (!t) t = make_tile();
    const auto l = static_cast<std::size_t>(local_of(c));
    t->values[l] = value;
    t->mask.set(l);
  }

  /// Overwrites the value of an already active cell; never allocates, so
  /// disjoint cells may be written concurrently.
  void set_active_value(const Coord& c, T value) {
    tiles_[slot_of(c)]->values[static_cast<std::size_t>(local_of(c))] = value;
  }

  void deactivate(const Coord& c) {
    if (!desc_.contains(c)) return;
    auto& t = tiles_[slot_of(c)];
    if (!t) return;
    const auto l = static_cast<std::size_t>(local_of(c));
    t->mask.reset(l);
    t->values[l] = background_;
    if (t->mask.none()) t.reset();
  }

  /// Activates every cell of the index domain with the given value.
  void fill_all(T value) {
    for (std::size_t s = 0; s < tiles_.size(); ++s) {
      if (!tiles_[s]) tiles_[s] = make_tile();
      const Coord o = tile_origin(s);
      for (int l = 0; l < kTileCells; ++l) {
        const Coord c = o + local_coord(l);
        if (desc_.contains(c)) {
          tiles_[s]->values[static_cast<std::size_t>(l)] = value;
          tiles_[s]->mask.set(static_cast<std::size_t>(l));
        }
      }
    }
  }

  void clear() {
    for (auto& t : tiles_) t.reset();
  }

  std::size_t active_count() const {
    std::size_t n = 0;
    for (const auto& t : tiles_)
      if (t) n += t->mask.count();
    return n;
  }

  /// Visits active cells in tile order, then in tile-local order.
  template <class F>
  void for_each_active(F&& f) const {
    for (std::size_t s = 0; s < tiles_.size(); ++s) visit_tile(s, f);
  }

  /// Like for_each_active but tiles are distributed over worker threads.
  /// The callback must only write data owned by the visited cell.
  template <class F>
  void parallel_for_each_active(F&& f) const {
    const std::vector<std::size_t> slots = allocated_tiles();
    parallel_for(0, static_cast<std::int64_t>(slots.size()),
                 [&](std::int64_t n) { visit_tile(slots[static_cast<std::size_t>(n)], f); });
  }

  std::vector<std::size_t> allocated_tiles() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < tiles_.size(); ++s)
      if (tiles_[s]) out.push_back(s);
    return out;
  }

  /// Grid with the same active set where every active cell holds `value`.
  template <class U>
  BasicGrid<U> same_topology(U value, U background) const {
    BasicGrid<U> out(desc_, background);
    for_each_active([&](const Coord& c, const T&) { out.set(c, value); });
    return out;
  }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) {
    if (!(a.desc_ == b.desc_) || a.background_ != b.background_) return false;
    for (std::size_t s = 0; s < a.tiles_.size(); ++s) {
      const Tile* ta = a.tiles_[s].get();
      const Tile* tb = b.tiles_[s].get();
      if (!ta || !tb) {
        if (ta != tb) return false;
        continue;
      }
      if (ta->mask != tb->mask) return false;
      for (int l = 0; l < kTileCells; ++l)
        if (ta->mask.test(static_cast<std::size_t>(l)) &&
            ta->values[static_cast<std::size_t>(l)] != tb->values[static_cast<std::size_t>(l)])
          return false;
    }
    return true;
  }

 private:
  std::size_t slot_of(const Coord& c) const {
    return static_cast<std::size_t>(c.i >> kTileBits) +
           static_cast<std::size_t>(tile_res_[0]) *
               (static_cast<std::size_t>(c.j >> kTileBits) +
                static_cast<std::size_t>(tile_res_[1]) * static_cast<std::size_t>(c.k >> kTileBits));
  }
  static int local_of(const Coord& c) {
    return (c.i & kTileMask) + kTileDim * ((c.j & kTileMask) + kTileDim * (c.k & kTileMask));
  }
  static Coord local_coord(int l) { return {l & kTileMask, (l >> kTileBits) & kTileMask, l >> (2 * kTileBits)}; }
  Coord tile_origin(std::size_t s) const {
    const auto tx = static_cast<std::size_t>(tile_res_[0]);
    const auto ty = static_cast<std::size_t>(tile_res_[1]);
    return {static_cast<int>(s % tx) << kTileBits, static_cast<int>((s / tx) % ty) << kTileBits,
            static_cast<int>(s / (tx * ty)) << kTileBits};
  }
  std::unique_ptr<Tile> make_tile() const {
    auto t = std::make_unique<Tile>();
    t->values.fill(background_);
    return t;
  }
  template <class F>
  void visit_tile(std::size_t s, F& f) const {
    const Tile* t = tiles_[s].get();
    if (!t) return;
    const Coord o = tile_origin(s);
    for (int l = 0; l < kTileCells; ++l)
      if (t->mask.test(static_cast<std::size_t>(l))) f(o + local_coord(l), t->values[static_cast<std::size_t>(l)]);
  }

  GridDesc desc_{};
  T background_{};
  std::array<int, 3> tile_res_{0, 0, 0};
  std::vector<std::unique_ptr<Tile>> tiles_;
};

using ScalarGrid = BasicGrid<double>;
/// Small-integer grid (material index, object id).
using IndexGrid = BasicGrid<std::uint16_t>;

/// Validated empty grid whose background (and every sample) is `fill`.
ScalarGrid create_grid(GridDesc desc, double fill);

/// Fully active grid holding `value` everywhere.
ScalarGrid create_dense_grid(const GridDesc& desc, double value);

/// Trilinear blend of the 8 cell centers around `p`; inactive cells contribute
/// the background and positions outside the grid clamp to the boundary cell.
double sample_trilinear(const ScalarGrid& grid, const Vec3& p);

/// Same as sample_trilinear, with `x` already in index space.
double sample_index_space(const ScalarGrid& grid, const Vec3& x);

/// Dense boolean mask over a grid's index domain.
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(const GridDesc& desc) : desc_(desc), bits_(desc.cell_count(), 0) {}

  const GridDesc& desc() const { return desc_; }
  bool test(const Coord& c) const { return desc_.contains(c) && bits_[desc_.linear_index(c)] != 0; }
  void set(const Coord& c, bool v) { bits_[desc_.linear_index(c)] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  GridDesc desc_{};
  std::vector<std::uint8_t> bits_;
};

/// Staggered velocity: component `a` lives on the faces normal to axis `a`
/// and has one extra sample along that axis.
class MacVelocityField {
 public:
  MacVelocityField() = default;
  explicit MacVelocityField(const GridDesc& cell_desc, const Vec3& fill = {});

  const GridDesc& desc() const { return desc_; }

  std::array<int, 3> face_resolution(int axis) const {
    auto r = desc_.resolution;
    r[static_cast<std::size_t>(axis)] += 1;
    return r;
  }

  std::size_t face_index(int axis, const Coord& f) const {
    const auto r = face_resolution(axis);
    return static_cast<std::size_t>(f.i) +
           static_cast<std::size_t>(r[0]) * (static_cast<std::size_t>(f.j) +
                                             static_cast<std::size_t>(r[1]) * static_cast<std::size_t>(f.k));
  }

  bool contains_face(int axis, const Coord& f) const {
    const auto r = face_resolution(axis);
    return f.i >= 0 && f.j >= 0 && f.k >= 0 && f.i < r[0] && f.j < r[1] && f.k < r[2];
  }

  double& at(int axis, const Coord& f) { return data_[static_cast<std::size_t>(axis)][face_index(axis, f)]; }
  double at(int axis, const Coord& f) const { return data_[static_cast<std::size_t>(axis)][face_index(axis, f)]; }

  std::vector<double>& component(int axis) { return data_[static_cast<std::size_t>(axis)]; }
  const std::vector<double>& component(int axis) const { return data_[static_cast<std::size_t>(axis)]; }

  /// World position of a face center.
  Vec3 face_position(int axis, const Coord& f) const;

  /// Component `axis` interpolated from its own lattice, `x` in cell index space.
  double sample_component_index(int axis, const Vec3& x) const;
  Vec3 sample_index(const Vec3& x) const {
    return {sample_component_index(0, x), sample_component_index(1, x), sample_component_index(2, x)};
  }
  Vec3 sample(const Vec3& p) const { return sample_index(desc_.to_index_space(p)); }

  /// Grid description whose cell centers coincide with this component's faces.
  GridDesc component_desc(int axis) const;
  ScalarGrid component_grid(int axis) const;
  void set_component(int axis, const ScalarGrid& g);

  double max_abs() const;

  friend bool operator==(const MacVelocityField&, const MacVelocityField&) = default;

 private:
  GridDesc desc_{};
  std::array<std::vector<double>, 3> data_;
};

/// Velocity sampled at a world position (component-wise staggered interpolation).
inline Vec3 sample_velocity(const MacVelocityField& field, const Vec3& p) { return field.sample(p); }

}  // namespace flameforge
