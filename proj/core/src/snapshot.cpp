#include "flameforge/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <utility>
#include <vector>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const ScalarGrid& grid) {
  const GridDesc& d = grid.desc();
  std::vector<std::pair<std::uint64_t, double>> cells;
  cells.reserve(grid.active_count());
  grid.for_each_active([&](const Coord& c, double v) { cells.emplace_back(d.linear_index(c), v); });
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  out.write(kSnapshotMagic, 4);
  put_le<std::uint32_t>(out, kSnapshotVersion);
  for (int a = 0; a < 3; ++a) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.resolution[a]));
  put_le<double>(out, d.voxel_size);
  for (int a = 0; a < 3; ++a) put_le<double>(out, d.origin[a]);
  put_le<std::uint64_t>(out, cells.size());
  for (const auto& [index, value] : cells) {
    put_le<std::uint64_t>(out, index);
    put_le<double>(out, value);
  }
  if (!out) throw IoError("failed writing snapshot");
}

void write_snapshot(const std::filesystem::path& path, const ScalarGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_snapshot(out, grid);
}

ScalarGrid read_snapshot(std::istream& in, double background) {
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kSnapshotMagic, 4) != 0)
    throw IoError("not a grid snapshot: expected magic \"FFGD\"");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) throw IoError("unsupported snapshot version " + std::to_string(version));
  GridDesc d;
  for (int a = 0; a < 3; ++a) {
    const auto r = get_le<std::uint32_t>(in);
    if (r == 0 || r > (1u << 24)) throw IoError("snapshot has invalid resolution");
    d.resolution[static_cast<std::size_t>(a)] = static_cast<int>(r);
  }
  d.voxel_size = get_le<double>(in);
  for (int a = 0; a < 3; ++a) d.origin[a] = get_le<double>(in);
  d.background = background;
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("snapshot header invalid: ") + e.what());
  }
  const auto count = get_le<std::uint64_t>(in);
  if (count > d.cell_count()) throw IoError("snapshot active count exceeds cell count");
  ScalarGrid grid(d, background);
  std::uint64_t previous = 0;
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto index = get_le<std::uint64_t>(in);
    const auto value = get_le<double>(in);
    if (index >= d.cell_count() || (n > 0 && index <= previous))
      throw IoError("snapshot cell indices out of range or unsorted");
    previous = index;
    grid.set(d.coord_of(index), value);
  }
  return grid;
}

ScalarGrid read_snapshot(const std::filesystem::path& path, double background) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_snapshot(in, background);
}

void write_velocity_snapshot(const std::filesystem::path& dir, const MacVelocityField& u) {
  static constexpr const char* kNames[3] = {"ux.ffgd", "uy.ffgd", "uz.ffgd"};
  for (int a = 0; a < 3; ++a) write_snapshot(dir / kNames[a], u.component_grid(a));
}

}  // namespace flameforge
