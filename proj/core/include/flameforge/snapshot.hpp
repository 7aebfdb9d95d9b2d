#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "flameforge/grid.hpp"

namespace flameforge {

// Binary grid container, all fields little-endian:
//   magic "FFGD" | version u32 | resolution 3 x u32 | voxel_size f64 |
//   origin 3 x f64 | active count u64 | (linear cell index u64, value f64)*
// Pairs are sorted by index; linear index = i + nx * (j + ny * k).

inline constexpr char kSnapshotMagic[4] = {'F', 'F', 'G', 'D'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const ScalarGrid& grid);
void write_snapshot(const std::filesystem::path& path, const ScalarGrid& grid);

/// Inactive cells of the returned grid read as `background`.
ScalarGrid read_snapshot(std::istream& in, double background = 0.0);
ScalarGrid read_snapshot(const std::filesystem::path& path, double background = 0.0);

/// Writes u_x, u_y, u_z as three snapshots named ux/uy/uz.ffgd in `dir`.
void write_velocity_snapshot(const std::filesystem::path& dir, const MacVelocityField& u);

}  // namespace flameforge
