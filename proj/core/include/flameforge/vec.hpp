#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace flameforge {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cwise_mul(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

/// Integer cell index on a grid.
struct Coord {
  int i = 0;
  int j = 0;
  int k = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
  constexpr int& operator[](int axis) { return axis == 0 ? i : (axis == 1 ? j : k); }

  friend constexpr Coord operator+(const Coord& a, const Coord& b) { return {a.i + b.i, a.j + b.j, a.k + b.k}; }
  friend constexpr Coord operator-(const Coord& a, const Coord& b) { return {a.i - b.i, a.j - b.j, a.k - b.k}; }
  friend constexpr bool operator==(const Coord&, const Coord&) = default;
};

/// The six face neighbours, ordered -x, +x, -y, +y, -z, +z.
inline constexpr std::array<Coord, 6> kFaceNeighbors{{
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

constexpr Coord axis_offset(int axis) {
  return axis == 0 ? Coord{1, 0, 0} : (axis == 1 ? Coord{0, 1, 0} : Coord{0, 0, 1});
}

struct Aabb {
  Vec3 min;
  Vec3 max;

  constexpr bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  friend constexpr bool operator==(const Aabb&, const Aabb&) = default;
};

}  // namespace flameforge
