#include "flameforge/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Initialization band half-width, cells.
constexpr int kBand = 2;

struct Box {
  Coord lo;
  Coord hi;  // inclusive
  int nx() const { return hi.i - lo.i + 1; }
  int ny() const { return hi.j - lo.j + 1; }
  int nz() const { return hi.k - lo.k + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()) * static_cast<std::size_t>(nz());
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx()) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny()) * k);
  }
};

// Godunov upwind update for the Eikonal equation with unit speed.
double solve_eikonal(double a, double b, double c, double h) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  double x = a + h;
  if (x <= b) return x;
  const double ab = a - b;
  x = 0.5 * (a + b + std::sqrt(2.0 * h * h - ab * ab));
  if (x <= c) return x;
  const double s = a + b + c;
  const double q = a * a + b * b + c * c - h * h;
  const double disc = s * s - 3.0 * q;
  return (s + std::sqrt(std::max(disc, 0.0))) / 3.0;
}

}  // namespace

Sdf rebuild_sdf(const ScalarGrid& mass, double iso_threshold, const SdfOptions& options) {
  if (!(iso_threshold > 0.0 && iso_threshold < 1.0))
    throw ConfigError("sdf iso_threshold must lie in (0,1)");
  const GridDesc& gd = mass.desc();
  GridDesc sd = gd;
  sd.background = kSdfFar;
  Sdf out{ScalarGrid(sd, kSdfFar), iso_threshold, true};

  Coord lo{gd.resolution[0], gd.resolution[1], gd.resolution[2]};
  Coord hi{-1, -1, -1};
  mass.for_each_active([&](const Coord& c, double m) {
    if (m < iso_threshold) return;
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  });
  if (hi.i < 0) return out;
  out.empty = false;

  Box box;
  if (options.margin < 0) {
    box = {{0, 0, 0}, {gd.resolution[0] - 1, gd.resolution[1] - 1, gd.resolution[2] - 1}};
  } else {
    for (int a = 0; a < 3; ++a) {
      box.lo[a] = std::max(0, lo[a] - options.margin);
      box.hi[a] = std::min(gd.resolution[static_cast<std::size_t>(a)] - 1, hi[a] + options.margin);
    }
  }

  // Work arrays padded by one cell on every side so stencils need no bounds
  // checks. Padding cells hold the mass just outside the box (or count as
  // outside when beyond the domain) and are never swept.
  const int nx = box.nx(), ny = box.ny(), nz = box.nz();
  const std::ptrdiff_t sy = nx + 2, sz = static_cast<std::ptrdiff_t>(nx + 2) * (ny + 2);
  const std::size_t n = static_cast<std::size_t>(sz) * static_cast<std::size_t>(nz + 2);
  auto at = [&](int i, int j, int k) {
    return static_cast<std::size_t>((i + 1) + (j + 1) * sy + (k + 1) * sz);
  };
  std::vector<double> m(n, 0.0);
  std::vector<std::uint8_t> inside(n, 0);
  for (int k = -1; k <= nz; ++k)
    for (int j = -1; j <= ny; ++j)
      for (int i = -1; i <= nx; ++i) {
        const Coord c = box.lo + Coord{i, j, k};
        const std::size_t id = at(i, j, k);
        m[id] = mass.get(c);
        inside[id] = gd.contains(c) && m[id] >= iso_threshold ? 1 : 0;
      }

  const double h = gd.voxel_size;
  std::vector<double> d(n, kInf);
  std::vector<std::uint8_t> fixed(n, 1);
  const std::ptrdiff_t stride[3] = {1, sy, sz};

  // Interface initialization: every inside/outside face pair contributes a
  // square patch at its sub-voxel iso crossing. Cells within kBand of a patch
  // take the distance to the nearest one; values below kBand * h are exact
  // and stay fixed, larger ones only seed the sweep.
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) fixed[at(i, j, k)] = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = at(i, j, k);
        if (!inside[id]) continue;
        for (int a = 0; a < 3; ++a)
          for (int s = -1; s <= 1; s += 2) {
            const std::size_t nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(id) + s * stride[a]);
            if (inside[nb]) continue;
            const double denom = m[id] - m[nb];
            const double theta = std::clamp(denom > 0.0 ? (m[id] - iso_threshold) / denom : 0.5, 0.0, 1.0);
            double centre[3] = {static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
            centre[a] += s * theta;
            const int lo3[3] = {std::max(0, i - kBand), std::max(0, j - kBand), std::max(0, k - kBand)};
            const int hi3[3] = {std::min(nx - 1, i + kBand), std::min(ny - 1, j + kBand), std::min(nz - 1, k + kBand)};
            for (int w = lo3[2]; w <= hi3[2]; ++w)
              for (int v = lo3[1]; v <= hi3[1]; ++v)
                for (int u = lo3[0]; u <= hi3[0]; ++u) {
                  const double x[3] = {static_cast<double>(u), static_cast<double>(v), static_cast<double>(w)};
                  double sq = 0.0;
                  for (int b = 0; b < 3; ++b) {
                    double e = std::abs(x[b] - centre[b]);
                    if (b != a) e = std::max(0.0, e - 0.5);
                    sq += e * e;
                  }
                  const std::size_t t = at(u, v, w);
                  d[t] = std::min(d[t], std::sqrt(sq) * h);
                }
          }
      }
  // Cells touching a crossing instead combine their per-axis crossings as the
  // distance to the plane through them, which rounds corners the way the
  // interpolated iso-contour does.
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = at(i, j, k);
        double inv_sq = 0.0;
        bool crossing = false;
        for (int a = 0; a < 3; ++a) {
          double best = kInf;
          for (int s = -1; s <= 1; s += 2) {
            const std::size_t nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(id) + s * stride[a]);
            if (inside[nb] == inside[id]) continue;
            const double denom = m[id] - m[nb];
            const double theta = std::clamp(denom != 0.0 ? (m[id] - iso_threshold) / denom : 0.5, 0.0, 1.0);
            best = std::min(best, theta * h);
          }
          if (best < kInf) {
            crossing = true;
            inv_sq = best <= 0.0 ? kInf : inv_sq + 1.0 / (best * best);
          }
        }
        if (crossing) d[id] = std::min(d[id], std::isinf(inv_sq) ? 0.0 : 1.0 / std::sqrt(inv_sq));
        if (d[id] < kBand * h) fixed[id] = 1;
      }

  for (int pass = 0; pass < options.max_passes; ++pass) {
    double max_change = 0.0;
    for (int order = 0; order < 8; ++order) {
      const int si = (order & 1) ? -1 : 1;
      const int sj = (order & 2) ? -1 : 1;
      const int sk = (order & 4) ? -1 : 1;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = sk > 0 ? kk : nz - 1 - kk;
        for (int jj = 0; jj < ny; ++jj) {
          const int j = sj > 0 ? jj : ny - 1 - jj;
          const std::size_t row = at(0, j, k);
          for (int ii = 0; ii < nx; ++ii) {
            const std::size_t id = row + static_cast<std::size_t>(si > 0 ? ii : nx - 1 - ii);
            if (fixed[id]) continue;
            const double* q = d.data() + id;
            const double a = std::min(q[-1], q[1]);
            const double b = std::min(q[-sy], q[sy]);
            const double c = std::min(q[-sz], q[sz]);
            if (std::isinf(a) && std::isinf(b) && std::isinf(c)) continue;
            const double x = solve_eikonal(a, b, c, h);
            if (x < d[id]) {
              const double change = std::isinf(d[id]) ? kInf : d[id] - x;
              max_change = std::max(max_change, change);
              d[id] = x;
            }
          }
        }
      }
    }
    if (max_change <= 1e-12 * h) break;
  }

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = at(i, j, k);
        const double dist = std::isinf(d[id]) ? kSdfFar : d[id];
        out.distance.set(box.lo + Coord{i, j, k}, inside[id] ? -dist : dist);
      }
  return out;
}

double query_depth(const Sdf& sdf, const Coord& cell) {
  const double d = sdf.distance.get(cell);
  return d < 0.0 ? -d : 0.0;
}

}  // namespace flameforge
