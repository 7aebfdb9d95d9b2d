#include "flameforge/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "flameforge/error.hpp"

namespace flameforge {

namespace {

// A dense scalar lattice. Cell-centered lattices have axis = -1; a face
// lattice of a MAC component has its nodes shifted by -1/2 along `axis`.
struct Lattice {
  std::array<int, 3> res{};
  int axis = -1;
  std::vector<double> data;

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(res[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(res[1]) * static_cast<std::size_t>(k));
  }
  std::size_t size() const { return data.size(); }

  Vec3 node_position(int i, int j, int k) const {
    Vec3 x{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
    if (axis >= 0) x[axis] -= 0.5;
    return x;
  }
};

struct Sample {
  double value;
  double lo;
  double hi;
};

struct Weights {
  int lo;
  int hi;
  double w;
};

Weights weights_for(double x, int n) {
  if (!(x > 0.0)) return {0, 0, 0.0};
  const double top = static_cast<double>(n - 1);
  if (x >= top) return {n - 1, n - 1, 0.0};
  const int lo = static_cast<int>(x);
  // On a node the neighbour has zero weight and stays out of the donor range.
  const double w = x - lo;
  return {lo, w > 0.0 ? lo + 1 : lo, w};
}

inline double lerp(double a, double b, double w) { return a + w * (b - a); }

// Trilinear sample at cell index-space position `x` plus the donor range.
Sample sample_lattice(const Lattice& l, Vec3 x) {
  if (l.axis >= 0) x[l.axis] += 0.5;
  const Weights wx = weights_for(x.x, l.res[0]);
  const Weights wy = weights_for(x.y, l.res[1]);
  const Weights wz = weights_for(x.z, l.res[2]);
  const double v000 = l.data[l.index(wx.lo, wy.lo, wz.lo)];
  const double v100 = l.data[l.index(wx.hi, wy.lo, wz.lo)];
  const double v010 = l.data[l.index(wx.lo, wy.hi, wz.lo)];
  const double v110 = l.data[l.index(wx.hi, wy.hi, wz.lo)];
  const double v001 = l.data[l.index(wx.lo, wy.lo, wz.hi)];
  const double v101 = l.data[l.index(wx.hi, wy.lo, wz.hi)];
  const double v011 = l.data[l.index(wx.lo, wy.hi, wz.hi)];
  const double v111 = l.data[l.index(wx.hi, wy.hi, wz.hi)];
  const double value = lerp(lerp(lerp(v000, v100, wx.w), lerp(v010, v110, wx.w), wy.w),
                            lerp(lerp(v001, v101, wx.w), lerp(v011, v111, wx.w), wy.w), wz.w);
  const double lo = std::min({v000, v100, v010, v110, v001, v101, v011, v111});
  const double hi = std::max({v000, v100, v010, v110, v001, v101, v011, v111});
  return {value, lo, hi};
}

Lattice lattice_from_grid(const ScalarGrid& g) {
  Lattice l;
  l.res = g.desc().resolution;
  l.data.resize(g.desc().cell_count());
  for (int k = 0; k < l.res[2]; ++k)
    for (int j = 0; j < l.res[1]; ++j)
      for (int i = 0; i < l.res[0]; ++i) l.data[l.index(i, j, k)] = g.get({i, j, k});
  return l;
}

Lattice lattice_from_component(const MacVelocityField& u, int axis) {
  Lattice l;
  l.res = u.face_resolution(axis);
  l.axis = axis;
  l.data = u.component(axis);
  return l;
}

ScalarGrid grid_from_lattice(const Lattice& l, const GridDesc& desc) {
  ScalarGrid g(desc, desc.background);
  for (int k = 0; k < l.res[2]; ++k)
    for (int j = 0; j < l.res[1]; ++j)
      for (int i = 0; i < l.res[0]; ++i) g.set({i, j, k}, l.data[l.index(i, j, k)]);
  return g;
}

template <class Body>
void for_each_node(const Lattice& l, Body&& body) {
  parallel_for(0, l.res[2], [&](std::int64_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < l.res[1]; ++j)
      for (int i = 0; i < l.res[0]; ++i) body(i, j, k);
  });
}

// Departure points of the RK2 backtrace over +dt and -dt from every node,
// in cell index space; the first-stage velocity is shared.
void trace_nodes(const Lattice& l, const MacVelocityField& u, double dt, std::vector<Vec3>* forward,
                 std::vector<Vec3>* backward) {
  const double s = dt / u.desc().voxel_size;
  forward->resize(l.size());
  if (backward) backward->resize(l.size());
  for_each_node(l, [&](int i, int j, int k) {
    const std::size_t n = l.index(i, j, k);
    const Vec3 x = l.node_position(i, j, k);
    const Vec3 v1 = u.sample_index(x);
    (*forward)[n] = x - u.sample_index(x - v1 * (0.5 * s)) * s;
    if (backward) (*backward)[n] = x + u.sample_index(x + v1 * (0.5 * s)) * s;
  });
}

Lattice resample(const Lattice& src, const std::vector<Vec3>& points, std::vector<double>* lo,
                 std::vector<double>* hi) {
  Lattice out = src;
  if (lo) lo->resize(src.size());
  if (hi) hi->resize(src.size());
  parallel_for(0, static_cast<std::int64_t>(src.size()), [&](std::int64_t nn) {
    const auto n = static_cast<std::size_t>(nn);
    const Sample smp = sample_lattice(src, points[n]);
    out.data[n] = smp.value;
    if (lo) (*lo)[n] = smp.lo;
    if (hi) (*hi)[n] = smp.hi;
  });
  return out;
}

Lattice maccormack_lattice(const Lattice& src, const std::vector<Vec3>& forward_points,
                   const std::vector<Vec3>& backward_points) {
  std::vector<double> lo, hi;
  const Lattice forward = resample(src, forward_points, &lo, &hi);
  const Lattice back = resample(forward, backward_points, nullptr, nullptr);
  Lattice out = forward;
  for (std::size_t n = 0; n < src.size(); ++n) {
    const double corrected = forward.data[n] + 0.5 * (src.data[n] - back.data[n]);
    out.data[n] = (corrected < lo[n] || corrected > hi[n]) ? forward.data[n] : corrected;
  }
  return out;
}

Lattice layout_of(const MacVelocityField& u, int layout) {
  Lattice l;
  if (layout == 0) {
    l.res = u.desc().resolution;
  } else {
    l.axis = layout - 1;
    l.res = u.face_resolution(l.axis);
  }
  return l;
}

}  // namespace

ScalarGrid air_density(const ScalarGrid& T_a, const EnvironmentConfig& env) {
  GridDesc d = T_a.desc();
  d.background = env.rho_amb;
  ScalarGrid rho(d, env.rho_amb);
  const double c = env.rho_amb * env.T_amb;
  T_a.for_each_active([&](const Coord& x, double t) { rho.set(x, c / t); });
  return rho;
}

const Advector::Paths& Advector::paths(int layout, bool need_backward) const {
  auto& slot = cache_[static_cast<std::size_t>(layout)];
  if (!slot || (need_backward && slot->backward.empty())) {
    Lattice l = layout_of(*u_, layout);
    l.data.resize(l.res[0] * static_cast<std::size_t>(l.res[1]) * static_cast<std::size_t>(l.res[2]));
    Paths p;
    trace_nodes(l, *u_, dt_, &p.forward, need_backward ? &p.backward : nullptr);
    slot = std::move(p);
  }
  return *slot;
}

ScalarGrid Advector::maccormack(const ScalarGrid& field) const {
  const Paths& p = paths(0, true);
  return grid_from_lattice(maccormack_lattice(lattice_from_grid(field), p.forward, p.backward), field.desc());
}

MacVelocityField Advector::maccormack(const MacVelocityField& field) const {
  MacVelocityField out = field;
  for (int a = 0; a < 3; ++a) {
    const Paths& p = paths(1 + a, true);
    out.component(a) = maccormack_lattice(lattice_from_component(field, a), p.forward, p.backward).data;
  }
  return out;
}

ScalarGrid Advector::semi_lagrangian(const ScalarGrid& field) const {
  const Paths& p = paths(0, false);
  return grid_from_lattice(resample(lattice_from_grid(field), p.forward, nullptr, nullptr), field.desc());
}

ScalarGrid advect_maccormack(const ScalarGrid& field, const MacVelocityField& u, double dt) {
  return Advector(u, dt).maccormack(field);
}

ScalarGrid advect_semi_lagrangian(const ScalarGrid& field, const MacVelocityField& u, double dt) {
  return Advector(u, dt).semi_lagrangian(field);
}

MacVelocityField advect_maccormack(const MacVelocityField& field, const MacVelocityField& u, double dt) {
  return Advector(u, dt).maccormack(field);
}

void enforce_solid_faces(MacVelocityField& u, const CellMask& solid, const DomainBoundary& boundary) {
  const auto& res = u.desc().resolution;
  for (int a = 0; a < 3; ++a) {
    const auto fr = u.face_resolution(a);
    const int n = res[static_cast<std::size_t>(a)];
    for (int k = 0; k < fr[2]; ++k)
      for (int j = 0; j < fr[1]; ++j)
        for (int i = 0; i < fr[0]; ++i) {
          const Coord f{i, j, k};
          const Coord lo = f - axis_offset(a);
          bool zero = false;
          if (f[a] == 0) {
            zero = !boundary.is_open(a, 0) || solid.test(f);
          } else if (f[a] == n) {
            zero = !boundary.is_open(a, 1) || solid.test(lo);
          } else {
            zero = solid.test(f) || solid.test(lo);
          }
          if (zero) u.at(a, f) = 0.0;
        }
  }
}

MacVelocityField apply_body_forces(const MacVelocityField& u, const ScalarGrid& T_a, const EnvironmentConfig& env,
                                   double dt, const BodyForceOptions& options) {
  MacVelocityField out = u;
  const auto& res = u.desc().resolution;
  const int nz = res[2];
  const auto fz = u.face_resolution(2);
  for (int k = 0; k < fz[2]; ++k)
    for (int j = 0; j < fz[1]; ++j)
      for (int i = 0; i < fz[0]; ++i) {
        const double below = T_a.get({i, j, std::max(k - 1, 0)});
        const double above = T_a.get({i, j, std::min(k, nz - 1)});
        const double t_face = 0.5 * (below + above);
        out.at(2, {i, j, k}) += dt * (t_face / env.T_amb - 1.0) * env.g;
      }

  const auto wind = env.wind_at(options.t);
  if (!wind || !(env.wind_relaxation > 0.0)) return out;
  const double alpha = 1.0 - std::exp(-env.wind_relaxation * dt);
  const DomainBoundary& bc = options.boundary;
  for (int a = 0; a < 3; ++a) {
    const auto fr = u.face_resolution(a);
    for (int k = 0; k < fr[2]; ++k)
      for (int j = 0; j < fr[1]; ++j)
        for (int i = 0; i < fr[0]; ++i) {
          const Coord f{i, j, k};
          bool on_boundary = false;
          for (int b = 0; b < 3 && !on_boundary; ++b) {
            const int last = b == a ? fr[static_cast<std::size_t>(b)] - 1 : res[static_cast<std::size_t>(b)] - 1;
            on_boundary = (f[b] == 0 && bc.is_open(b, 0)) || (f[b] == last && bc.is_open(b, 1));
          }
          if (!on_boundary) continue;
          double& v = out.at(a, f);
          v += alpha * ((*wind)[a] - v);
        }
  }
  return out;
}

MacVelocityField diffuse_velocity(const MacVelocityField& u, double nu, double dt) {
  MacVelocityField out = u;
  const double h = u.desc().voxel_size;
  const double s = nu * dt / (h * h);
  if (s == 0.0) return out;
  for (int a = 0; a < 3; ++a) {
    const Lattice l = lattice_from_component(u, a);
    auto& dst = out.component(a);
    for_each_node(l, [&](int i, int j, int k) {
      const double c = l.data[l.index(i, j, k)];
      const double sum = l.data[l.index(std::max(i - 1, 0), j, k)] + l.data[l.index(std::min(i + 1, l.res[0] - 1), j, k)] +
                         l.data[l.index(i, std::max(j - 1, 0), k)] + l.data[l.index(i, std::min(j + 1, l.res[1] - 1), k)] +
                         l.data[l.index(i, j, std::max(k - 1, 0))] + l.data[l.index(i, j, std::min(k + 1, l.res[2] - 1))];
      dst[l.index(i, j, k)] = c + s * (sum - 6.0 * c);
    });
  }
  return out;
}

ScalarGrid compute_divergence_target(const ScalarGrid& T_prev, const ScalarGrid& T_new, double dt, double div_max) {
  if (!(dt > 0.0)) throw std::domain_error("divergence target needs dt > 0");
  GridDesc d = T_new.desc();
  d.background = 0.0;
  ScalarGrid out(d, 0.0);
  const auto& r = d.resolution;
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) {
        const double a = T_prev.get({i, j, k});
        const double b = T_new.get({i, j, k});
        if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("divergence target needs positive temperatures");
        out.set({i, j, k}, std::clamp((std::log(b) - std::log(a)) / dt, -div_max, div_max));
      }
  return out;
}

ScalarGrid velocity_divergence(const MacVelocityField& u) {
  GridDesc d = u.desc();
  d.background = 0.0;
  ScalarGrid out(d, 0.0);
  const double h = d.voxel_size;
  const auto& r = d.resolution;
  for (int k = 0; k < r[2]; ++k)
    for (int j = 0; j < r[1]; ++j)
      for (int i = 0; i < r[0]; ++i) {
        const Coord c{i, j, k};
        double div = 0.0;
        for (int a = 0; a < 3; ++a) div += u.at(a, c + axis_offset(a)) - u.at(a, c);
        out.set(c, div / h);
      }
  return out;
}

namespace {

struct PoissonSystem {
  std::array<int, 3> res{};
  std::vector<std::uint8_t> fluid;
  std::vector<double> diag;
  // Coupling weight to the +x, +y, +z neighbour (the off-diagonal entry is -w).
  std::array<std::vector<double>, 3> plus;
  std::vector<double> b;

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(res[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(res[1]) * static_cast<std::size_t>(k));
  }
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(res[0])
                                      : static_cast<std::size_t>(res[0]) * static_cast<std::size_t>(res[1]));
  }
};

void apply_matrix(const PoissonSystem& s, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t sx = s.stride(0), sy = s.stride(1), sz = s.stride(2);
  parallel_for(0, s.res[2], [&](std::int64_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) {
        const std::size_t n = s.index(i, j, k);
        if (!s.fluid[n]) {
          y[n] = 0.0;
          continue;
        }
        double v = s.diag[n] * x[n];
        if (i + 1 < s.res[0]) v -= s.plus[0][n] * x[n + sx];
        if (i > 0) v -= s.plus[0][n - sx] * x[n - sx];
        if (j + 1 < s.res[1]) v -= s.plus[1][n] * x[n + sy];
        if (j > 0) v -= s.plus[1][n - sy] * x[n - sy];
        if (k + 1 < s.res[2]) v -= s.plus[2][n] * x[n + sz];
        if (k > 0) v -= s.plus[2][n - sz] * x[n - sz];
        y[n] = v;
      }
  });
}

std::vector<double> build_mic0(const PoissonSystem& s) {
  constexpr double kTau = 0.97;
  constexpr double kSigma = 0.25;
  std::vector<double> precon(s.diag.size(), 0.0);
  const std::size_t sx = s.stride(0), sy = s.stride(1), sz = s.stride(2);
  for (int k = 0; k < s.res[2]; ++k)
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) {
        const std::size_t n = s.index(i, j, k);
        if (!s.fluid[n]) continue;
        double e = s.diag[n];
        if (i > 0) {
          const std::size_t m = n - sx;
          const double a = s.plus[0][m] * precon[m];
          e -= a * a + kTau * s.plus[0][m] * (s.plus[1][m] + s.plus[2][m]) * precon[m] * precon[m];
        }
        if (j > 0) {
          const std::size_t m = n - sy;
          const double a = s.plus[1][m] * precon[m];
          e -= a * a + kTau * s.plus[1][m] * (s.plus[0][m] + s.plus[2][m]) * precon[m] * precon[m];
        }
        if (k > 0) {
          const std::size_t m = n - sz;
          const double a = s.plus[2][m] * precon[m];
          e -= a * a + kTau * s.plus[2][m] * (s.plus[0][m] + s.plus[1][m]) * precon[m] * precon[m];
        }
        if (e < kSigma * s.diag[n]) e = s.diag[n];
        precon[n] = 1.0 / std::sqrt(e);
      }
  return precon;
}

void apply_mic0(const PoissonSystem& s, const std::vector<double>& precon, const std::vector<double>& r,
                std::vector<double>& q, std::vector<double>& z) {
  const std::size_t sx = s.stride(0), sy = s.stride(1), sz = s.stride(2);
  for (int k = 0; k < s.res[2]; ++k)
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) {
        const std::size_t n = s.index(i, j, k);
        if (!s.fluid[n]) {
          q[n] = 0.0;
          continue;
        }
        double t = r[n];
        if (i > 0) t += s.plus[0][n - sx] * precon[n - sx] * q[n - sx];
        if (j > 0) t += s.plus[1][n - sy] * precon[n - sy] * q[n - sy];
        if (k > 0) t += s.plus[2][n - sz] * precon[n - sz] * q[n - sz];
        q[n] = t * precon[n];
      }
  for (int k = s.res[2] - 1; k >= 0; --k)
    for (int j = s.res[1] - 1; j >= 0; --j)
      for (int i = s.res[0] - 1; i >= 0; --i) {
        const std::size_t n = s.index(i, j, k);
        if (!s.fluid[n]) {
          z[n] = 0.0;
          continue;
        }
        double t = q[n];
        if (i + 1 < s.res[0]) t += s.plus[0][n] * precon[n] * z[n + sx];
        if (j + 1 < s.res[1]) t += s.plus[1][n] * precon[n] * z[n + sy];
        if (k + 1 < s.res[2]) t += s.plus[2][n] * precon[n] * z[n + sz];
        z[n] = t * precon[n];
      }
}

double dot_product(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Regions of fluid cells with no open boundary are singular. Compatible ones
// are pinned at one cell, which leaves the solution of the original system
// intact up to a constant.
std::size_t handle_sealed_regions(PoissonSystem& s, const std::vector<std::uint8_t>& dirichlet, bool remove_mean) {
  const std::size_t n_cells = s.fluid.size();
  std::vector<int> label(n_cells, -1);
  std::vector<std::size_t> stack, members;
  std::size_t adjusted = 0;
  int next = 0;
  for (std::size_t seed = 0; seed < n_cells; ++seed) {
    if (!s.fluid[seed] || label[seed] >= 0) continue;
    members.clear();
    bool open = false;
    stack.push_back(seed);
    label[seed] = next;
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      members.push_back(n);
      open = open || dirichlet[n];
      const int i = static_cast<int>(n % static_cast<std::size_t>(s.res[0]));
      const int j = static_cast<int>((n / static_cast<std::size_t>(s.res[0])) % static_cast<std::size_t>(s.res[1]));
      const int k = static_cast<int>(n / (static_cast<std::size_t>(s.res[0]) * static_cast<std::size_t>(s.res[1])));
      const int c[3] = {i, j, k};
      for (int a = 0; a < 3; ++a) {
        const std::size_t st = s.stride(a);
        if (c[a] + 1 < s.res[static_cast<std::size_t>(a)] && s.plus[static_cast<std::size_t>(a)][n] > 0.0 &&
            label[n + st] < 0) {
          label[n + st] = next;
          stack.push_back(n + st);
        }
        if (c[a] > 0 && s.plus[static_cast<std::size_t>(a)][n - st] > 0.0 && label[n - st] < 0) {
          label[n - st] = next;
          stack.push_back(n - st);
        }
      }
    }
    ++next;
    if (open) continue;
    double sum = 0.0, total = 0.0;
    for (std::size_t m : members) {
      sum += s.b[m];
      total += std::abs(s.b[m]);
    }
    if (std::abs(sum) > 1.0e-9 * total) {
      if (!remove_mean) {
        std::ostringstream msg;
        msg << "pressure projection: sealed fluid region of " << members.size()
            << " cells has incompatible divergence target (net " << sum << " 1/s)";
        throw SolverError(msg.str(), std::abs(sum), 0);
      }
      const double mean = sum / static_cast<double>(members.size());
      for (std::size_t m : members) s.b[m] -= mean;
      adjusted += members.size();
    }
    const std::size_t ref = members.front();
    s.diag[ref] = s.diag[ref] > 0.0 ? 2.0 * s.diag[ref] : 1.0;
  }
  return adjusted;
}

}  // namespace

ProjectionResult pressure_project(const MacVelocityField& u_in, const ScalarGrid& target, const CellMask& solid,
                                  double dt, const ProjectionOptions& options) {
  if (!(dt > 0.0)) throw ConfigError("pressure projection needs dt > 0");
  const GridDesc& desc = u_in.desc();
  const double h = desc.voxel_size;
  const DomainBoundary& bc = options.boundary;

  ProjectionResult result;
  result.u = u_in;
  MacVelocityField& u = result.u;
  enforce_solid_faces(u, solid, bc);

  PoissonSystem s;
  s.res = desc.resolution;
  const std::size_t n_cells = desc.cell_count();
  s.fluid.assign(n_cells, 0);
  s.diag.assign(n_cells, 0.0);
  for (auto& p : s.plus) p.assign(n_cells, 0.0);
  s.b.assign(n_cells, 0.0);
  std::vector<std::uint8_t> dirichlet(n_cells, 0);

  const auto rho_at = [&](const Coord& c) { return options.density ? options.density->get(c) : 1.0; };
  const double base = dt / (h * h);

  for (int k = 0; k < s.res[2]; ++k)
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) {
        const Coord c{i, j, k};
        if (!solid.test(c)) s.fluid[s.index(i, j, k)] = 1;
      }

  for (int k = 0; k < s.res[2]; ++k)
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) {
        const Coord c{i, j, k};
        const std::size_t n = s.index(i, j, k);
        if (!s.fluid[n]) continue;
        const double rho_c = rho_at(c);
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
          div += u.at(a, c + axis_offset(a)) - u.at(a, c);
          const int na = s.res[static_cast<std::size_t>(a)];
          if (c[a] + 1 < na) {
            const Coord nb = c + axis_offset(a);
            if (!solid.test(nb)) {
              const double w = base / (0.5 * (rho_c + rho_at(nb)));
              s.plus[static_cast<std::size_t>(a)][n] = w;
              s.diag[n] += w;
              s.diag[s.index(nb.i, nb.j, nb.k)] += w;
            }
          } else if (bc.is_open(a, 1)) {
            s.diag[n] += base / rho_c;
            dirichlet[n] = 1;
          }
          if (c[a] == 0 && bc.is_open(a, 0)) {
            s.diag[n] += base / rho_c;
            dirichlet[n] = 1;
          }
        }
        s.b[n] = target.get(c) - div / h;
      }

  result.adjusted_cells = handle_sealed_regions(s, dirichlet, options.remove_incompatible);

  std::vector<double> x(n_cells, 0.0);
  if (options.initial_pressure)
    for (int k = 0; k < s.res[2]; ++k)
      for (int j = 0; j < s.res[1]; ++j)
        for (int i = 0; i < s.res[0]; ++i) {
          const std::size_t n = s.index(i, j, k);
          if (s.fluid[n]) x[n] = options.initial_pressure->get({i, j, k});
        }

  std::vector<double> r(n_cells), z(n_cells), q(n_cells), d(n_cells), ad(n_cells);
  apply_matrix(s, x, ad);
  for (std::size_t n = 0; n < n_cells; ++n) r[n] = s.fluid[n] ? s.b[n] - ad[n] : 0.0;

  const double b_norm = std::sqrt(dot_product(s.b, s.b));
  const auto converged = [&](double r_inf, double r_two) {
    return r_inf <= options.absolute_tolerance && r_two <= options.relative_tolerance * b_norm;
  };
  const auto relative_ok = [&](double r_two) { return r_two <= options.relative_tolerance * b_norm; };

  double r_inf = max_abs(r);
  double r_two = std::sqrt(dot_product(r, r));
  int iter = 0;
  if (!converged(r_inf, r_two)) {
    const std::vector<double> precon = build_mic0(s);
    apply_mic0(s, precon, r, q, z);
    d = z;
    double rz = dot_product(r, z);
    while (iter < options.max_iterations) {
      ++iter;
      apply_matrix(s, d, ad);
      const double dad = dot_product(d, ad);
      if (!(dad > 0.0)) break;
      const double alpha = rz / dad;
      for (std::size_t n = 0; n < n_cells; ++n) {
        x[n] += alpha * d[n];
        r[n] -= alpha * ad[n];
      }
      r_inf = max_abs(r);
      r_two = std::sqrt(dot_product(r, r));
      if (converged(r_inf, r_two)) break;
      apply_mic0(s, precon, r, q, z);
      const double rz_new = dot_product(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t n = 0; n < n_cells; ++n) d[n] = z[n] + beta * d[n];
    }
    if (!converged(r_inf, r_two) && !relative_ok(r_two)) {
      std::ostringstream msg;
      msg << "pressure projection did not converge after " << iter << " iterations (max residual " << r_inf
          << " 1/s)";
      throw SolverError(msg.str(), r_inf, iter);
    }
  }
  result.iterations = iter;
  result.residual = r_inf;

  GridDesc pd = desc;
  pd.background = 0.0;
  result.p = ScalarGrid(pd, 0.0);
  for (int k = 0; k < s.res[2]; ++k)
    for (int j = 0; j < s.res[1]; ++j)
      for (int i = 0; i < s.res[0]; ++i) result.p.set({i, j, k}, x[s.index(i, j, k)]);

  const double scale = dt / h;
  for (int a = 0; a < 3; ++a) {
    const auto fr = u.face_resolution(a);
    const int na = s.res[static_cast<std::size_t>(a)];
    for (int k = 0; k < fr[2]; ++k)
      for (int j = 0; j < fr[1]; ++j)
        for (int i = 0; i < fr[0]; ++i) {
          const Coord f{i, j, k};
          const Coord lo = f - axis_offset(a);
          const bool lo_in = f[a] > 0;
          const bool hi_in = f[a] < na;
          const bool lo_fluid = lo_in && !solid.test(lo);
          const bool hi_fluid = hi_in && !solid.test(f);
          double p_lo = 0.0, p_hi = 0.0, rho = 0.0;
          if (lo_fluid && hi_fluid) {
            p_lo = x[s.index(lo.i, lo.j, lo.k)];
            p_hi = x[s.index(f.i, f.j, f.k)];
            rho = 0.5 * (rho_at(lo) + rho_at(f));
          } else if (!lo_in && hi_fluid && bc.is_open(a, 0)) {
            p_hi = x[s.index(f.i, f.j, f.k)];
            rho = rho_at(f);
          } else if (!hi_in && lo_fluid && bc.is_open(a, 1)) {
            p_lo = x[s.index(lo.i, lo.j, lo.k)];
            rho = rho_at(lo);
          } else {
            continue;
          }
          u.at(a, f) -= scale * (p_hi - p_lo) / rho;
        }
  }
  return result;
}

void check_diffusion_stability(double dt, double dx, double coefficient, const char* what) {
  if (!(coefficient > 0.0)) return;
  const double limit = dx * dx / (6.0 * coefficient);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "explicit " << what << " diffusion is unstable: dt " << dt << " s exceeds dx^2/(6*" << coefficient
        << ") = " << limit << " s";
    throw ConfigError(msg.str());
  }
}

}  // namespace flameforge
