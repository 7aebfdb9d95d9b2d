#pragma once

#include <array>
#include <optional>
#include <vector>

#include "flameforge/grid.hpp"
#include "flameforge/properties.hpp"

namespace flameforge {

enum class FaceBoundary { open, closed };

/// Domain faces ordered -x, +x, -y, +y, -z, +z. Open faces hold p = 0 and
/// let air through; closed faces behave like solid walls.
struct DomainBoundary {
  std::array<FaceBoundary, 6> faces{FaceBoundary::open, FaceBoundary::open, FaceBoundary::open,
                                    FaceBoundary::open, FaceBoundary::closed, FaceBoundary::open};

  /// side 0 is the low face of `axis`, side 1 the high face.
  bool is_open(int axis, int side) const {
    return faces[static_cast<std::size_t>(2 * axis + side)] == FaceBoundary::open;
  }
  static DomainBoundary all_open() {
    DomainBoundary b;
    b.faces.fill(FaceBoundary::open);
    return b;
  }
  static DomainBoundary all_closed() {
    DomainBoundary b;
    b.faces.fill(FaceBoundary::closed);
    return b;
  }

  friend bool operator==(const DomainBoundary&, const DomainBoundary&) = default;
};

/// Coarse-grid air fields. All scalar grids are fully active.
struct AirState {
  MacVelocityField u;
  ScalarGrid T_a;
  ScalarGrid p;
  ScalarGrid S;
  /// Coarse cells overlapped by remaining material.
  CellMask solid;

  const GridDesc& desc() const { return T_a.desc(); }
};

/// rho = rho_amb * T_amb / T_a at every cell.
ScalarGrid air_density(const ScalarGrid& T_a, const EnvironmentConfig& env);

/// MacCormack advection with RK2 backtraces and a donor-cell limiter: where
/// the corrected value leaves the range of the 8 donor samples, the plain
/// semi-Lagrangian value is used.
ScalarGrid advect_maccormack(const ScalarGrid& field, const MacVelocityField& u, double dt);
MacVelocityField advect_maccormack(const MacVelocityField& field, const MacVelocityField& u, double dt);

/// Plain semi-Lagrangian advection (RK2 backtrace).
ScalarGrid advect_semi_lagrangian(const ScalarGrid& field, const MacVelocityField& u, double dt);

/// Advects several fields with one velocity and step. Departure points are
/// traced once per node layout and reused; results match the free functions.
/// Keeps a reference to `u`.
class Advector {
 public:
  Advector(const MacVelocityField& u, double dt) : u_(&u), dt_(dt) {}

  ScalarGrid maccormack(const ScalarGrid& field) const;
  MacVelocityField maccormack(const MacVelocityField& field) const;
  ScalarGrid semi_lagrangian(const ScalarGrid& field) const;

 private:
  struct Paths {
    std::vector<Vec3> forward;
    std::vector<Vec3> backward;
  };
  /// Layout 0 is cell centers, 1 + a the faces normal to axis a.
  const Paths& paths(int layout, bool need_backward) const;

  const MacVelocityField* u_;
  double dt_;
  mutable std::array<std::optional<Paths>, 4> cache_;
};

/// Sets the normal component to zero on every face touching a solid cell
/// and on closed domain faces.
void enforce_solid_faces(MacVelocityField& u, const CellMask& solid, const DomainBoundary& boundary);

struct BodyForceOptions {
  DomainBoundary boundary{};
  /// Simulated time, used to evaluate the wind schedule.
  double t = 0.0;
};

/// Buoyancy (T_a / T_amb - 1) * g added upward on z faces, plus relaxation of
/// velocity on open boundary faces toward the scheduled wind.
MacVelocityField apply_body_forces(const MacVelocityField& u, const ScalarGrid& T_a, const EnvironmentConfig& env,
                                   double dt, const BodyForceOptions& options = {});

/// Explicit 7-point Laplacian step per component; lattice edges use
/// zero-gradient neighbours.
MacVelocityField diffuse_velocity(const MacVelocityField& u, double nu, double dt);

/// (ln T_new - ln T_prev) / dt clamped to [-div_max, div_max].
/// Throws std::domain_error on a nonpositive temperature.
ScalarGrid compute_divergence_target(const ScalarGrid& T_prev, const ScalarGrid& T_new, double dt,
                                     double div_max = 5.0);

/// Discrete divergence of u at each cell center (1/s).
ScalarGrid velocity_divergence(const MacVelocityField& u);

struct ProjectionOptions {
  DomainBoundary boundary{};
  /// Optional per-cell density; unit density when null.
  const ScalarGrid* density = nullptr;
  /// Optional initial guess.
  const ScalarGrid* initial_pressure = nullptr;
  double relative_tolerance = 1.0e-5;
  /// Bound on max |div u - target| in 1/s.
  double absolute_tolerance = 1.0e-5;
  int max_iterations = 500;
  /// When false, a fluid region without open boundary whose targets do not
  /// sum to zero is rejected; when true its mean target is removed instead.
  bool remove_incompatible = false;
};

struct ProjectionResult {
  MacVelocityField u;
  ScalarGrid p;
  int iterations = 0;
  double residual = 0.0;
  /// Fluid cells whose target was shifted to restore compatibility.
  std::size_t adjusted_cells = 0;
};

/// Makes div u match `target` on non-solid cells by solving
/// sum_f dt / (rho_f dx^2) (p_i - p_n) = target - div u* with MIC(0)-preconditioned CG.
/// Throws SolverError on non-convergence or an incompatible sealed region.
ProjectionResult pressure_project(const MacVelocityField& u, const ScalarGrid& target, const CellMask& solid,
                                  double dt, const ProjectionOptions& options = {});

/// Explicit-diffusion limits; throws ConfigError with the violated bound.
void check_diffusion_stability(double dt, double dx, double coefficient, const char* what);

}  // namespace flameforge
