#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flameforge/vec.hpp"

namespace flameforge {

inline constexpr double kCelsiusOffset = 273.15;

/// Combustion and thermal constants of one material. Temperatures in K.
struct MaterialProperties {
  std::string name = "wood";
  double beta = 0.82e-7;               // thermal diffusivity, m^2/s
  double gamma_m = 5.9e-14;            // radiative cooling, K^-3 s^-1
  double T_m0 = 150.0 + kCelsiusOffset;  // ignition threshold
  double T_m1 = 450.0 + kCelsiusOffset;  // temperature of maximum rate
  double eps_c = 0.5e-3;               // char loss rate, relative mass / s
  double eps_v = 0.1;                  // volatiles loss rate, relative mass / s
  double T_Mc = 3.0e7;                 // heat per relative char mass, K
  double T_Mv = 2.0e7;                 // heat per relative volatile mass, K
  double S_Mc = 1.0e3;                 // smoke per relative char mass
  double S_Mv = 1.0e3;                 // smoke per relative volatile mass
  double c_min = 0.1;
  double c_r = 75.0;                   // char insulation rate, 1/m
  bool charring = true;
  bool combustible = true;

  /// +inf for non-combustible materials, so no reaction can ever start.
  double ignition_threshold() const {
    return combustible ? T_m0 : std::numeric_limits<double>::infinity();
  }

  /// M_v + M_c of a fresh cell.
  double initial_total_mass() const { return charring ? 2.0 : 1.0; }

  void validate() const;

  friend bool operator==(const MaterialProperties&, const MaterialProperties&) = default;
};

/// Named starting points: "wood" (charring), "pmma" (non-charring), "stone"
/// (non-combustible). Returns nullopt for unknown names.
std::optional<MaterialProperties> material_preset(const std::string& preset);

struct WindKey {
  double t = 0.0;
  Vec3 velocity{};
  friend bool operator==(const WindKey&, const WindKey&) = default;
};

/// Linear far-field temperature ramp from T_amb to target over warmup seconds.
struct OvenRamp {
  double target = 800.0;
  double warmup = 20.0;
  friend bool operator==(const OvenRamp&, const OvenRamp&) = default;
};

struct EnvironmentConfig {
  double T_amb = 293.0;
  double rho_amb = 1.2041;
  double nu = 1.6e-5;
  double k = 1.8e-5;
  double gamma_a = 5.0e-11;
  double g = 9.81;
  double phi_m = 2.0e-2;
  double phi_a = 5.0e-2;
  /// Piecewise-linear wind schedule; empty means no wind forcing.
  std::vector<WindKey> wind;
  double wind_relaxation = 10.0;  // 1/s
  std::optional<OvenRamp> oven;

  /// Far-field temperature driving radiative exchange at time t.
  double ambient_at(double t) const;
  std::optional<Vec3> wind_at(double t) const;

  void validate() const;

  friend bool operator==(const EnvironmentConfig&, const EnvironmentConfig&) = default;
};

}  // namespace flameforge
