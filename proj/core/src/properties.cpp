#include "flameforge/properties.hpp"

#include <algorithm>
#include <cmath>

#include "flameforge/error.hpp"

namespace flameforge {

void MaterialProperties::validate() const {
  const std::string who = "material '" + name + "': ";
  if (!(c_min >= 0.0 && c_min <= 1.0)) throw ConfigError(who + "c_min must lie in [0,1]");
  if (!(c_r >= 0.0)) throw ConfigError(who + "c_r must be >= 0");
  if (!(beta >= 0.0) || !(gamma_m >= 0.0)) throw ConfigError(who + "beta and gamma_m must be >= 0");
  if (!(eps_c >= 0.0)) throw ConfigError(who + "eps_c must be >= 0");
  if (!(eps_v >= eps_c)) throw ConfigError(who + "eps_v must be >= eps_c");
  if (T_Mc < 0.0 || T_Mv < 0.0 || S_Mc < 0.0 || S_Mv < 0.0)
    throw ConfigError(who + "heat and smoke yields must be >= 0");
  if (combustible && !(T_m0 < T_m1)) throw ConfigError(who + "T_m0 must be below T_m1");
}

std::optional<MaterialProperties> material_preset(const std::string& preset) {
  MaterialProperties p;
  p.name = preset;
  if (preset == "wood") return p;
  if (preset == "pmma") {
    p.charring = false;
    p.T_m0 = 280.0 + kCelsiusOffset;
    p.T_m1 = 500.0 + kCelsiusOffset;
    return p;
  }
  if (preset == "stone") {
    p.charring = false;
    p.combustible = false;
    p.beta = 1.0e-6;
    return p;
  }
  return std::nullopt;
}

double EnvironmentConfig::ambient_at(double t) const {
  if (!oven) return T_amb;
  if (!(oven->warmup > 0.0) || t >= oven->warmup) return oven->target;
  return T_amb + (oven->target - T_amb) * std::max(t, 0.0) / oven->warmup;
}

std::optional<Vec3> EnvironmentConfig::wind_at(double t) const {
  if (wind.empty()) return std::nullopt;
  if (t <= wind.front().t) return wind.front().velocity;
  for (std::size_t n = 1; n < wind.size(); ++n) {
    if (t <= wind[n].t) {
      const double span = wind[n].t - wind[n - 1].t;
      const double w = span > 0.0 ? (t - wind[n - 1].t) / span : 1.0;
      return wind[n - 1].velocity + (wind[n].velocity - wind[n - 1].velocity) * w;
    }
  }
  return wind.back().velocity;
}

void EnvironmentConfig::validate() const {
  const double positive[] = {T_amb, rho_amb, nu, k, gamma_a, g, phi_m, phi_a};
  for (double v : positive)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("environment constants must be positive");
  if (!(wind_relaxation >= 0.0)) throw ConfigError("environment.wind_relaxation must be >= 0");
  for (std::size_t n = 1; n < wind.size(); ++n)
    if (wind[n].t < wind[n - 1].t) throw ConfigError("wind schedule times must be non-decreasing");
  if (oven && (!(oven->target > 0.0) || oven->warmup < 0.0))
    throw ConfigError("oven target must be positive and warmup >= 0");
}

}  // namespace flameforge
