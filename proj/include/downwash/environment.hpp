#pragma once

#include <optional>
#include <stdexcept>

namespace downwash {

namespace constants {

/// Molar mass of dry air [kg/mol].
inline constexpr double molar_mass_air = 28.966e-3;
/// Universal gas constant [J/(K·mol)].
inline constexpr double gas_constant = 8.3144;
/// Standard gravitational acceleration [m/s²].
inline constexpr double standard_gravity = 9.80665;

}  // namespace constants

/**
 * Ambient air state. Density follows from the ideal gas law; viscosity is
 * optional and only feeds the Reynolds-number diagnostic. Gravity is
 * overridable mainly so tests can pin it.
 */
struct Environment {
  double pressure_pa = 101325.0;
  double temperature_k = 293.15;
  double gravity = constants::standard_gravity;
  std::optional<double> viscosity_pa_s{};
};

/// Dry-air density ρ = p·M/(R·T) [kg/m³].
inline double air_density(const Environment& env) {
  if (env.pressure_pa <= 0.0) {
    throw std::domain_error("air_density: pressure must be positive");
  }
  if (env.temperature_k <= 0.0) {
    throw std::domain_error("air_density: temperature must be positive");
  }
  return env.pressure_pa * constants::molar_mass_air /
         (constants::gas_constant * env.temperature_k);
}

/**
 * Reynolds number Re_d = ρ·U·d/μ. Diagnostic only: the jet model is weakly
 * Reynolds-dependent and carries no viscosity term.
 *
 * Throws if the environment has no viscosity set.
 */
inline double reynolds_number(const Environment& env, double speed_mps,
                              double length_m) {
  if (!env.viscosity_pa_s.has_value()) {
    throw std::invalid_argument("reynolds_number: environment has no viscosity");
  }
  if (*env.viscosity_pa_s <= 0.0) {
    throw std::domain_error("reynolds_number: viscosity must be positive");
  }
  if (speed_mps < 0.0) {
    throw std::domain_error("reynolds_number: speed must be non-negative");
  }
  if (length_m <= 0.0) {
    throw std::domain_error("reynolds_number: length must be positive");
  }
  return air_density(env) * speed_mps * length_m / *env.viscosity_pa_s;
}

}  // namespace downwash
