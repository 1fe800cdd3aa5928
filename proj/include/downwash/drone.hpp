#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "downwash/environment.hpp"

namespace downwash {

/// Tilt of the propeller rotation axes relative to the body z-axis.
/// Canted layouts focus (inward) or widen (outward) the jet; the model
/// treats them qualitatively only.
enum class Cant { uncanted, inward, outward };

inline const char* to_string(Cant cant) {
  switch (cant) {
    case Cant::uncanted: return "uncanted";
    case Cant::inward: return "inward";
    case Cant::outward: return "outward";
  }
  return "uncanted";
}

inline Cant cant_from_string(std::string_view text) {
  if (text == "uncanted") return Cant::uncanted;
  if (text == "inward") return Cant::inward;
  if (text == "outward") return Cant::outward;
  throw std::invalid_argument("cant_from_string: unknown cant '" +
                              std::string(text) + "'");
}

/**
 * Physical identity of a vehicle. `motor_distance_m` is the diagonal
 * motor-to-motor distance l, the length scale that normalizes all flow
 * coordinates.
 */
struct DroneSpec {
  std::string name;
  double mass_kg = 0.0;
  double propeller_radius_m = 0.0;
  double motor_distance_m = 0.0;
  int n_propellers = 4;
  Cant cant = Cant::uncanted;
};

inline void validate(const DroneSpec& drone) {
  if (drone.mass_kg <= 0.0) {
    throw std::invalid_argument("DroneSpec: mass must be positive");
  }
  if (drone.propeller_radius_m <= 0.0) {
    throw std::invalid_argument("DroneSpec: propeller radius must be positive");
  }
  if (drone.motor_distance_m <= 0.0) {
    throw std::invalid_argument("DroneSpec: motor distance must be positive");
  }
  if (drone.n_propellers < 1) {
    throw std::invalid_argument("DroneSpec: needs at least one propeller");
  }
  if (drone.propeller_radius_m >= drone.motor_distance_m) {
    throw std::invalid_argument(
        "DroneSpec: propellers do not fit (propeller diameter must be smaller "
        "than twice the motor distance)");
  }
}

/// Single-propeller disk area π·r² [m²].
inline double rotor_disk_area(const DroneSpec& drone) {
  return std::numbers::pi * drone.propeller_radius_m * drone.propeller_radius_m;
}

/**
 * Momentum-theory induced velocity at hover,
 *
 *   U_H = sqrt(m·g / (2·ρ·π·r_prop²·N_P)),
 *
 * the average air speed through the rotor disks needed to carry the
 * vehicle's weight in still air.
 */
inline double induced_hover_velocity(const DroneSpec& drone, double density,
                                     double gravity = constants::standard_gravity) {
  validate(drone);
  if (density <= 0.0) {
    throw std::domain_error("induced_hover_velocity: density must be positive");
  }
  if (gravity <= 0.0) {
    throw std::domain_error("induced_hover_velocity: gravity must be positive");
  }
  const double disk_area_total = rotor_disk_area(drone) * drone.n_propellers;
  return std::sqrt(drone.mass_kg * gravity / (2.0 * density * disk_area_total));
}

/// The six stock vehicles, smallest research quad to the Matrice 300.
inline const std::vector<DroneSpec>& presets() {
  static const std::vector<DroneSpec> table = {
      {"kolibri", 0.230, 0.0737 / 2.0, 0.118, 4, Cant::uncanted},
      {"offboard1", 0.572, 0.1295 / 2.0, 0.266, 4, Cant::uncanted},
      {"offboard2", 1.207, 0.1295 / 2.0, 0.266, 4, Cant::uncanted},
      {"matrice300", 6.300, 0.5334 / 2.0, 0.894, 4, Cant::uncanted},
      {"mavic3e", 0.958, 0.2388 / 2.0, 0.385, 4, Cant::inward},
      {"elios3", 2.398, 0.1270 / 2.0, 0.275, 4, Cant::outward},
  };
  return table;
}

/// Case-insensitive preset lookup; nullptr when unknown.
inline const DroneSpec* find_preset(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const DroneSpec& drone : presets()) {
    if (drone.name == lower) return &drone;
  }
  return nullptr;
}

}  // namespace downwash
