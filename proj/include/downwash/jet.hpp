#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace downwash {

/// Distance below the rotor plane, in units of motor distance l, past which
/// the individual propeller jets have merged into a single turbulent jet.
inline constexpr double far_field_min_s_norm = 2.5;

/**
 * Dimensionless parameters of the normalized turbulent jet.
 *
 * In normalized coordinates (lengths in units of l, velocities in units of
 * the induced hover velocity U_H, jet-exit velocity set to 1) the merged
 * downwash is described by
 *
 *   centerline   Ũ_C(s̃)  = bd / (s̃ − s̃₀)
 *   half-width   r̃½(s̃)   = S · (s̃ − s̃₀)
 *
 * The defaults are the unified fit shared by uncanted quadrotors of any
 * mass and size; the fitting pipeline can produce replacements.
 */
struct JetParameters {
  double bd = 10.11;
  double spreading_rate = 0.07668;
  double s0_norm = -5.817;
};

inline void validate(const JetParameters& params) {
  if (!(params.bd > 0.0)) {
    throw std::invalid_argument("JetParameters: bd must be positive");
  }
  if (!(params.spreading_rate > 0.0)) {
    throw std::invalid_argument("JetParameters: spreading rate must be positive");
  }
  if (!(params.s0_norm < far_field_min_s_norm)) {
    throw std::invalid_argument(
        "JetParameters: virtual origin must lie upstream of the far field");
  }
}

/// Ũ_C(s̃) = bd/(s̃ − s̃₀). Valid only downstream of the virtual origin.
inline double centerline_velocity_norm(double s_norm, const JetParameters& params) {
  if (s_norm <= params.s0_norm) {
    throw std::domain_error(
        "centerline_velocity_norm: point upstream of the virtual origin");
  }
  return params.bd / (s_norm - params.s0_norm);
}

/// r̃½(s̃) = S·(s̃ − s̃₀), the linear spreading of the jet half-width.
inline double half_width_norm(double s_norm, const JetParameters& params) {
  if (s_norm <= params.s0_norm) {
    throw std::domain_error("half_width_norm: point upstream of the virtual origin");
  }
  return params.spreading_rate * (s_norm - params.s0_norm);
}

/**
 * Self-similar radial profile of the mean longitudinal velocity,
 *
 *   ⟨U⟩(ξ) = U_C / (1 + (√2 − 1)·ξ²)²,
 *
 * with ξ = r/r½. At ξ = 1 the denominator is exactly 2, which is what makes
 * r½ the half-width.
 */
inline double similarity_profile(double xi, double centerline_velocity) {
  if (xi < 0.0) {
    throw std::domain_error("similarity_profile: xi must be non-negative");
  }
  const double a = std::numbers::sqrt2 - 1.0;
  const double denom = 1.0 + a * xi * xi;
  return centerline_velocity / (denom * denom);
}

/// Full opening angle of the jet cone, 2·arctan(S) [rad].
inline double cone_angle(const JetParameters& params) {
  return 2.0 * std::atan(params.spreading_rate);
}

}  // namespace downwash
