#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/jet.hpp"

namespace downwash {

/**
 * Cylindrical flow coordinates below the rotor plane: s points down along
 * the jet axis, r radially outward, theta around the axis. The model is
 * axisymmetric; theta is carried for the frame contract only.
 */
struct FlowPoint {
  double s_m = 0.0;
  double r_m = 0.0;
  double theta_rad = 0.0;
};

/// Query landed upstream of the merged-jet region (s/l below 2.5).
class near_field_error : public std::domain_error {
 public:
  near_field_error(double s_norm, double threshold)
      : std::domain_error(format(s_norm, threshold)),
        s_norm_(s_norm),
        threshold_(threshold) {}

  double s_norm() const { return s_norm_; }
  double threshold() const { return threshold_; }

 private:
  static std::string format(double s_norm, double threshold) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "near-field query: s/l = %.4g is below the merge distance "
                  "%.3g; the jet model is valid in the far field only",
                  s_norm, threshold);
    return buf;
  }

  double s_norm_;
  double threshold_;
};

/**
 * Map a body-frame offset from the rotor plane (x forward, y left, z up,
 * meters) into flow coordinates. Only points at or below the rotor plane
 * are representable.
 */
inline FlowPoint body_to_flow(const std::array<double, 3>& body_offset_m) {
  const double x = body_offset_m[0];
  const double y = body_offset_m[1];
  const double z = body_offset_m[2];
  if (z > 0.0) {
    throw std::domain_error(
        "body_to_flow: point above the rotor plane; the downwash model is "
        "undefined there");
  }
  FlowPoint point;
  point.s_m = -z;
  point.r_m = std::hypot(x, y);
  point.theta_rad = std::atan2(y, x);
  if (point.theta_rad < 0.0) point.theta_rad += 2.0 * std::numbers::pi;
  return point;
}

/// What to do with queries upstream of the merge distance.
enum class NearFieldPolicy {
  error,                    ///< throw near_field_error (default)
  clamp_to_merge_distance,  ///< evaluate the s̃ = 2.5 slice instead
};

/// Evaluated mean-flow sample plus the intermediate quantities of the
/// normalization chain, handy for diagnostics and reporting.
struct FieldSample {
  double speed_mps = 0.0;    ///< time-averaged flow speed ⟨U⟩
  double u_h_mps = 0.0;      ///< induced hover velocity of the source drone
  double u_c_mps = 0.0;      ///< centerline velocity U_C at this depth
  double u_c_norm = 0.0;     ///< Ũ_C = U_C/U_H
  double s_norm = 0.0;       ///< s/l of the query (not clamped)
  double r_norm = 0.0;       ///< r/l of the query
  double xi = 0.0;           ///< r̃/r̃½
  double r_half_norm = 0.0;  ///< r̃½ at this depth
  double r_half_m = 0.0;     ///< half-width in meters
  bool clamped = false;          ///< near-field query answered at the 2.5 slice
  bool qualitative_only = false; ///< canted layout: no quantitative fit exists
};

/**
 * Time-averaged downwash speed below a hovering quadrotor.
 *
 * The evaluation follows the closed-form chain: induced velocity U_H and
 * motor distance l from the vehicle, normalize the point (s̃ = s/l,
 * r̃ = r/l), centerline decay and half-width from the jet parameters,
 * ξ = r̃/r̃½, rescale U_C = Ũ_C·U_H, and finally the similarity profile.
 *
 * Valid in the far field (s̃ ≥ 2.5). Near-field queries either throw or,
 * with the clamp policy, return the value of the s̃ = 2.5 slice at the
 * query radius; the singular 1/(s−s₀) form is never extrapolated toward
 * the virtual origin.
 */
inline FieldSample evaluate_far_field(const DroneSpec& drone,
                                      const Environment& env,
                                      const JetParameters& params,
                                      const FlowPoint& point,
                                      NearFieldPolicy policy = NearFieldPolicy::error) {
  validate(drone);
  validate(params);
  if (point.r_m < 0.0) {
    throw std::domain_error("evaluate_far_field: radius must be non-negative");
  }

  const double density = air_density(env);
  const double u_h = induced_hover_velocity(drone, density, env.gravity);
  const double l = drone.motor_distance_m;

  FieldSample sample;
  sample.u_h_mps = u_h;
  sample.s_norm = point.s_m / l;
  sample.r_norm = point.r_m / l;
  sample.qualitative_only = (drone.cant != Cant::uncanted);

  double s_eval = sample.s_norm;
  if (s_eval < far_field_min_s_norm) {
    if (policy == NearFieldPolicy::error) {
      throw near_field_error(sample.s_norm, far_field_min_s_norm);
    }
    s_eval = far_field_min_s_norm;
    sample.clamped = true;
  }

  sample.u_c_norm = centerline_velocity_norm(s_eval, params);
  sample.r_half_norm = half_width_norm(s_eval, params);
  sample.r_half_m = sample.r_half_norm * l;
  sample.xi = sample.r_norm / sample.r_half_norm;
  sample.u_c_mps = sample.u_c_norm * u_h;
  sample.speed_mps = similarity_profile(sample.xi, sample.u_c_mps);
  return sample;
}

}  // namespace downwash
