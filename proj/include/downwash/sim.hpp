#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/flow_field.hpp"
#include "downwash/jet.hpp"

namespace downwash {

/// Momentum-theory induced velocity when the inflow already moves down
/// at U_D: U_H′ = U_D/2 + √((U_D/2)² + U_H²).
inline double induced_velocity_in_downwash(double u_d_mps, double u_h_mps) {
  if (u_d_mps < 0.0) {
    throw std::domain_error("induced_velocity_in_downwash: U_D must be non-negative");
  }
  if (!(u_h_mps > 0.0)) {
    throw std::domain_error("induced_velocity_in_downwash: U_H must be positive");
  }
  const double half = 0.5 * u_d_mps;
  return half + std::sqrt(half * half + u_h_mps * u_h_mps);
}

/// Relative hover power inside downwash: β = α/2 + √(α² + 4)/2 with
/// α = U_D/U_H. Satisfies β² − αβ − 1 = 0 and β = U_H′/U_H.
inline double power_ratio(double alpha) {
  if (alpha < 0.0) {
    throw std::domain_error("power_ratio: alpha must be non-negative");
  }
  return 0.5 * alpha + 0.5 * std::sqrt(alpha * alpha + 4.0);
}

/// Feed-forward throttle scale √β under the quadratic throttle-to-power
/// law. β below 1 is physically impossible and is clamped; the optional
/// flag reports that a clamp happened.
inline double throttle_compensation(double beta, bool* clamped = nullptr) {
  if (clamped) *clamped = beta < 1.0;
  return beta < 1.0 ? 1.0 : std::sqrt(beta);
}

/// Negligible-flow cutoff: beyond this many half-widths off axis the
/// model output is treated as zero.
inline constexpr double xi_cutoff = 6.0;

/**
 * Downwash speed of the upper drone at the lower drone's position.
 * delta_p is the lower minus upper position in the upper drone's frame
 * (z up). At or above the rotor plane, and beyond ξ = 6 off axis, the
 * field counts as zero. Near-field queries follow the given policy.
 */
inline double downwash_at_relative_position(
    const DroneSpec& upper, const Environment& env, const JetParameters& params,
    const std::array<double, 3>& delta_p_m,
    NearFieldPolicy policy = NearFieldPolicy::error) {
  if (delta_p_m[2] >= 0.0) return 0.0;
  const FlowPoint point = body_to_flow(delta_p_m);
  const FieldSample sample = evaluate_far_field(upper, env, params, point, policy);
  if (sample.xi > xi_cutoff) return 0.0;
  return sample.speed_mps;
}

/**
 * Vertical-thrust plant with the quadratic ESC law P = k_esc·throttle².
 * k_esc = m·g·U_H, so throttle 1 hovers exactly in still air. Thrust
 * follows from aerodynamic power balance P = T·U′(T, U_D) where U′ is
 * the momentum-theory induced velocity at thrust T under inflow U_D.
 */
struct PlantModel {
  DroneSpec drone;
  Environment env;
  double throttle_max = 2.0;

  double density() const { return air_density(env); }

  double hover_induced_velocity() const {
    return induced_hover_velocity(drone, density(), env.gravity);
  }

  double k_esc() const {
    return drone.mass_kg * env.gravity * hover_induced_velocity();
  }

  /// Solve P = T·(U_D/2 + √((U_D/2)² + T/(2ρA))) for T by bisection.
  /// The right side is strictly increasing in T, so the root is unique.
  double thrust(double throttle, double u_d_mps) const {
    if (throttle < 0.0 || throttle > throttle_max) {
      throw std::domain_error("PlantModel::thrust: throttle outside [0, " +
                              std::to_string(throttle_max) + "]");
    }
    if (u_d_mps < 0.0) {
      throw std::domain_error("PlantModel::thrust: U_D must be non-negative");
    }
    const double power = k_esc() * throttle * throttle;
    if (power == 0.0) return 0.0;
    const double disk_area =
        static_cast<double>(drone.n_propellers) * rotor_disk_area(drone);
    const double rho_a2 = 2.0 * density() * disk_area;
    const double half_ud = 0.5 * u_d_mps;
    auto aero_power = [&](double thrust) {
      return thrust * (half_ud + std::sqrt(half_ud * half_ud + thrust / rho_a2));
    };
    double lo = 0.0, hi = drone.mass_kg * env.gravity;
    while (aero_power(hi) < power) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (aero_power(mid) < power ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

/// PD gains on height error, critically damped at ωₙ = 6 rad/s for the
/// linearized throttle-to-thrust gain (4/3)·m·g.
struct ControllerGains {
  double kp = 2.75;  ///< throttle per meter of height error
  double kd = 0.92;  ///< throttle per m/s of height error rate
};

struct SimConfig {
  DroneSpec upper_drone;
  DroneSpec lower_drone;
  Environment env{};
  JetParameters params{};
  double vertical_separation_m = 0.0;
  double crossing_speed_mps = 0.0;
  double horizontal_span_m = 0.0;
  double timestep_s = 0.002;
  ControllerGains gains{};
  bool compensation_enabled = true;
  bool upper_drone_present = true;  ///< false forces U_D = 0 (control run)
  double height_noise_sigma_m = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    downwash::validate(upper_drone);
    downwash::validate(lower_drone);
    downwash::validate(params);
    if (!(timestep_s > 0.0)) {
      throw std::invalid_argument("SimConfig: timestep must be positive");
    }
    if (!(crossing_speed_mps > 0.0)) {
      throw std::invalid_argument("SimConfig: crossing speed must be positive");
    }
    if (!(horizontal_span_m > 0.0)) {
      throw std::invalid_argument("SimConfig: horizontal span must be positive");
    }
    const double s_norm = vertical_separation_m / upper_drone.motor_distance_m;
    if (!(s_norm >= far_field_min_s_norm)) {
      throw std::invalid_argument(
          "SimConfig: vertical_separation/l_upper = " + std::to_string(s_norm) +
          " is inside the near field (< " + std::to_string(far_field_min_s_norm) + ")");
    }
    if (height_noise_sigma_m < 0.0) {
      throw std::invalid_argument("SimConfig: noise sigma must be non-negative");
    }
  }
};

struct SimSample {
  double t_s = 0.0;
  double x_m = 0.0;
  double z_m = 0.0;
  double z_err_m = 0.0;  ///< z − z_ref; negative means sagging below
  double u_d_mps = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  double throttle = 0.0;
};

struct SimResult {
  std::vector<SimSample> series;  ///< equally spaced at the config timestep
  double rmse_mm = 0.0;
  double mean_err_mm = 0.0;
  double max_abs_err_mm = 0.0;
};

/**
 * Pass-under scenario: the upper drone hovers with its rotor plane at
 * the origin; the lower drone tracks z_ref = −vertical_separation while
 * translating from −span/2 to +span/2 at constant speed. Only vertical
 * dynamics are integrated (fixed-step RK4); the throttle law, including
 * the √β feed-forward when enabled, is evaluated inside each RK4 stage
 * so the closed loop stays a smooth ODE. Optional height measurement
 * noise is sampled once per step and held across stages.
 */
inline SimResult run_passunder(const SimConfig& config) {
  config.validate();
  const PlantModel plant{config.lower_drone, config.env};
  const double mass = config.lower_drone.mass_kg;
  const double gravity = config.env.gravity;
  const double u_h = plant.hover_induced_velocity();
  const double z_ref = -config.vertical_separation_m;
  const double duration = config.horizontal_span_m / config.crossing_speed_mps;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / config.timestep_s));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Control {
    double u_d = 0.0, alpha = 0.0, beta = 1.0, throttle = 0.0;
  };
  auto control_at = [&](double t, double z, double w, double z_noise) {
    Control c;
    const double x = -0.5 * config.horizontal_span_m + config.crossing_speed_mps * t;
    c.u_d = config.upper_drone_present
                ? downwash_at_relative_position(config.upper_drone, config.env,
                                                config.params, {x, 0.0, z})
                : 0.0;
    c.alpha = c.u_d / u_h;
    c.beta = power_ratio(c.alpha);
    const double err = z_ref - (z + z_noise);
    double throttle = 1.0 + config.gains.kp * err - config.gains.kd * w;
    if (config.compensation_enabled) throttle *= throttle_compensation(c.beta);
    c.throttle = std::clamp(throttle, 0.0, plant.throttle_max);
    return c;
  };
  auto accel = [&](const Control& c) {
    return (plant.thrust(c.throttle, c.u_d) - mass * gravity) / mass;
  };

  SimResult result;
  result.series.reserve(steps + 1);
  double z = z_ref, w = 0.0;
  double sum_sq = 0.0, sum = 0.0, max_abs = 0.0;

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * config.timestep_s;
    const double z_noise =
        config.height_noise_sigma_m > 0.0 ? config.height_noise_sigma_m * gauss(rng) : 0.0;

    const Control c0 = control_at(t, z, w, z_noise);
    SimSample sample{t,
                     -0.5 * config.horizontal_span_m + config.crossing_speed_mps * t,
                     z,
                     z - z_ref,
                     c0.u_d,
                     c0.alpha,
                     c0.beta,
                     c0.throttle};
    result.series.push_back(sample);
    sum_sq += sample.z_err_m * sample.z_err_m;
    sum += sample.z_err_m;
    max_abs = std::max(max_abs, std::fabs(sample.z_err_m));
    if (k == steps) break;

    const double h = config.timestep_s;
    // RK4 on (z, w); stage controls re-evaluated at stage states
    const double a1 = accel(c0);
    const double k1z = w, k1w = a1;

    const Control c2 = control_at(t + 0.5 * h, z + 0.5 * h * k1z, w + 0.5 * h * k1w, z_noise);
    const double k2z = w + 0.5 * h * k1w, k2w = accel(c2);

    const Control c3 = control_at(t + 0.5 * h, z + 0.5 * h * k2z, w + 0.5 * h * k2w, z_noise);
    const double k3z = w + 0.5 * h * k2w, k3w = accel(c3);

    const Control c4 = control_at(t + h, z + h * k3z, w + h * k3w, z_noise);
    const double k4z = w + h * k3w, k4w = accel(c4);

    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }

  const double n = static_cast<double>(result.series.size());
  result.rmse_mm = std::sqrt(sum_sq / n) * 1000.0;
  result.mean_err_mm = sum / n * 1000.0;
  result.max_abs_err_mm = max_abs * 1000.0;
  return result;
}

/// RMSE_off / RMSE_on. When both runs track essentially perfectly
/// (below 1e−9 mm) the ratio is defined as 1.
inline double improvement_ratio(const SimResult& off, const SimResult& on) {
  constexpr double tiny = 1e-9;
  if (off.rmse_mm < tiny && on.rmse_mm < tiny) return 1.0;
  return off.rmse_mm / std::max(on.rmse_mm, tiny * 1e-3);
}

struct ComparisonResult {
  SimResult compensated;
  SimResult uncompensated;
  double improvement = 1.0;
};

/// Run the config twice, with and without compensation, all else equal.
inline ComparisonResult run_comparison(SimConfig config) {
  ComparisonResult out;
  config.compensation_enabled = true;
  out.compensated = run_passunder(config);
  config.compensation_enabled = false;
  out.uncompensated = run_passunder(config);
  out.improvement = improvement_ratio(out.uncompensated, out.compensated);
  return out;
}

inline void write_series_csv(std::ostream& out, const SimResult& result) {
  out << "t_s,x_m,z_m,z_err_m,u_d_mps,alpha,beta,throttle\n";
  out << std::setprecision(10);
  for (const auto& s : result.series) {
    out << s.t_s << ',' << s.x_m << ',' << s.z_m << ',' << s.z_err_m << ','
        << s.u_d_mps << ',' << s.alpha << ',' << s.beta << ',' << s.throttle << '\n';
  }
}

}  // namespace downwash
