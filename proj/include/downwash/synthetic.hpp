#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/flow_field.hpp"
#include "downwash/jet.hpp"
#include "downwash/log.hpp"

namespace downwash {

/// Lawnmower-style grid flight: an x̃/ỹ lattice visited at each listed
/// s̃ station. Lattice pitch should match the intended binning
/// resolution so dwell points sit exactly on cell centers.
struct GridFlightPlan {
  double lateral_extent_norm = 2.0;       ///< lattice spans ±extent in x̃ and ỹ
  double lateral_resolution_norm = 0.33;  ///< lattice pitch
  std::vector<double> s_levels_norm;
  int dwell_samples = 4;      ///< hover samples per lattice point
  int transit_samples = 1;    ///< moving samples between points (filtered out)
  int pre_takeoff_samples = 0;
  double sample_period_s = 0.1;
  double transit_speed_mps = 0.5;  ///< must exceed the hover filter threshold
  double probe_height_m = 1.0;     ///< drone parks this far below the probe plane
};

struct NoiseModel {
  double multiplicative_sigma = 0.0;  ///< fractional Gaussian noise on speed
  double additive_sigma_mps = 0.0;    ///< absolute Gaussian noise on the reading
  double ambient_mps = 0.0;           ///< constant offset, as seen by the probe
};

/// Invented near-field surrogate for merge-distance synthesis: two
/// Gaussian lobes in ỹ whose half-separation collapses to zero at
/// merge_s_norm, modulated by a Gaussian in x̃. The collapse follows
/// (1 − s̃/merge)^exponent; the square-root default keeps the lobes
/// clearly separated until shortly before the merge, like shear layers
/// closing on each other. Amplitude tracks half the far-field
/// centerline so the field is continuous at the merge.
struct NearFieldBimodalModel {
  double delta0_norm = 0.4;    ///< lobe half-separation extrapolated to s̃ = 0
  double merge_s_norm = 2.5;   ///< station where the lobes collapse
  double collapse_exponent = 0.5;
  double sigma_y0 = 0.13;
  double sigma_y_growth = 0.05;
  double sigma_x0 = 0.3;
  double sigma_x_growth = 0.08;

  double delta_norm(double s_norm) const {
    const double margin = std::max(0.0, 1.0 - s_norm / merge_s_norm);
    return delta0_norm * std::pow(margin, collapse_exponent);
  }

  double speed_norm(double x_norm, double y_norm, double s_norm,
                    const JetParameters& params) const {
    const double amp = 0.5 * centerline_velocity_norm(std::max(s_norm, 0.2), params);
    const double delta = delta_norm(s_norm);
    const double sy = sigma_y0 + sigma_y_growth * s_norm;
    const double sx = sigma_x0 + sigma_x_growth * s_norm;
    const double dm = y_norm - delta, dp = y_norm + delta;
    const double lobes = std::exp(-0.5 * dm * dm / (sy * sy)) +
                         std::exp(-0.5 * dp * dp / (sy * sy));
    return amp * lobes * std::exp(-0.5 * x_norm * x_norm / (sx * sx));
  }
};

/**
 * Deterministic synthetic flight log. Dwell samples carry drone_speed 0
 * and the model speed with multiplicative noise, additive noise and the
 * ambient offset applied (clamped at zero); transit samples move faster
 * than the hover filter threshold so the pipeline discards them.
 * Far-field stations use the closed-form model; stations below the merge
 * use the near-field surrogate when one is given, zero speed otherwise.
 */
inline std::vector<MeasurementRecord> synthesize_log(
    const DroneSpec& drone, const Environment& env, const JetParameters& params,
    const GridFlightPlan& plan, const NoiseModel& noise, std::uint64_t seed,
    const NearFieldBimodalModel* near_field = nullptr) {
  validate(drone);
  validate(params);
  if (plan.s_levels_norm.empty()) {
    throw std::invalid_argument("synthesize_log: flight plan has no s levels");
  }
  if (!(plan.lateral_resolution_norm > 0.0) || !(plan.sample_period_s > 0.0)) {
    throw std::invalid_argument("synthesize_log: non-positive plan spacing");
  }
  if (!near_field) {
    for (double s : plan.s_levels_norm) {
      if (s < far_field_min_s_norm) {
        throw std::invalid_argument(
            "synthesize_log: near-field station requested without a near-field model");
      }
    }
  }

  const double l = drone.motor_distance_m;
  const double u_h = induced_hover_velocity(drone, air_density(env), env.gravity);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto model_speed = [&](double x_norm, double y_norm, double s_norm) {
    if (s_norm >= far_field_min_s_norm) {
      const FlowPoint point{s_norm * l, std::hypot(x_norm, y_norm) * l, 0.0};
      return evaluate_far_field(drone, env, params, point).speed_mps;
    }
    if (near_field && s_norm > 0.0) {
      return u_h * near_field->speed_norm(x_norm, y_norm, s_norm, params);
    }
    return 0.0;
  };

  auto reading = [&](double speed) {
    double value = speed;
    if (noise.multiplicative_sigma > 0.0) {
      value *= 1.0 + noise.multiplicative_sigma * gauss(rng);
    }
    value += noise.ambient_mps;
    if (noise.additive_sigma_mps > 0.0) {
      value += noise.additive_sigma_mps * gauss(rng);
    }
    return std::max(0.0, value);
  };

  std::vector<MeasurementRecord> records;
  double t = 0.0;
  auto emit = [&](double px, double py, double pz, double drone_speed, double speed) {
    records.push_back({t, {px, py, pz}, drone_speed, reading(speed)});
    t += plan.sample_period_s;
  };

  for (int i = 0; i < plan.pre_takeoff_samples; ++i) {
    emit(0.0, 0.0, -plan.probe_height_m, 0.0, 0.0);
  }

  const long half = std::lround(plan.lateral_extent_norm / plan.lateral_resolution_norm);
  bool have_prev = false;
  double prev[3] = {0.0, 0.0, 0.0};
  for (double s_norm : plan.s_levels_norm) {
    for (long iy = -half; iy <= half; ++iy) {
      for (long ix = -half; ix <= half; ++ix) {
        const double x_norm = static_cast<double>(ix) * plan.lateral_resolution_norm;
        const double y_norm = static_cast<double>(iy) * plan.lateral_resolution_norm;
        // probe frame: drone above the probe at (−l·x̃, −l·ỹ, l·s̃)
        const double px = -l * x_norm, py = -l * y_norm, pz = l * s_norm;
        if (have_prev) {
          for (int k = 1; k <= plan.transit_samples; ++k) {
            const double f = static_cast<double>(k) /
                             static_cast<double>(plan.transit_samples + 1);
            const double tx = prev[0] + f * (px - prev[0]);
            const double ty = prev[1] + f * (py - prev[1]);
            const double tz = prev[2] + f * (pz - prev[2]);
            const double speed =
                tz > 0.0 ? model_speed(-tx / l, -ty / l, tz / l) : 0.0;
            emit(tx, ty, tz, plan.transit_speed_mps, speed);
          }
        }
        const double speed = model_speed(x_norm, y_norm, s_norm);
        for (int k = 0; k < plan.dwell_samples; ++k) {
          emit(px, py, pz, 0.0, speed);
        }
        prev[0] = px;
        prev[1] = py;
        prev[2] = pz;
        have_prev = true;
      }
    }
  }
  return records;
}

}  // namespace downwash
