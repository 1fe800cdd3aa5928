#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/log.hpp"
#include "downwash/stats.hpp"

namespace downwash {

/// One nonempty grid cell in normalized flow coordinates (cell centers).
struct GridCell {
  double x_norm = 0.0;
  double y_norm = 0.0;
  double s_norm = 0.0;
  double u_norm = 0.0;  ///< median of speed / U_H over the cell
  std::size_t count = 0;
  double iqr = 0.0;
};

struct GriddedField {
  double resolution_norm = 0.0;
  double u_h_mps = 0.0;  ///< normalizer used for u_norm
  std::vector<GridCell> cells;  ///< sorted by (s, y, x) cell index
};

struct RadialBin {
  double r_norm = 0.0;      ///< median radius of the contributing cells
  double speed_norm = 0.0;  ///< median of contributing cell values
  std::size_t count = 0;    ///< total samples pooled into this bin
  double dispersion = 0.0;  ///< IQR of contributing cell values
};

struct RadialProfile {
  double s_norm = 0.0;
  std::vector<RadialBin> bins;  ///< sorted by r_norm
};

/// Lateral profile along ỹ near the x̃ = 0 plane, for the near-field
/// bimodal analysis.
struct YProfile {
  double s_norm = 0.0;
  std::vector<RadialBin> bins;  ///< r_norm holds ỹ here (signed)
};

namespace detail {

/// Cells are centered on the lattice k·res; half-open [k−½, k+½)·res.
inline long grid_index(double value_norm, double resolution_norm) {
  return static_cast<long>(std::floor(value_norm / resolution_norm + 0.5));
}

}  // namespace detail

/**
 * Quantize hover samples onto a normalized grid. Drone positions are
 * probe-frame (probe at origin, z up); the probe seen from the drone is
 * −p, so flow coordinates are x̃ = −pₓ/l, ỹ = −p_y/l, s̃ = p_z/l.
 * Samples with the drone at or below the probe plane (s̃ ≤ 0) are
 * outside the downwash half-space and are skipped. Each nonempty cell
 * carries the median of speed/U_H, the sample count, and the IQR.
 */
inline GriddedField bin_grid(const std::vector<MeasurementRecord>& records,
                             const DroneSpec& drone, const Environment& env,
                             double resolution_norm) {
  if (!(resolution_norm > 0.0)) {
    throw std::invalid_argument("bin_grid: resolution must be positive");
  }
  validate(drone);
  const double u_h = induced_hover_velocity(drone, air_density(env), env.gravity);
  const double l = drone.motor_distance_m;

  std::map<std::array<long, 3>, std::vector<double>> samples;
  for (const auto& rec : records) {
    const double s_norm = rec.drone_position_m[2] / l;
    if (!(s_norm > 0.0)) continue;
    const double x_norm = -rec.drone_position_m[0] / l;
    const double y_norm = -rec.drone_position_m[1] / l;
    const std::array<long, 3> key = {detail::grid_index(s_norm, resolution_norm),
                                     detail::grid_index(y_norm, resolution_norm),
                                     detail::grid_index(x_norm, resolution_norm)};
    samples[key].push_back(rec.anemometer_speed_mps / u_h);
  }

  GriddedField field;
  field.resolution_norm = resolution_norm;
  field.u_h_mps = u_h;
  field.cells.reserve(samples.size());
  for (auto& [key, values] : samples) {
    GridCell cell;
    cell.s_norm = static_cast<double>(key[0]) * resolution_norm;
    cell.y_norm = static_cast<double>(key[1]) * resolution_norm;
    cell.x_norm = static_cast<double>(key[2]) * resolution_norm;
    cell.count = values.size();
    cell.iqr = values.size() > 1 ? interquartile_range(values) : 0.0;
    cell.u_norm = median(std::move(values));
    field.cells.push_back(cell);
  }
  return field;
}

/**
 * Group cells into s̃-slices and re-bin by r̃ = √(x̃²+ỹ²), pooling all
 * azimuths. Radial bins are labelled with the median radius of the cells
 * that actually landed in them rather than the lattice value, which
 * keeps the label unbiased when cell centers straddle a ring. Slices
 * with fewer than 3 distinct radial bins cannot constrain a profile fit
 * and are dropped with a warning.
 */
inline std::vector<RadialProfile> radial_profiles(
    const GriddedField& grid, double slice_thickness_norm,
    std::vector<std::string>* warnings = nullptr) {
  if (!(slice_thickness_norm > 0.0)) {
    throw std::invalid_argument("radial_profiles: slice thickness must be positive");
  }
  struct Pool {
    std::vector<double> radii, values;
    std::size_t count = 0;
  };
  std::map<long, std::map<long, Pool>> slices;  // s-index -> r-index -> pool
  const double r_res = grid.resolution_norm;
  for (const auto& cell : grid.cells) {
    const long s_idx = detail::grid_index(cell.s_norm, slice_thickness_norm);
    const double r_norm = std::hypot(cell.x_norm, cell.y_norm);
    Pool& pool = slices[s_idx][detail::grid_index(r_norm, r_res)];
    pool.radii.push_back(r_norm);
    pool.values.push_back(cell.u_norm);
    pool.count += cell.count;
  }

  std::vector<RadialProfile> profiles;
  for (auto& [s_idx, bins] : slices) {
    RadialProfile profile;
    profile.s_norm = static_cast<double>(s_idx) * slice_thickness_norm;
    if (bins.size() < 3) {
      if (warnings) {
        warnings->push_back("slice s_norm=" + std::to_string(profile.s_norm) +
                            " has fewer than 3 radial bins; excluded");
      }
      continue;
    }
    for (auto& [r_idx, pool] : bins) {
      RadialBin bin;
      bin.r_norm = median(pool.radii);
      bin.speed_norm = median(pool.values);
      bin.count = pool.count;
      bin.dispersion = pool.values.size() > 1 ? interquartile_range(pool.values) : 0.0;
      profile.bins.push_back(bin);
    }
    std::sort(profile.bins.begin(), profile.bins.end(),
              [](const RadialBin& a, const RadialBin& b) { return a.r_norm < b.r_norm; });
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

/**
 * Lateral ỹ-profiles from cells within |x̃| ≤ x_band_norm of the
 * symmetry plane, one per s̃-slice. Used for the near-field bimodal fit,
 * so bins keep their signed ỹ in the r_norm field.
 */
inline std::vector<YProfile> y_axis_profiles(const GriddedField& grid,
                                             double slice_thickness_norm,
                                             double x_band_norm) {
  if (!(slice_thickness_norm > 0.0)) {
    throw std::invalid_argument("y_axis_profiles: slice thickness must be positive");
  }
  if (!(x_band_norm >= 0.0)) {
    throw std::invalid_argument("y_axis_profiles: x band must be non-negative");
  }
  struct Pool {
    std::vector<double> ys, values;
    std::size_t count = 0;
  };
  std::map<long, std::map<long, Pool>> slices;
  for (const auto& cell : grid.cells) {
    if (std::fabs(cell.x_norm) > x_band_norm + 1e-12) continue;
    const long s_idx = detail::grid_index(cell.s_norm, slice_thickness_norm);
    Pool& pool = slices[s_idx][detail::grid_index(cell.y_norm, grid.resolution_norm)];
    pool.ys.push_back(cell.y_norm);
    pool.values.push_back(cell.u_norm);
    pool.count += cell.count;
  }
  std::vector<YProfile> profiles;
  for (auto& [s_idx, bins] : slices) {
    YProfile profile;
    profile.s_norm = static_cast<double>(s_idx) * slice_thickness_norm;
    for (auto& [y_idx, pool] : bins) {
      RadialBin bin;
      bin.r_norm = median(pool.ys);
      bin.speed_norm = median(pool.values);
      bin.count = pool.count;
      bin.dispersion = pool.values.size() > 1 ? interquartile_range(pool.values) : 0.0;
      profile.bins.push_back(bin);
    }
    std::sort(profile.bins.begin(), profile.bins.end(),
              [](const RadialBin& a, const RadialBin& b) { return a.r_norm < b.r_norm; });
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

inline void write_grid_csv(std::ostream& out, const GriddedField& grid) {
  out << "x_norm,y_norm,s_norm,u_norm,count,iqr\n";
  out << std::setprecision(10);
  for (const auto& cell : grid.cells) {
    out << cell.x_norm << ',' << cell.y_norm << ',' << cell.s_norm << ','
        << cell.u_norm << ',' << cell.count << ',' << cell.iqr << '\n';
  }
}

inline void write_profiles_csv(std::ostream& out,
                               const std::vector<RadialProfile>& profiles) {
  out << "s_norm,r_norm,u_norm,count,iqr\n";
  out << std::setprecision(10);
  for (const auto& profile : profiles) {
    for (const auto& bin : profile.bins) {
      out << profile.s_norm << ',' << bin.r_norm << ',' << bin.speed_norm << ','
          << bin.count << ',' << bin.dispersion << '\n';
    }
  }
}

}  // namespace downwash
