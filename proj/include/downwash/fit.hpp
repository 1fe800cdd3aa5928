#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "downwash/grid.hpp"
#include "downwash/jet.hpp"
#include "downwash/least_squares.hpp"
#include "downwash/stats.hpp"

namespace downwash {

struct SliceFit {
  double s_norm = 0.0;
  double u_c_norm = 0.0;
  double r_half_norm = 0.0;
  double residual_rms = 0.0;
  bool in_far_field = false;  ///< s_norm ≥ 2.5
  std::vector<double> cost_trace;  ///< solver diagnostics, non-increasing
};

struct BimodalFit {
  double s_norm = 0.0;
  double delta_norm = 0.0;  ///< half-separation of the Gaussian means, ≥ 0
  double width = 0.0;
  double amplitude = 0.0;
};

struct MergeResult {
  bool merged = false;
  double s_merge_norm = 0.0;  ///< valid only when merged
  double threshold = 0.0;     ///< δ̃ level that counted as collapsed
};

struct ResidualTest {
  double xi_lo = 0.0;
  double xi_hi = 0.0;  ///< interval [xi_lo, xi_hi)
  std::size_t n = 0;
  double mean_residual = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool reject_h0 = false;
  bool testable = false;  ///< false when n < 2 or zero variance
};

/**
 * Fit the similarity profile Ũ(r̃) = Ũ_C/(1+(√2−1)ξ²)², ξ = r̃/r̃½, to
 * one radial profile. Only bins with ξ ≤ 5 enter the objective; since ξ
 * depends on the fitted half-width, the mask is recomputed and the fit
 * repeated until it stabilizes. Warm start: Ũ_C from the peak bin, r̃½
 * from the first drop below half peak.
 */
inline SliceFit fit_slice(const RadialProfile& profile) {
  const auto& bins = profile.bins;
  if (bins.size() < 3) {
    throw std::invalid_argument("fit_slice: need at least 3 radial bins");
  }
  double peak = 0.0, max_r = 0.0;
  for (const auto& bin : bins) {
    peak = std::max(peak, bin.speed_norm);
    max_r = std::max(max_r, bin.r_norm);
  }
  if (!(peak > 0.0)) {
    throw fit_error("fit_slice: profile is identically zero");
  }
  double r_half_init = 0.0;
  for (const auto& bin : bins) {
    if (bin.speed_norm < 0.5 * peak && bin.r_norm > 0.0) {
      r_half_init = bin.r_norm;
      break;
    }
  }
  if (!(r_half_init > 0.0)) r_half_init = 0.5 * max_r;
  if (!(r_half_init > 0.0)) {
    throw fit_error("fit_slice: degenerate radius support");
  }

  constexpr double a = std::numbers::sqrt2 - 1.0;
  std::vector<std::size_t> mask;
  auto build_mask = [&](double r_half) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].r_norm <= 5.0 * r_half) m.push_back(i);
    }
    return m;
  };

  std::vector<double> params = {peak, r_half_init};
  LeastSquaresResult solve;
  mask = build_mask(r_half_init);
  for (int pass = 0; pass < 5; ++pass) {
    if (mask.size() < 3) {
      throw fit_error("fit_slice: fewer than 3 bins inside the xi <= 5 window",
                      params);
    }
    auto residual_fn = [&](const std::vector<double>& p, std::vector<double>& res,
                           std::vector<double>& jac) {
      const double u_c = p[0], r_half = p[1];
      res.resize(mask.size());
      jac.resize(mask.size() * 2);
      for (std::size_t k = 0; k < mask.size(); ++k) {
        const auto& bin = bins[mask[k]];
        const double h = std::max(std::fabs(r_half), 1e-9);
        const double xi = bin.r_norm / h;
        const double q = 1.0 + a * xi * xi;
        const double q2 = q * q;
        res[k] = u_c / q2 - bin.speed_norm;
        jac[k * 2 + 0] = 1.0 / q2;
        jac[k * 2 + 1] = 4.0 * a * u_c * xi * xi / (h * q2 * q);
      }
    };
    solve = levenberg_fit(residual_fn, params);
    params = solve.parameters;
    params[1] = std::fabs(params[1]);
    auto new_mask = build_mask(params[1]);
    if (new_mask == mask) break;
    mask = std::move(new_mask);
  }

  SliceFit fit;
  fit.s_norm = profile.s_norm;
  fit.u_c_norm = params[0];
  fit.r_half_norm = params[1];
  fit.residual_rms = std::sqrt(solve.cost / static_cast<double>(mask.size()));
  fit.in_far_field = profile.s_norm >= far_field_min_s_norm;
  fit.cost_trace = solve.cost_trace;
  if (!(fit.u_c_norm > 0.0) || !(fit.r_half_norm > 0.0)) {
    throw fit_error("fit_slice: fit collapsed to non-positive parameters", params);
  }
  return fit;
}

enum class SliceWeighting {
  inverse_rms,  ///< residuals scaled by per-slice fit RMS (default)
  uniform,
};

/**
 * Joint fit of (Bd, S, s̃₀) to far-field slice estimates: the centerline
 * law Ũ_C = Bd/(s̃−s̃₀) and the spread law r̃½ = S(s̃−s̃₀) share one
 * virtual origin. Warm start comes from linear regressions of 1/Ũ_C and
 * r̃½ against s̃ (both affine). With inverse_rms weighting a slice's two
 * residuals are scaled by median_rms/rms_slice, capped at 10, so noisy
 * slices count less; noiseless inputs fall back to uniform weights.
 */
inline JetParameters fit_jet_parameters(const std::vector<SliceFit>& slices,
                                        double s_min_norm = far_field_min_s_norm,
                                        SliceWeighting weighting = SliceWeighting::inverse_rms) {
  std::vector<const SliceFit*> used;
  for (const auto& s : slices) {
    if (s.in_far_field && s.s_norm >= s_min_norm) used.push_back(&s);
  }
  if (used.size() < 3) {
    throw std::invalid_argument(
        "fit_jet_parameters: need at least 3 far-field slices (s_norm >= " +
        std::to_string(s_min_norm) + ")");
  }

  std::vector<double> weights(used.size(), 1.0);
  if (weighting == SliceWeighting::inverse_rms) {
    std::vector<double> rms;
    for (const auto* s : used) rms.push_back(s->residual_rms);
    const double med = median(rms);
    if (med > 0.0) {
      for (std::size_t i = 0; i < used.size(); ++i) {
        weights[i] = std::min(med / std::max(used[i]->residual_rms, 1e-300), 10.0);
      }
    }
  }

  // warm start: 1/Ũ_C = s̃/Bd − s̃₀/Bd and r̃½ = S·s̃ − S·s̃₀
  auto regress = [&](auto value_of) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(used.size());
    for (const auto* s : used) {
      sx += s->s_norm;
      sy += value_of(*s);
      sxx += s->s_norm * s->s_norm;
      sxy += s->s_norm * value_of(*s);
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return std::pair{slope, intercept};
  };
  const auto [a1, b1] = regress([](const SliceFit& s) { return 1.0 / s.u_c_norm; });
  const auto [a2, b2] = regress([](const SliceFit& s) { return s.r_half_norm; });

  double bd0 = a1 > 0.0 ? 1.0 / a1 : 10.0;
  double spread0 = a2 > 0.0 ? a2 : 0.08;
  double s0_0;
  if (a1 > 0.0 && a2 > 0.0) {
    s0_0 = 0.5 * (-b1 / a1 - b2 / a2);
  } else {
    s0_0 = -6.0;
  }
  const double s_min_used = (*std::min_element(
      used.begin(), used.end(),
      [](const SliceFit* x, const SliceFit* y) { return x->s_norm < y->s_norm; }))->s_norm;
  s0_0 = std::min(s0_0, s_min_used - 0.5);

  auto residual_fn = [&](const std::vector<double>& p, std::vector<double>& res,
                         std::vector<double>& jac) {
    const double bd = p[0], spread = p[1], s0 = p[2];
    const std::size_t m = used.size();
    res.resize(2 * m);
    jac.resize(2 * m * 3);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = weights[i];
      const double ds = std::max(used[i]->s_norm - s0, 1e-9);
      res[2 * i] = w * (bd / ds - used[i]->u_c_norm);
      jac[(2 * i) * 3 + 0] = w / ds;
      jac[(2 * i) * 3 + 1] = 0.0;
      jac[(2 * i) * 3 + 2] = w * bd / (ds * ds);
      res[2 * i + 1] = w * (spread * ds - used[i]->r_half_norm);
      jac[(2 * i + 1) * 3 + 0] = 0.0;
      jac[(2 * i + 1) * 3 + 1] = w * ds;
      jac[(2 * i + 1) * 3 + 2] = -w * spread;
    }
  };

  LeastSquaresResult solve;
  try {
    solve = levenberg_fit(residual_fn, {bd0, spread0, s0_0});
  } catch (const fit_error& e) {
    throw fit_error(std::string(e.what()) +
                        "; the joint fit is ill-conditioned, add more far-field slices",
                    e.last_parameters);
  }
  JetParameters out{solve.parameters[0], solve.parameters[1], solve.parameters[2]};
  validate(out);
  return out;
}

/**
 * Symmetric bimodal Gaussian fit
 * U(ỹ) = A·[exp(−(ỹ−δ̃)²/2σ²) + exp(−(ỹ+δ̃)²/2σ²)] for one lateral
 * profile. δ̃ = 0 is a stationary point of the objective, so the warm
 * start keeps δ̃ away from it; the model is even in δ̃ and the fit
 * reports |δ̃|.
 */
inline BimodalFit fit_bimodal(const YProfile& profile) {
  const auto& bins = profile.bins;
  if (bins.size() < 5) {
    throw std::invalid_argument("fit_bimodal: need at least 5 lateral bins");
  }
  double y_min = bins.front().r_norm, y_max = bins.back().r_norm;
  if (!(y_min < 0.0 && y_max > 0.0)) {
    throw std::invalid_argument("fit_bimodal: profile must span both sides of y = 0");
  }
  double peak = 0.0, peak_y = 0.0, mass = 0.0, m2 = 0.0;
  for (const auto& bin : bins) {
    if (bin.speed_norm > peak) {
      peak = bin.speed_norm;
      peak_y = bin.r_norm;
    }
    mass += bin.speed_norm;
    m2 += bin.speed_norm * bin.r_norm * bin.r_norm;
  }
  if (!(peak > 0.0)) {
    throw fit_error("fit_bimodal: profile is identically zero");
  }
  // for the true model the speed-weighted second moment is δ² + σ²
  const double moment2 = m2 / mass;
  const double sigma_from_moment =
      std::sqrt(std::max(moment2 - peak_y * peak_y, 1e-6));

  auto residual_fn = [&](const std::vector<double>& p, std::vector<double>& res,
                         std::vector<double>& jac) {
    const double amp = p[0], delta = p[1];
    const double sigma = std::max(std::fabs(p[2]), 1e-6);
    const double inv_s2 = 1.0 / (sigma * sigma);
    res.resize(bins.size());
    jac.resize(bins.size() * 3);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double y = bins[i].r_norm;
      const double um = y - delta, up = y + delta;
      const double e1 = std::exp(-0.5 * um * um * inv_s2);
      const double e2 = std::exp(-0.5 * up * up * inv_s2);
      res[i] = amp * (e1 + e2) - bins[i].speed_norm;
      jac[i * 3 + 0] = e1 + e2;
      jac[i * 3 + 1] = amp * inv_s2 * (e1 * um - e2 * up);
      jac[i * 3 + 2] = amp * inv_s2 / sigma * (e1 * um * um + e2 * up * up);
    }
  };

  // δ = 0 is a stationary point of the objective, so every start keeps δ
  // away from it; several starts cover both well-separated and nearly
  // merged truths, and the lowest final cost wins
  const double sigma0 = std::clamp(sigma_from_moment, 1e-3, y_max - y_min);
  const std::array<std::array<double, 3>, 3> starts = {{
      {0.6 * peak, std::max(std::fabs(peak_y), 0.3 * sigma0), sigma0},
      {0.6 * peak, 0.75 * std::sqrt(moment2), 0.5 * std::sqrt(moment2)},
      {0.9 * peak, 0.1 * sigma0, sigma0},
  }};
  LeastSquaresResult best;
  bool have_best = false;
  for (const auto& start : starts) {
    try {
      auto solve = levenberg_fit(residual_fn, {start[0], start[1], start[2]});
      if (!have_best || solve.cost < best.cost) {
        best = std::move(solve);
        have_best = true;
      }
    } catch (const fit_error&) {
      // a diverging start is fine as long as one converges
    }
  }
  if (!have_best) {
    throw fit_error("fit_bimodal: no start converged");
  }
  BimodalFit fit;
  fit.s_norm = profile.s_norm;
  fit.amplitude = best.parameters[0];
  fit.delta_norm = std::fabs(best.parameters[1]);
  fit.width = std::fabs(best.parameters[2]);
  return fit;
}

/**
 * Merge detection: the jets count as merged at the first sampled s̃ where
 * δ̃ has collapsed to ≤ 5% of its near-rotor scale and stays collapsed
 * for every later sample. The scale is δ̃ extrapolated to s̃ = 0 by a
 * linear fit through the first min(3, n) points.
 */
inline MergeResult merge_distance(const std::vector<BimodalFit>& fits) {
  if (fits.size() < 3) {
    throw std::invalid_argument("merge_distance: need at least 3 bimodal fits");
  }
  for (std::size_t i = 1; i < fits.size(); ++i) {
    if (fits[i].s_norm <= fits[i - 1].s_norm) {
      throw std::invalid_argument("merge_distance: fits must be ordered by s_norm");
    }
  }
  const std::size_t head = std::min<std::size_t>(3, fits.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < head; ++i) {
    sx += fits[i].s_norm;
    sy += fits[i].delta_norm;
    sxx += fits[i].s_norm * fits[i].s_norm;
    sxy += fits[i].s_norm * fits[i].delta_norm;
  }
  const double n = static_cast<double>(head);
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double delta_ref = std::max(sy / n - slope * (sx / n), 0.0);

  MergeResult result;
  result.threshold = 0.05 * delta_ref;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    bool collapsed = true;
    for (std::size_t j = i; j < fits.size(); ++j) {
      if (fits[j].delta_norm > result.threshold) {
        collapsed = false;
        break;
      }
    }
    if (collapsed) {
      result.merged = true;
      result.s_merge_norm = fits[i].s_norm;
      return result;
    }
  }
  return result;  // no merge observed in the sampled range
}

/**
 * Per-interval one-sided t-tests of the profile residuals
 * ε = U_theory(ξ) − Ũ_obs/Ũ_C against H0: mean ε ≤ 0. Intervals are
 * ξ-bins of width 1 over [0, 6). Intervals with n < 2 or zero variance
 * are flagged untestable instead of tested.
 */
inline std::vector<ResidualTest> residual_test(
    const std::vector<std::pair<double, double>>& samples,
    double significance = 0.05) {
  std::vector<ResidualTest> tests;
  for (int k = 0; k < 6; ++k) {
    ResidualTest test;
    test.xi_lo = static_cast<double>(k);
    test.xi_hi = static_cast<double>(k + 1);
    std::vector<double> eps;
    for (const auto& [xi, ratio] : samples) {
      if (xi >= test.xi_lo && xi < test.xi_hi) {
        eps.push_back(similarity_profile(xi, 1.0) - ratio);
      }
    }
    test.n = eps.size();
    if (eps.size() >= 2) {
      const double sd = sample_std_dev(eps);
      test.mean_residual = mean(eps);
      if (sd > 0.0) {
        const auto t = one_sided_t_test(eps, 0.0, significance);
        test.t_statistic = t.t_statistic;
        test.p_value = t.p_value;
        test.reject_h0 = t.reject_null;
        test.testable = true;
      }
    } else if (eps.size() == 1) {
      test.mean_residual = eps.front();
    }
    tests.push_back(test);
  }
  return tests;
}

/// Turn binned profiles plus their slice fits into (ξ, Ũ_obs/Ũ_C) pairs
/// for residual_test.
inline std::vector<std::pair<double, double>> collect_profile_residual_samples(
    const std::vector<RadialProfile>& profiles, const std::vector<SliceFit>& fits) {
  std::vector<std::pair<double, double>> samples;
  for (const auto& profile : profiles) {
    const SliceFit* fit = nullptr;
    for (const auto& f : fits) {
      if (f.s_norm == profile.s_norm) {
        fit = &f;
        break;
      }
    }
    if (!fit) continue;
    for (const auto& bin : profile.bins) {
      samples.emplace_back(bin.r_norm / fit->r_half_norm,
                           bin.speed_norm / fit->u_c_norm);
    }
  }
  return samples;
}

}  // namespace downwash
