#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace downwash {

/// Median of an unsorted sample (average of the middle pair for even n).
inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

inline double mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

/// Unbiased sample standard deviation (n−1 denominator); needs n ≥ 2.
inline double sample_std_dev(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw std::invalid_argument("sample_std_dev: need at least two samples");
  }
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

/// Interquartile range with linear interpolation between order statistics
/// (the common "type 7" quantile rule).
inline double interquartile_range(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("interquartile_range: empty sample");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

namespace detail {

/// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // use the symmetry relation where the fraction converges fastest
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - incomplete_beta(b, a, 1.0 - x);
  }
  const double log_prefix = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double dm = static_cast<double>(m);
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(log_prefix) * h / a;
}

}  // namespace detail

/// CDF of Student's t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t_cdf: df must be positive");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * detail::incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

/// Inverse CDF by bisection; |result error| below 1e−8 in t.
inline double student_t_quantile(double p, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t_quantile: df must be positive");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double critical_value = 0.0;  ///< one-sided threshold at the given level
  double p_value = 0.0;         ///< P(T > t) under H0
  bool reject_null = false;     ///< true when mean > mu0 at the given level
};

/**
 * One-sided one-sample t-test of H0: μ ≤ mu0 against H1: μ > mu0.
 * Rejects when the statistic exceeds the upper critical value.
 */
inline TTestResult one_sided_t_test(const std::vector<double>& sample,
                                    double mu0, double significance = 0.05) {
  if (sample.size() < 2) {
    throw std::invalid_argument("one_sided_t_test: need at least two samples");
  }
  if (!(significance > 0.0 && significance < 1.0)) {
    throw std::invalid_argument("one_sided_t_test: significance must lie in (0, 1)");
  }
  const double n = static_cast<double>(sample.size());
  const double sd = sample_std_dev(sample);
  if (!(sd > 0.0)) {
    throw std::invalid_argument("one_sided_t_test: zero sample variance");
  }
  TTestResult r;
  r.degrees_of_freedom = n - 1.0;
  r.t_statistic = (mean(sample) - mu0) / (sd / std::sqrt(n));
  r.critical_value = student_t_quantile(1.0 - significance, r.degrees_of_freedom);
  r.p_value = 1.0 - student_t_cdf(r.t_statistic, r.degrees_of_freedom);
  r.reject_null = r.t_statistic > r.critical_value;
  return r;
}

}  // namespace downwash
