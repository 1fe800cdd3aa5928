#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace downwash {

struct LeastSquaresOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;   ///< relative parameter step
  double cost_tolerance = 1e-12;   ///< relative objective change
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 0.2;
};

struct LeastSquaresResult {
  std::vector<double> parameters;
  double cost = 0.0;  ///< final sum of squared residuals
  int iterations = 0;
  bool converged = false;
  /// Objective after each accepted step; non-increasing by construction.
  std::vector<double> cost_trace;
};

/// Fit failed; carries the last iterate so callers can inspect it.
class fit_error : public std::runtime_error {
 public:
  fit_error(const std::string& what, std::vector<double> last = {})
      : std::runtime_error(what), last_parameters(std::move(last)) {}

  std::vector<double> last_parameters;
};

namespace detail {

/// Solve A·x = b for symmetric positive definite A (n×n row-major).
/// Returns false when the factorization breaks down.
inline bool cholesky_solve(std::vector<double> a, std::vector<double> b,
                           std::size_t n, std::vector<double>& x) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) return false;
    diag = std::sqrt(diag);
    a[j * n + j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / diag;
    }
  }
  // forward then back substitution
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= a[k * n + ii] * x[k];
    x[ii] = v / a[ii * n + ii];
  }
  return true;
}

}  // namespace detail

/// Fills residuals (length m) and the row-major m×n Jacobian for the
/// given parameter vector. The callee resizes both.
using ResidualFn = std::function<void(const std::vector<double>& params,
                                      std::vector<double>& residuals,
                                      std::vector<double>& jacobian)>;

/**
 * Damped Gauss-Newton (Levenberg-style) minimizer of ½‖r(p)‖² for small
 * dense problems with analytic Jacobians. Steps that fail to reduce the
 * objective are rejected and retried with more damping, so the cost trace
 * is monotone. Throws fit_error, carrying the last iterate, when the
 * iteration cap is reached without meeting either tolerance.
 */
inline LeastSquaresResult levenberg_fit(const ResidualFn& fn,
                                        std::vector<double> initial,
                                        const LeastSquaresOptions& opts = {}) {
  const std::size_t n = initial.size();
  if (n == 0) throw std::invalid_argument("levenberg_fit: empty parameter vector");

  std::vector<double> params = std::move(initial);
  std::vector<double> residuals, jacobian;
  fn(params, residuals, jacobian);
  const std::size_t m = residuals.size();
  if (jacobian.size() != m * n) {
    throw std::invalid_argument("levenberg_fit: jacobian size mismatch");
  }

  auto sum_sq = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };

  LeastSquaresResult result;
  result.parameters = params;
  double cost = sum_sq(residuals);
  result.cost_trace.push_back(cost);

  double damping = opts.initial_damping;
  std::vector<double> hessian(n * n), gradient(n), step, trial,
      trial_res, trial_jac;

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    result.iterations = iter;

    // normal equations: H = JᵀJ, g = Jᵀr
    std::fill(hessian.begin(), hessian.end(), 0.0);
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (std::size_t row = 0; row < m; ++row) {
      const double* jrow = &jacobian[row * n];
      for (std::size_t i = 0; i < n; ++i) {
        gradient[i] += jrow[i] * residuals[row];
        for (std::size_t j = i; j < n; ++j) hessian[i * n + j] += jrow[i] * jrow[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) hessian[i * n + j] = hessian[j * n + i];

    double grad_max = 0.0;
    for (double g : gradient) grad_max = std::max(grad_max, std::fabs(g));
    if (grad_max <= 1e-14 * std::max(1.0, cost)) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    double trial_cost = cost;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      std::vector<double> damped = hessian;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = hessian[i * n + i];
        damped[i * n + i] = d + damping * std::max(d, 1e-12);
      }
      std::vector<double> neg_grad(n);
      for (std::size_t i = 0; i < n; ++i) neg_grad[i] = -gradient[i];

      if (!detail::cholesky_solve(damped, neg_grad, n, step)) {
        damping *= opts.damping_increase;
        continue;
      }
      trial = params;
      for (std::size_t i = 0; i < n; ++i) trial[i] += step[i];
      fn(trial, trial_res, trial_jac);
      trial_cost = sum_sq(trial_res);
      if (trial_cost <= cost) {
        accepted = true;
      } else {
        damping *= opts.damping_increase;
      }
    }

    if (!accepted) {
      // damping exhausted without any downhill step: we are at a local
      // minimum to working precision
      result.converged = true;
      break;
    }

    double step_norm = 0.0, param_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      step_norm += step[i] * step[i];
      param_norm += trial[i] * trial[i];
    }
    step_norm = std::sqrt(step_norm);
    param_norm = std::sqrt(param_norm);

    const double cost_drop = cost - trial_cost;
    params.swap(trial);
    residuals.swap(trial_res);
    jacobian.swap(trial_jac);
    cost = trial_cost;
    result.parameters = params;
    result.cost_trace.push_back(cost);
    damping = std::max(damping * opts.damping_decrease, 1e-14);

    if (step_norm <= opts.step_tolerance * (param_norm + 1e-30) ||
        cost_drop <= opts.cost_tolerance * std::max(cost, 1e-300)) {
      result.converged = true;
      break;
    }
  }

  result.parameters = params;
  result.cost = cost;
  if (!result.converged) {
    throw fit_error("levenberg_fit: no convergence within " +
                        std::to_string(opts.max_iterations) + " iterations",
                    params);
  }
  return result;
}

}  // namespace downwash
