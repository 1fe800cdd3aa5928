#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "downwash/least_squares.hpp"
#include "downwash/stats.hpp"

namespace {

using namespace downwash;

TEST(Stats, MedianHandlesOddAndEven) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_DOUBLE_EQ(median({5.0}), 5.0);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(Stats, SampleStdDevUsesBesselCorrection) {
  // variance of {1,2,3,4,5} with n-1 normalization is 2.5
  EXPECT_NEAR(sample_std_dev({1.0, 2.0, 3.0, 4.0, 5.0}), std::sqrt(2.5), 1e-15);
  EXPECT_THROW(sample_std_dev({1.0}), std::invalid_argument);
}

TEST(Stats, InterquartileRange) {
  // type-7 quantiles over {1..8}: q1 = 2.75, q3 = 6.25
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_NEAR(interquartile_range(v), 3.5, 1e-12);
  EXPECT_DOUBLE_EQ(interquartile_range({2.0}), 0.0);
}

TEST(Stats, StudentTCdfReferenceValues) {
  // reference values from high-precision numerical integration
  EXPECT_NEAR(student_t_cdf(1.0, 7), 0.82469167, 1e-8);
  EXPECT_NEAR(student_t_cdf(2.5, 99), 0.99296870, 1e-8);
  EXPECT_NEAR(student_t_cdf(-1.3, 3), 0.14223375, 1e-8);
  EXPECT_NEAR(student_t_cdf(0.0, 12), 0.5, 1e-14);
}

TEST(Stats, StudentTQuantileReferenceValues) {
  EXPECT_NEAR(student_t_quantile(0.95, 4), 2.131846786, 1e-8);
  EXPECT_NEAR(student_t_quantile(0.95, 9), 1.833112933, 1e-8);
  EXPECT_NEAR(student_t_quantile(0.95, 29), 1.699127027, 1e-8);
  EXPECT_NEAR(student_t_quantile(0.95, 99), 1.660391156, 1e-8);
}

TEST(Stats, QuantileInvertsCdf) {
  for (int df : {2, 5, 17, 60}) {
    for (double p : {0.6, 0.9, 0.95, 0.99}) {
      const double t = student_t_quantile(p, df);
      EXPECT_NEAR(student_t_cdf(t, df), p, 1e-8);
    }
  }
  EXPECT_THROW(student_t_quantile(1.0, 5), std::domain_error);
  EXPECT_THROW(student_t_quantile(0.5, 0), std::domain_error);
}

TEST(Stats, OneSidedTTestRejectsClearShift) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.05, 0.01);
  std::vector<double> sample(100);
  for (double& x : sample) x = noise(rng);
  const TTestResult result = one_sided_t_test(sample, 0.0);
  EXPECT_TRUE(result.reject_null);
  EXPECT_GT(result.t_statistic, result.critical_value);
  EXPECT_LT(result.p_value, 1e-6);
  EXPECT_EQ(result.degrees_of_freedom, 99);
}

TEST(Stats, OneSidedTTestKeepsNullOnCenteredSample) {
  const TTestResult result =
      one_sided_t_test({-0.1, 0.1, -0.05, 0.05, 0.0, 0.02, -0.02}, 0.0);
  EXPECT_FALSE(result.reject_null);
}

TEST(Stats, OneSidedTTestPreconditions) {
  EXPECT_THROW(one_sided_t_test({1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(one_sided_t_test({2.0, 2.0, 2.0}, 0.0), std::invalid_argument);
}

TEST(LeastSquares, SolvesLinearProblemInOneStep) {
  // residuals r_i = p0 + p1*x_i - y_i for y = 3 + 2x
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
  auto fn = [&](const std::vector<double>& p, std::vector<double>& r,
                std::vector<double>& jac) {
    r.resize(xs.size());
    jac.resize(2 * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      r[i] = p[0] + p[1] * xs[i] - (3.0 + 2.0 * xs[i]);
      jac[2 * i] = 1.0;
      jac[2 * i + 1] = xs[i];
    }
  };
  const LeastSquaresResult result = levenberg_fit(fn, {0.0, 0.0});
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.parameters[0], 3.0, 1e-8);
  EXPECT_NEAR(result.parameters[1], 2.0, 1e-8);
  EXPECT_LT(result.cost, 1e-16);
}

TEST(LeastSquares, RecoversExponentialDecayRate) {
  const double true_rate = 0.7;
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(std::exp(-true_rate * xs.back()));
  }
  auto fn = [&](const std::vector<double>& p, std::vector<double>& r,
                std::vector<double>& jac) {
    r.resize(xs.size());
    jac.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double model = std::exp(-p[0] * xs[i]);
      r[i] = model - ys[i];
      jac[i] = -xs[i] * model;
    }
  };
  const LeastSquaresResult result = levenberg_fit(fn, {2.0});
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.parameters[0], true_rate, 1e-7);
}

TEST(LeastSquares, AcceptedCostTraceIsMonotone) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> xs, ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(0.05 * i);
    ys.push_back(2.0 * std::exp(-1.3 * xs.back()) + noise(rng));
  }
  auto fn = [&](const std::vector<double>& p, std::vector<double>& r,
                std::vector<double>& jac) {
    r.resize(xs.size());
    jac.resize(2 * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = std::exp(-p[1] * xs[i]);
      r[i] = p[0] * e - ys[i];
      jac[2 * i] = e;
      jac[2 * i + 1] = -p[0] * xs[i] * e;
    }
  };
  const LeastSquaresResult result = levenberg_fit(fn, {1.0, 0.2});
  ASSERT_GE(result.cost_trace.size(), 2u);
  for (std::size_t i = 1; i < result.cost_trace.size(); ++i) {
    EXPECT_LE(result.cost_trace[i], result.cost_trace[i - 1] + 1e-15);
  }
  EXPECT_NEAR(result.parameters[0], 2.0, 0.1);
  EXPECT_NEAR(result.parameters[1], 1.3, 0.1);
}

TEST(LeastSquares, IterationCapRaisesFitErrorWithLastIterate) {
  // residual ignores the parameter's sign structure so the gradient never
  // vanishes: r = exp(p) - 0 has no finite minimizer below the cap when the
  // iteration budget is tiny
  auto fn = [](const std::vector<double>& p, std::vector<double>& r,
               std::vector<double>& jac) {
    r.assign(1, std::exp(p[0]) + 1.0);
    jac.assign(1, std::exp(p[0]));
  };
  LeastSquaresOptions opts;
  opts.max_iterations = 3;
  opts.step_tolerance = 0.0;
  opts.cost_tolerance = 0.0;
  try {
    levenberg_fit(fn, {5.0}, opts);
    FAIL() << "expected fit_error";
  } catch (const fit_error& e) {
    ASSERT_EQ(e.last_parameters.size(), 1u);
    EXPECT_LT(e.last_parameters[0], 5.0);  // progress was made before the cap
  }
}

}  // namespace
