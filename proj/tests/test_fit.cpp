#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "downwash/downwash.hpp"

namespace {

using namespace downwash;

RadialProfile profile_from_model(double s_norm, double u_c, double r_half,
                                 int bins, double r_max, unsigned seed = 0,
                                 double noise_sigma = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  RadialProfile profile;
  profile.s_norm = s_norm;
  for (int i = 0; i < bins; ++i) {
    RadialBin bin;
    bin.r_norm = r_max * i / (bins - 1);
    bin.speed_norm = similarity_profile(bin.r_norm / r_half, u_c);
    if (noise_sigma > 0.0) bin.speed_norm *= 1.0 + noise(rng);
    bin.count = 4;
    profile.bins.push_back(bin);
  }
  return profile;
}

TEST(FitSlice, NoiselessRecoveryWithinTenthPercent) {
  const JetParameters params;
  const double u_c = centerline_velocity_norm(3.0, params);
  const double r_half = half_width_norm(3.0, params);
  const SliceFit fit = fit_slice(profile_from_model(3.0, u_c, r_half, 25, 3.0));
  EXPECT_NEAR(fit.u_c_norm, u_c, 0.001 * u_c);
  EXPECT_NEAR(fit.r_half_norm, r_half, 0.001 * r_half);
  EXPECT_TRUE(fit.in_far_field);
  EXPECT_LT(fit.residual_rms, 1e-8);
}

TEST(FitSlice, NoisyRecoveryWithinFivePercent) {
  const double u_c = 1.1467, r_half = 0.6761;
  const SliceFit fit =
      fit_slice(profile_from_model(3.0, u_c, r_half, 50, 3.4, 12345, 0.05));
  EXPECT_NEAR(fit.u_c_norm, u_c, 0.05 * u_c);
  EXPECT_NEAR(fit.r_half_norm, r_half, 0.05 * r_half);
}

TEST(FitSlice, CostTraceNeverIncreases) {
  const SliceFit fit =
      fit_slice(profile_from_model(3.0, 1.1, 0.7, 40, 3.0, 777, 0.08));
  ASSERT_FALSE(fit.cost_trace.empty());
  for (std::size_t i = 1; i < fit.cost_trace.size(); ++i) {
    EXPECT_LE(fit.cost_trace[i], fit.cost_trace[i - 1] + 1e-15);
  }
}

TEST(FitSlice, ZeroProfileIsDegenerate) {
  RadialProfile profile;
  profile.s_norm = 3.0;
  for (int i = 0; i < 8; ++i) {
    RadialBin bin;
    bin.r_norm = 0.2 * i;
    bin.speed_norm = 0.0;
    profile.bins.push_back(bin);
  }
  EXPECT_THROW(fit_slice(profile), fit_error);
}

TEST(FitSlice, NeedsAtLeastThreeBins) {
  RadialProfile profile;
  profile.s_norm = 3.0;
  for (int i = 0; i < 2; ++i) {
    RadialBin bin;
    bin.r_norm = 0.3 * i;
    bin.speed_norm = 1.0 - 0.4 * i;
    profile.bins.push_back(bin);
  }
  EXPECT_THROW(fit_slice(profile), std::invalid_argument);
}

TEST(FitSlice, NearFieldSliceFlagged) {
  const SliceFit fit = fit_slice(profile_from_model(1.8, 0.9, 0.5, 20, 2.0));
  EXPECT_FALSE(fit.in_far_field);
}

std::vector<SliceFit> slices_from_law(const JetParameters& params,
                                      const std::vector<double>& stations,
                                      unsigned seed = 0, double noise_sigma = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  std::vector<SliceFit> slices;
  for (double s : stations) {
    SliceFit slice;
    slice.s_norm = s;
    slice.u_c_norm = centerline_velocity_norm(s, params);
    slice.r_half_norm = half_width_norm(s, params);
    if (noise_sigma > 0.0) {
      slice.u_c_norm *= 1.0 + noise(rng);
      slice.r_half_norm *= 1.0 + noise(rng);
      slice.residual_rms = 0.01;
    }
    slice.in_far_field = s >= far_field_min_s_norm;
    slices.push_back(slice);
  }
  return slices;
}

TEST(FitJet, ExactSlicesRecoverDefaults) {
  const JetParameters truth;
  const JetParameters fitted = fit_jet_parameters(
      slices_from_law(truth, {2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0}));
  EXPECT_NEAR(fitted.bd, truth.bd, 0.005 * truth.bd);
  EXPECT_NEAR(fitted.spreading_rate, truth.spreading_rate,
              0.005 * truth.spreading_rate);
  EXPECT_NEAR(fitted.s0_norm, truth.s0_norm, 0.02 * std::fabs(truth.s0_norm));
}

TEST(FitJet, NoisySlicesRecoverWithinMonteCarloBounds) {
  const JetParameters truth;
  const JetParameters fitted = fit_jet_parameters(
      slices_from_law(truth, {2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0},
                      2024, 0.03));
  EXPECT_NEAR(fitted.bd, truth.bd, 0.05 * truth.bd);
  EXPECT_NEAR(fitted.spreading_rate, truth.spreading_rate,
              0.05 * truth.spreading_rate);
  EXPECT_NEAR(fitted.s0_norm, truth.s0_norm, 0.15 * std::fabs(truth.s0_norm));
}

TEST(FitJet, TwoFarFieldSlicesAreNotEnough) {
  const JetParameters truth;
  auto slices = slices_from_law(truth, {1.5, 2.0, 3.0, 4.0});
  EXPECT_THROW(fit_jet_parameters(slices), std::invalid_argument);
}

TEST(FitJet, NearFieldSlicesAreIgnored) {
  const JetParameters truth;
  // corrupt the near-field entries; the fit must not see them
  auto slices = slices_from_law(truth, {1.0, 1.5, 2.0, 2.5, 3.5, 4.5, 5.5, 6.5});
  for (auto& s : slices) {
    if (!s.in_far_field) {
      s.u_c_norm = 99.0;
      s.r_half_norm = 99.0;
    }
  }
  const JetParameters fitted = fit_jet_parameters(slices);
  EXPECT_NEAR(fitted.bd, truth.bd, 0.005 * truth.bd);
}

TEST(FitJet, InverseRmsWeightingDiscountsNoisySlice) {
  const JetParameters truth;
  auto slices =
      slices_from_law(truth, {2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0});
  for (auto& s : slices) s.residual_rms = 0.005;
  // one slice is badly off and marked noisy
  slices[4].u_c_norm *= 1.5;
  slices[4].residual_rms = 0.5;
  const JetParameters weighted =
      fit_jet_parameters(slices, far_field_min_s_norm, SliceWeighting::inverse_rms);
  const JetParameters uniform =
      fit_jet_parameters(slices, far_field_min_s_norm, SliceWeighting::uniform);
  EXPECT_LT(std::fabs(weighted.bd - truth.bd), std::fabs(uniform.bd - truth.bd));
  EXPECT_NEAR(weighted.bd, truth.bd, 0.02 * truth.bd);
}

YProfile bimodal_profile(double s_norm, double amplitude, double delta,
                         double sigma, double y_max, int bins,
                         unsigned seed = 0, double noise_sigma = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  YProfile profile;
  profile.s_norm = s_norm;
  for (int i = 0; i < bins; ++i) {
    RadialBin bin;
    bin.r_norm = -y_max + 2.0 * y_max * i / (bins - 1);
    const double dm = bin.r_norm - delta, dp = bin.r_norm + delta;
    bin.speed_norm =
        amplitude * (std::exp(-0.5 * dm * dm / (sigma * sigma)) +
                     std::exp(-0.5 * dp * dp / (sigma * sigma)));
    if (noise_sigma > 0.0) bin.speed_norm *= 1.0 + noise(rng);
    bin.count = 3;
    profile.bins.push_back(bin);
  }
  return profile;
}

TEST(FitBimodal, RecoversSeparationWithinTwoPercent) {
  const BimodalFit fit =
      fit_bimodal(bimodal_profile(1.0, 0.5, 0.35, 0.2, 1.2, 25));
  EXPECT_NEAR(fit.delta_norm, 0.35, 0.02 * 0.35);
  EXPECT_NEAR(fit.width, 0.2, 0.02 * 0.2);
  EXPECT_NEAR(fit.amplitude, 0.5, 0.02 * 0.5);
}

TEST(FitBimodal, UnimodalTruthCollapsesDelta) {
  const BimodalFit fit =
      fit_bimodal(bimodal_profile(2.4, 0.5, 0.0, 0.25, 1.2, 25));
  EXPECT_LE(fit.delta_norm, 0.02);
}

TEST(FitBimodal, MirrorSymmetryInY) {
  const YProfile original = bimodal_profile(1.0, 0.5, 0.3, 0.2, 1.2, 24, 5, 0.04);
  YProfile mirrored = original;
  for (auto& bin : mirrored.bins) bin.r_norm = -bin.r_norm;
  std::reverse(mirrored.bins.begin(), mirrored.bins.end());
  const BimodalFit a = fit_bimodal(original);
  const BimodalFit b = fit_bimodal(mirrored);
  EXPECT_NEAR(a.delta_norm, b.delta_norm, 1e-9);
  EXPECT_NEAR(a.width, b.width, 1e-9);
}

TEST(FitBimodal, Preconditions) {
  EXPECT_THROW(fit_bimodal(bimodal_profile(1.0, 0.5, 0.3, 0.2, 1.0, 4)),
               std::invalid_argument);
  YProfile one_sided;
  one_sided.s_norm = 1.0;
  for (int i = 0; i < 6; ++i) {
    RadialBin bin;
    bin.r_norm = 0.1 * (i + 1);
    bin.speed_norm = 0.5;
    one_sided.bins.push_back(bin);
  }
  EXPECT_THROW(fit_bimodal(one_sided), std::invalid_argument);
}

std::vector<BimodalFit> fits_at(const std::vector<double>& s,
                                const std::vector<double>& delta) {
  std::vector<BimodalFit> fits;
  for (std::size_t i = 0; i < s.size(); ++i) {
    BimodalFit fit;
    fit.s_norm = s[i];
    fit.delta_norm = delta[i];
    fit.width = 0.2;
    fit.amplitude = 0.5;
    fits.push_back(fit);
  }
  return fits;
}

TEST(MergeDistance, WorkedExample) {
  const MergeResult result =
      merge_distance(fits_at({0.5, 1.5, 2.5, 3.0}, {0.4, 0.2, 0.01, 0.005}));
  ASSERT_TRUE(result.merged);
  EXPECT_DOUBLE_EQ(result.s_merge_norm, 2.5);
}

TEST(MergeDistance, AllZeroMergesAtFirstStation) {
  const MergeResult result =
      merge_distance(fits_at({0.5, 1.0, 1.5}, {0.0, 0.0, 0.0}));
  ASSERT_TRUE(result.merged);
  EXPECT_DOUBLE_EQ(result.s_merge_norm, 0.5);
}

TEST(MergeDistance, IncreasingSeparationNeverMerges) {
  const MergeResult result =
      merge_distance(fits_at({0.5, 1.5, 2.5, 3.5}, {0.1, 0.2, 0.3, 0.4}));
  EXPECT_FALSE(result.merged);
}

TEST(MergeDistance, TransientDipDoesNotCount) {
  // dips below threshold at 1.5 but recovers; only the final collapse counts
  const MergeResult result = merge_distance(
      fits_at({0.5, 1.5, 2.5, 3.0, 3.5}, {0.4, 0.001, 0.2, 0.002, 0.001}));
  ASSERT_TRUE(result.merged);
  EXPECT_DOUBLE_EQ(result.s_merge_norm, 3.0);
}

TEST(MergeDistance, NeedsThreeFits) {
  EXPECT_THROW(merge_distance(fits_at({0.5, 1.5}, {0.4, 0.2})),
               std::invalid_argument);
}

TEST(ResidualTest, ClearPositiveShiftRejects) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> shift(0.05, 0.01);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 100; ++i) {
    const double xi = 0.5;
    samples.emplace_back(xi, similarity_profile(xi, 1.0) - shift(rng));
  }
  const auto tests = residual_test(samples);
  ASSERT_EQ(tests.size(), 6u);
  EXPECT_TRUE(tests[0].testable);
  EXPECT_TRUE(tests[0].reject_h0);
  EXPECT_EQ(tests[0].n, 100u);
  for (int k = 1; k < 6; ++k) EXPECT_FALSE(tests[k].testable);
}

TEST(ResidualTest, ZeroResidualsNeverReject) {
  std::vector<std::pair<double, double>> samples;
  for (double xi = 0.05; xi < 6.0; xi += 0.05) {
    samples.emplace_back(xi, similarity_profile(xi, 1.0));
  }
  for (const auto& test : residual_test(samples)) {
    EXPECT_FALSE(test.reject_h0);
  }
}

TEST(ResidualTest, SingleSampleIntervalUntestable) {
  const std::vector<std::pair<double, double>> samples{
      {0.5, 0.8}, {1.2, 0.5}, {1.4, 0.45}};
  const auto tests = residual_test(samples);
  EXPECT_FALSE(tests[0].testable);  // n = 1
  EXPECT_EQ(tests[0].n, 1u);
  EXPECT_TRUE(tests[1].testable);  // n = 2
}

TEST(ResidualTest, CollectPairsProfilesWithTheirFits) {
  RadialProfile profile;
  profile.s_norm = 3.0;
  for (int i = 0; i < 5; ++i) {
    RadialBin bin;
    bin.r_norm = 0.3 * i;
    bin.speed_norm = similarity_profile(bin.r_norm / 0.676, 1.147);
    profile.bins.push_back(bin);
  }
  SliceFit fit;
  fit.s_norm = 3.0;
  fit.u_c_norm = 1.147;
  fit.r_half_norm = 0.676;
  const auto samples = collect_profile_residual_samples({profile}, {fit});
  ASSERT_EQ(samples.size(), 5u);
  EXPECT_NEAR(samples[2].first, 0.6 / 0.676, 1e-12);
  EXPECT_NEAR(samples[2].second, similarity_profile(0.6 / 0.676, 1.0), 1e-12);
}

}  // namespace
