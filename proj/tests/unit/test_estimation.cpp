#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sfflab/ensembles.hpp"
#include "sfflab/error.hpp"
#include "sfflab/estimation.hpp"
#include "support.hpp"

using namespace sfflab;
using sfflab::testing::WithinSe;

namespace {

std::vector<EigenphaseSpectrum> haar_spectra(Index dim, std::size_t count, std::uint64_t master) {
  std::vector<EigenphaseSpectrum> out;
  for (std::size_t r = 0; r < count; ++r) out.push_back(eigenphases(sample_haar(dim, {master, r})));
  return out;
}

}  // namespace

TEST(MeanWithError, SmallSample) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto e = mean_with_error(v);
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.std_err, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.count, 4u);
  EXPECT_EQ(mean_with_error(std::vector<double>{7.0}).std_err, 0.0);
  EXPECT_EQ(mean_with_error(std::vector<double>{}).count, 0u);
}

TEST(PairwiseSum, ExactOnIntegersAndAccurateOnSmallTerms) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  std::vector<double> tiny(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(tiny), 0.1 * (1 << 20), 1e-8);
}

TEST(SffSamples, MatchesDirectTraceSums) {
  const auto spectra = haar_spectra(5, 3, 1);
  const Eigen::MatrixXd m = sff_samples(spectra, 40);
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    for (int n = 1; n <= 40; ++n) {
      Complex tr(0.0, 0.0);
      for (double phi : spectra[r].phases) tr += std::polar(1.0, n * phi);
      EXPECT_NEAR(m(static_cast<Index>(r), n - 1), std::norm(tr), 1e-11) << "n=" << n;
    }
  }
  EXPECT_THROW(sff_samples(spectra, 0), InvalidArgument);
}

TEST(EstimateSff, StandardErrorScalesWithRealizations) {
  const auto a = estimate_sff(haar_spectra(8, 2000, 2), 4);
  const auto b = estimate_sff(haar_spectra(8, 4000, 3), 4);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const double ratio = a.points[i].std_err / b.points[i].std_err;
    EXPECT_NEAR(ratio, std::sqrt(2.0), 0.15) << "n=" << a.points[i].n;
    EXPECT_TRUE(WithinSe({b.points[i].value, b.points[i].std_err, 4000}, cue_form_factor(8, a.points[i].n)));
  }
}

TEST(EstimateSff, RefusesMixedFramesAndDimensions) {
  auto spectra = haar_spectra(4, 3, 4);
  spectra[1].frame = Frame::uniform();
  EXPECT_THROW(estimate_sff(spectra, 2), FrameMismatch);
  spectra[1].frame = Frame::raw();
  EXPECT_NO_THROW(estimate_sff(spectra, 2));
  spectra.push_back(eigenphases(sample_haar(5, {4, 9})));
  EXPECT_THROW(estimate_sff(spectra, 2), DimensionMismatch);
  EXPECT_THROW(estimate_sff({spectra[0]}, 2), InvalidArgument);
  auto scaled = haar_spectra(4, 2, 5);
  scaled[0].frame = Frame::scaling(0.3);
  scaled[1].frame = Frame::scaling(0.30000001);
  EXPECT_THROW(estimate_moments(scaled, 2), FrameMismatch);
}

TEST(EstimateMoments, RecoversScalingParameter) {
  std::vector<EigenphaseSpectrum> spectra;
  for (std::size_t r = 0; r < 3000; ++r) {
    spectra.push_back(eigenphases(sample_poisson_kernel(6, ScalingParameter(0.5), {6, r})));
  }
  const MomentSeries m = estimate_moments(spectra, 3);
  EXPECT_EQ(m.context, MomentContext::estimated);
  EXPECT_DOUBLE_EQ(m.values[0], 1.0);
  for (int n = 1; n <= 3; ++n) {
    const auto i = static_cast<std::size_t>(n);
    EXPECT_TRUE(WithinSe({m.values[i], m.std_err[i], 3000}, std::pow(0.5, n))) << n;
  }
}

TEST(FitDecay, ExactExponentialIsRecovered) {
  std::vector<DecayPoint> series;
  for (int j = 0; j <= 30; ++j) {
    const double t = 0.1 * j;
    series.push_back({t, 3.0 + 2.0 * std::exp(-0.7 * t), 0.0});
  }
  const DecayFit f = fit_decay(series, 3.0, {0.0, 3.0});
  EXPECT_NEAR(f.rate, 0.7, 1e-12);
  EXPECT_NEAR(f.amplitude, 2.0, 1e-12);
  EXPECT_LT(f.std_err, 1e-12);
  EXPECT_EQ(f.points, 31u);
}

TEST(FitDecay, WindowAndSignalFilter) {
  std::vector<DecayPoint> series;
  for (int j = 0; j <= 30; ++j) {
    const double t = 0.1 * j;
    series.push_back({t, std::exp(-t), 0.01});
  }
  // Only t <= ln(10) ~ 2.30 clears the ten-sigma filter.
  EXPECT_EQ(fit_decay(series, 0.0, {0.0, 3.0}).points, 24u);
  EXPECT_THROW(fit_decay(series, 0.0, {0.0, 0.35}), InvalidArgument);
  series[3].std_err = 0.0;
  EXPECT_THROW(fit_decay(series, 0.0, {0.0, 3.0}), InvalidArgument);
}

TEST(FitDecay, NoisyDataWithinErrors) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<DecayPoint> series;
  for (int j = 0; j <= 20; ++j) {
    const double t = 0.1 * j;
    const double se = 0.002;
    series.push_back({t, std::exp(-1.3 * t) + se * noise(rng), se});
  }
  const DecayFit f = fit_decay(series, 0.0, {0.0, 2.0});
  EXPECT_LT(std::abs(f.rate - 1.3), 4.0 * f.std_err);
}

TEST(FitDecaySamples, CommonModeNoiseDoesNotMoveTheRate) {
  // Each realization rescales the whole curve; the log-slope is unchanged,
  // which only the covariance-aware error can see.
  const double gamma = 0.8;
  std::vector<double> times;
  for (int j = 0; j <= 20; ++j) times.push_back(0.1 * j);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  Eigen::MatrixXd samples(500, static_cast<Index>(times.size()));
  for (Index r = 0; r < samples.rows(); ++r) {
    const double scale = 1.0 + noise(rng);
    for (Index j = 0; j < samples.cols(); ++j) samples(r, j) = scale * std::exp(-gamma * times[j]);
  }
  const DecayFit f = fit_decay_samples(times, samples, 0.0, {0.0, 2.0});
  EXPECT_NEAR(f.rate, gamma, 1e-12);
  EXPECT_LT(f.std_err, 1e-10);
}

TEST(FitDecaySamples, IndependentNoiseMatchesPointwiseFit) {
  std::vector<double> times;
  for (int j = 0; j <= 20; ++j) times.push_back(0.1 * j);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.05);
  Eigen::MatrixXd samples(4000, static_cast<Index>(times.size()));
  for (Index r = 0; r < samples.rows(); ++r) {
    for (Index j = 0; j < samples.cols(); ++j) samples(r, j) = std::exp(-0.5 * times[j]) + noise(rng);
  }
  const DecayFit joint = fit_decay_samples(times, samples, 0.0, {0.0, 2.0});
  const auto est = column_estimates(samples);
  std::vector<DecayPoint> series;
  for (std::size_t j = 0; j < times.size(); ++j) series.push_back({times[j], est[j].value, est[j].std_err});
  const DecayFit naive = fit_decay(series, 0.0, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(joint.rate, naive.rate);
  EXPECT_NEAR(joint.std_err / naive.std_err, 1.0, 0.15);
  EXPECT_LT(std::abs(joint.rate - 0.5), 4.0 * joint.std_err);
  EXPECT_THROW(fit_decay_samples({0.0}, samples, 0.0, {0.0, 2.0}), DimensionMismatch);
}

TEST(Histogram, NormalizedAndFlatForHaar) {
  const auto spectra = haar_spectra(8, 2000, 10);
  const HistogramDos h = histogram_dos(spectra, 16);
  ASSERT_EQ(h.bins(), 16u);
  double mass = 0.0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    mass += h.heights[b] * (h.edges[b + 1] - h.edges[b]);
    total += h.counts[b];
    EXPECT_TRUE(WithinSe({h.heights[b], h.per_bin_se[b], 2000}, 1.0 / kTwoPi)) << "bin " << b;
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(total, 16000u);
  EXPECT_NEAR(h.center(0), -kPi + kPi / 16.0, 1e-15);
  EXPECT_THROW(histogram_dos(spectra, 4), InvalidArgument);
}
