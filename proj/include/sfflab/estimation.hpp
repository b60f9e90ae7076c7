#pragma once

// Monte Carlo estimators with standard errors. Each realization contributes
// one sample; reductions run in realization order with pairwise summation,
// so results do not depend on how the samples were produced.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sfflab/matrix_kernel.hpp"
#include "sfflab/spectral_analytics.hpp"

namespace sfflab {

/// stderr = s / sqrt(count) with the Bessel-corrected sample deviation s;
/// zero when count < 2.
struct EstimateWithError {
  double value = 0.0;
  double std_err = 0.0;
  std::size_t count = 0;
};

double pairwise_sum(std::span<const double> values);

EstimateWithError mean_with_error(std::span<const double> samples);

/// Row r holds |tr U^n|^2, n = 1..n_max, for spectrum r.
Eigen::MatrixXd sff_samples(const std::vector<EigenphaseSpectrum>& spectra, int n_max);

/// Mean and standard error of each column of a realization-by-observable matrix.
std::vector<EstimateWithError> column_estimates(const Eigen::MatrixXd& samples);

/// Refuses mixed frames or dimensions.
SffSeries estimate_sff(const std::vector<EigenphaseSpectrum>& spectra, int n_max);

/// Re N^{-1} tr U^n for n = 0..n_max; values[1] estimates a.
MomentSeries estimate_moments(const std::vector<EigenphaseSpectrum>& spectra, int n_max);

struct DecayPoint {
  double t = 0.0;
  double value = 0.0;
  double std_err = 0.0;
};

struct DecayFit {
  double rate = 0.0;
  double std_err = 0.0;    // from the per-point errors, points treated as independent
  double amplitude = 0.0;  // value - plateau extrapolated to t = 0
  std::size_t points = 0;
};

/// Weighted least squares on ln(value - plateau) over points in `window`
/// with value - plateau > 10 stderr; needs at least 5 such points. Exact
/// data (all stderr zero) gets unit weights and a residual-based error.
DecayFit fit_decay(const std::vector<DecayPoint>& series, double plateau,
                   std::pair<double, double> window);

/// Same fit from a realization-by-time sample matrix; the returned stderr
/// propagates the full covariance between time points (delta method), which
/// matters because one trajectory supplies every column.
DecayFit fit_decay_samples(const std::vector<double>& times, const Eigen::MatrixXd& samples,
                           double plateau, std::pair<double, double> window);

struct HistogramDos {
  std::vector<double> edges;  // bins + 1 edges spanning [-pi, pi]
  std::vector<std::size_t> counts;
  std::vector<double> heights;
  std::vector<double> per_bin_se;

  std::size_t bins() const { return counts.size(); }
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
};

/// Pooled normalized histogram; per-bin SE from per-realization heights.
HistogramDos histogram_dos(const std::vector<EigenphaseSpectrum>& spectra, int bins);

}  // namespace sfflab
