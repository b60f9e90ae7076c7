#include "sfflab/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "sfflab/error.hpp"

namespace sfflab {
namespace {

void require_uniform(const std::vector<EigenphaseSpectrum>& spectra, std::size_t min_count,
                     const char* what) {
  if (spectra.size() < min_count) {
    throw InvalidArgument(std::string(what) + ": need at least " + std::to_string(min_count) +
                          " spectra");
  }
  const auto& first = spectra.front();
  for (const auto& s : spectra) {
    if (!(s.frame == first.frame)) {
      throw FrameMismatch(std::string(what) + ": spectra in frames " + first.frame.label() +
                          " and " + s.frame.label());
    }
    if (s.dim() != first.dim()) throw DimensionMismatch(std::string(what) + ": mixed N");
  }
}

// Index set and slope coefficients k_j of the WLS fit y = c + b t, b = sum k_j y_j.
struct LinearFit {
  std::vector<std::size_t> used;
  std::vector<double> slope_coeff;
  std::vector<double> y;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_var = 0.0;
};

LinearFit weighted_log_fit(const std::vector<DecayPoint>& series, double plateau,
                           std::pair<double, double> window) {
  LinearFit fit;
  std::vector<double> w;
  bool exact = true;
  for (std::size_t j = 0; j < series.size(); ++j) {
    const auto& p = series[j];
    if (p.t < window.first || p.t > window.second) continue;
    const double excess = p.value - plateau;
    if (!(excess > 10.0 * p.std_err) || !(excess > 0.0)) continue;
    fit.used.push_back(j);
    fit.y.push_back(std::log(excess));
    const double rel = p.std_err / excess;
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    exact = exact && p.std_err == 0.0;
  }
  const std::size_t m = fit.used.size();
  if (m < 5) {
    throw InvalidArgument("fit_decay: only " + std::to_string(m) +
                          " points left in the window after the signal-to-noise filter");
  }
  if (!exact) {
    for (std::size_t i = 0; i < m; ++i) {
      if (series[fit.used[i]].std_err == 0.0) {
        throw InvalidArgument("fit_decay: mixed zero and nonzero standard errors");
      }
    }
  }
  double s = 0.0, st = 0.0, stt = 0.0, sy = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = series[fit.used[i]].t;
    s += w[i];
    st += w[i] * t;
    stt += w[i] * t * t;
    sy += w[i] * fit.y[i];
    sty += w[i] * t * fit.y[i];
  }
  const double det = s * stt - st * st;
  if (!(det > 0.0)) throw InvalidArgument("fit_decay: degenerate time window");
  fit.slope = (s * sty - st * sy) / det;
  fit.intercept = (stt * sy - st * sty) / det;
  fit.slope_coeff.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    fit.slope_coeff[i] = w[i] * (s * series[fit.used[i]].t - st) / det;
  }
  fit.slope_var = s / det;
  if (exact) {
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = fit.y[i] - fit.intercept - fit.slope * series[fit.used[i]].t;
      rss += r * r;
    }
    fit.slope_var *= rss / static_cast<double>(m - 2);
  }
  return fit;
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

EstimateWithError mean_with_error(std::span<const double> samples) {
  EstimateWithError e;
  e.count = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.value = pairwise_sum(samples) / n;
  if (samples.size() < 2) return e;
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - e.value;
    dev[i] = d * d;
  }
  e.std_err = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return e;
}

Eigen::MatrixXd sff_samples(const std::vector<EigenphaseSpectrum>& spectra, int n_max) {
  if (n_max < 1) throw InvalidArgument("sff_samples: n_max must be >= 1");
  Eigen::MatrixXd out(static_cast<Index>(spectra.size()), n_max);
  std::vector<Complex> z, p;
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const auto& phases = spectra[r].phases;
    z.resize(phases.size());
    for (std::size_t l = 0; l < phases.size(); ++l) z[l] = std::polar(1.0, phases[l]);
    p = z;
    for (int n = 1; n <= n_max; ++n) {
      Complex tr(0.0, 0.0);
      for (const Complex& x : p) tr += x;
      out(static_cast<Index>(r), n - 1) = std::norm(tr);
      // Fresh polar values every 16 powers keep the recurrence error at ~1e-15.
      if ((n + 1) % 16 == 0) {
        for (std::size_t l = 0; l < phases.size(); ++l) p[l] = std::polar(1.0, (n + 1) * phases[l]);
      } else {
        for (std::size_t l = 0; l < p.size(); ++l) p[l] *= z[l];
      }
    }
  }
  return out;
}

std::vector<EstimateWithError> column_estimates(const Eigen::MatrixXd& samples) {
  std::vector<EstimateWithError> out;
  out.reserve(static_cast<std::size_t>(samples.cols()));
  std::vector<double> col(static_cast<std::size_t>(samples.rows()));
  for (Index j = 0; j < samples.cols(); ++j) {
    for (Index r = 0; r < samples.rows(); ++r) col[static_cast<std::size_t>(r)] = samples(r, j);
    out.push_back(mean_with_error(col));
  }
  return out;
}

SffSeries estimate_sff(const std::vector<EigenphaseSpectrum>& spectra, int n_max) {
  require_uniform(spectra, 2, "estimate_sff");
  const auto est = column_estimates(sff_samples(spectra, n_max));
  SffSeries s;
  s.dim = static_cast<Index>(spectra.front().dim());
  s.parameter = spectra.front().parameter;
  s.frame = spectra.front().frame;
  for (int n = 1; n <= n_max; ++n) {
    const auto& e = est[static_cast<std::size_t>(n - 1)];
    s.points.push_back({n, e.value, e.std_err, false});
  }
  return s;
}

MomentSeries estimate_moments(const std::vector<EigenphaseSpectrum>& spectra, int n_max) {
  require_uniform(spectra, 2, "estimate_moments");
  if (n_max < 1) throw InvalidArgument("estimate_moments: n_max must be >= 1");
  Eigen::MatrixXd samples(static_cast<Index>(spectra.size()), n_max);
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const auto& phases = spectra[r].phases;
    const double dim = static_cast<double>(phases.size());
    for (int n = 1; n <= n_max; ++n) {
      double re = 0.0;
      for (double phi : phases) re += std::cos(n * phi);
      samples(static_cast<Index>(r), n - 1) = re / dim;
    }
  }
  const auto est = column_estimates(samples);
  MomentSeries m;
  m.context = MomentContext::estimated;
  m.parameter = spectra.front().parameter;
  m.values.push_back(1.0);
  m.std_err.push_back(0.0);
  for (const auto& e : est) {
    m.values.push_back(e.value);
    m.std_err.push_back(e.std_err);
  }
  return m;
}

DecayFit fit_decay(const std::vector<DecayPoint>& series, double plateau,
                   std::pair<double, double> window) {
  const LinearFit f = weighted_log_fit(series, plateau, window);
  return {-f.slope, std::sqrt(f.slope_var), std::exp(f.intercept), f.used.size()};
}

DecayFit fit_decay_samples(const std::vector<double>& times, const Eigen::MatrixXd& samples,
                           double plateau, std::pair<double, double> window) {
  if (static_cast<Index>(times.size()) != samples.cols()) {
    throw DimensionMismatch("fit_decay_samples: one column per time point expected");
  }
  if (samples.rows() < 2) throw InvalidArgument("fit_decay_samples: need >= 2 realizations");
  const auto est = column_estimates(samples);
  std::vector<DecayPoint> series;
  series.reserve(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    series.push_back({times[j], est[j].value, est[j].std_err});
  }
  const LinearFit f = weighted_log_fit(series, plateau, window);
  // rate = -sum_j k_j ln(m_j - p); first-order change per realization sample.
  std::vector<double> grad(f.used.size());
  for (std::size_t i = 0; i < f.used.size(); ++i) {
    grad[i] = -f.slope_coeff[i] / (series[f.used[i]].value - plateau);
  }
  std::vector<double> influence(static_cast<std::size_t>(samples.rows()));
  for (Index r = 0; r < samples.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.used.size(); ++i) {
      const auto j = static_cast<Index>(f.used[i]);
      acc += grad[i] * (samples(r, j) - series[f.used[i]].value);
    }
    influence[static_cast<std::size_t>(r)] = acc;
  }
  const EstimateWithError spread = mean_with_error(influence);
  return {-f.slope, spread.std_err, std::exp(f.intercept), f.used.size()};
}

HistogramDos histogram_dos(const std::vector<EigenphaseSpectrum>& spectra, int bins) {
  if (bins < 8) throw InvalidArgument("histogram_dos: need at least 8 bins");
  if (spectra.empty()) throw InvalidArgument("histogram_dos: no spectra");
  const auto nb = static_cast<std::size_t>(bins);
  const double width = kTwoPi / bins;
  HistogramDos h;
  h.edges.resize(nb + 1);
  for (std::size_t b = 0; b <= nb; ++b) h.edges[b] = -kPi + width * static_cast<double>(b);
  h.counts.assign(nb, 0);
  Eigen::MatrixXd per(static_cast<Index>(spectra.size()), bins);
  per.setZero();
  std::size_t total = 0;
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const auto& phases = spectra[r].phases;
    if (phases.empty()) throw InvalidArgument("histogram_dos: empty spectrum");
    const double norm = 1.0 / (static_cast<double>(phases.size()) * width);
    for (double phi : phases) {
      auto b = static_cast<std::size_t>(std::floor((phi + kPi) / width));
      b = std::min(b, nb - 1);
      ++h.counts[b];
      per(static_cast<Index>(r), static_cast<Index>(b)) += norm;
    }
    total += phases.size();
  }
  h.heights.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    h.heights[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(total) * width);
  }
  const auto est = column_estimates(per);
  h.per_bin_se.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) h.per_bin_se[b] = est[b].std_err;
  return h;
}

}  // namespace sfflab
