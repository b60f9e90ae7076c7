#pragma once

// Closed-form and semianalytic quantities of the scaling theory: the
// coefficients c_{q,n}, the stroboscopic SFF K_n(a), mean densities of
// states, the DBM moment hierarchy, CUE form factor and decay rates.

#include <optional>
#include <string>
#include <vector>

#include "sfflab/matrix_kernel.hpp"
#include "sfflab/processes.hpp"

namespace sfflab {

struct SffPoint {
  int n = 0;
  double value = 0.0;
  double std_err = 0.0;
  bool analytic = false;
};

struct SffSeries {
  Index dim = 0;
  double parameter = 0.0;  // a or t, see `frame` and the producer
  Frame frame;
  std::vector<SffPoint> points;
};

enum class MomentContext { scaling, cauchy, dbm_large_n, estimated };

/// values[n] = A_n for n = 0..n_max, with A_0 = 1. `std_err` is empty for
/// analytic series.
struct MomentSeries {
  MomentContext context = MomentContext::scaling;
  double parameter = 0.0;
  std::vector<double> values;
  std::vector<double> std_err;

  int n_max() const { return static_cast<int>(values.size()) - 1; }
};

/// Taylor coefficients c_{q,n}, q = 0..q_max, of ((a + v)/(1 + a v))^n.
std::vector<double> coeff_cqn(double a, int n, int q_max);

/// Stroboscopic SFF of the scaling ensemble. n = 0 returns N^2.
double analytic_sff(double a, Index dim, int n);

/// Piecewise CUE form factor: N^2 at n = 0, n up to N, N beyond.
double cue_form_factor(Index dim, int n);

/// Mean eigenphase density on [-pi, pi).
class DensityModel {
 public:
  enum class Kind { scaling, fourier };

  static DensityModel scaling(double a);
  /// Scaling density with a = exp(-t/2), checked against the hyperbolic form.
  static DensityModel cauchy(double t);
  /// rho = (1 + 2 sum_n w_n A_n cos(n phi)) / 2pi with moments[0] = A_1 and
  /// Fejer weights w_n = 1 - n/(n_max + 1) when `fejer` is set.
  static DensityModel fourier(std::vector<double> moments, bool fejer);
  /// Large-N DBM density at time t: n_max = clamp(ceil(40/t), 16, 512),
  /// Fejer smoothing switched on when the raw partial sum dips below -1e-6.
  static DensityModel dbm(double t);

  double density(double phi) const;
  /// Integral of the density from -pi to phi.
  double cdf(double phi) const;

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  const std::vector<double>& moments() const { return moments_; }
  bool smoothed() const { return fejer_; }
  /// Minimum of the density over a 4096-point grid, computed at construction.
  double grid_minimum() const { return grid_min_; }
  /// Nonnegative to -1e-9 on the grid.
  bool nonnegative() const { return grid_minimum() >= -1e-9; }
  std::string describe() const;

 private:
  DensityModel() = default;

  Kind kind_ = Kind::scaling;
  double a_ = 0.0;
  std::vector<double> moments_;  // weighted, ready to sum
  bool fejer_ = false;
  double grid_min_ = 0.0;

  double scan_grid() const;
};

/// A_n(t) of the large-N DBM, n = 0..n_max, via the Laguerre recurrence.
MomentSeries dbm_moments_closed(double t, int n_max);

/// Same quantity by adaptive integration of the moment hierarchy.
MomentSeries dbm_moments_ode(double t, int n_max, double tol = 1e-10);

/// A_n = a^n for n = 0..n_max.
MomentSeries scaling_moments(double a, int n_max);

struct DecayRate {
  int n = 1;
  double rate = 0.0;
  double std_err = 0.0;
};

struct DecayRates {
  std::optional<double> gamma0;
  double gamma0_std_err = 0.0;
  std::vector<DecayRate> gamma_n;
};

DecayRates analytic_decay(ProcessKind process, Index dim);

enum class BoundStatus { saturates, satisfies, violates };

std::string to_string(BoundStatus status);

struct BoundReport {
  int n = 1;
  double rate = 0.0;
  double limit = 0.0;  // 2 n gamma0
  BoundStatus status = BoundStatus::satisfies;
};

/// Compares each gamma_n with 2 n gamma0, allowing `slack` combined standard
/// errors in either direction before calling a saturation a violation.
std::vector<BoundReport> chaos_bound_check(const DecayRates& rates, double slack);

}  // namespace sfflab
