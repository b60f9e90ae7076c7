#include "sfflab/spectral_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "sfflab/error.hpp"

namespace sfflab {
namespace {

constexpr int kDensityGrid = 4096;
constexpr int kMomentCap = 4096;
constexpr std::size_t kMaxDftSize = std::size_t{1} << 24;

void require_unit_interval(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw InvalidArgument(std::string(what) + ": a must lie in [0, 1]");
  }
}

std::size_t dft_size(double a, int n, int q_max) {
  const double base = 8.0 * std::max({n, q_max, 64});
  // Coefficients fall off like q^{n-1} a^q; the tail term keeps aliased
  // copies below ~1e-17 when n is small and a is close to 1.
  const double tail = a > 0.0 ? 40.0 / -std::log(a) : 0.0;
  const double band = 4.0 * n * (1.0 + a) / (1.0 - a) + tail + 4.0 * q_max + 64.0;
  const double need = std::max(base, band);
  if (!(need <= static_cast<double>(kMaxDftSize))) {
    throw InvalidArgument("coeff_cqn: a too close to 1 for n = " + std::to_string(n));
  }
  std::size_t m = 1;
  while (static_cast<double>(m) < need) m <<= 1;
  return m;
}

// L^{(1)}_{k}(x) for k = n - 1, returned as mantissa and log scale.
std::pair<double, double> laguerre1(int k, double x) {
  double prev = 1.0;
  if (k == 0) return {prev, 0.0};
  double cur = 2.0 - x;
  double log_scale = 0.0;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 2.0 - x) * cur - (j + 1.0) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return {cur, log_scale};
}

}  // namespace

std::vector<double> coeff_cqn(double a, int n, int q_max) {
  require_unit_interval(a, "coeff_cqn");
  if (n < 0 || q_max < 0) throw InvalidArgument("coeff_cqn: n and q_max must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(q_max) + 1, 0.0);
  if (n == 0 || a == 1.0) {
    c[0] = 1.0;
    return c;
  }
  const std::size_t m = dft_size(a, n, q_max);
  std::vector<Complex> f(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
    const Complex z = std::polar(1.0, -phi);
    const double theta = std::arg((a + z) / (1.0 + a * z));
    f[j] = std::polar(1.0, n * theta);
  }
  for (int q = 0; q <= q_max; ++q) {
    Complex sum(0.0, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = (j * static_cast<std::size_t>(q)) % m;
      sum += f[j] * std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(m));
    }
    sum /= static_cast<double>(m);
    if (std::abs(sum.imag()) > 1e-8) {
      throw NumericalFailure("coeff_cqn: imaginary residue " + std::to_string(sum.imag()) +
                             " at q = " + std::to_string(q));
    }
    c[static_cast<std::size_t>(q)] = sum.real();
  }
  return c;
}

double analytic_sff(double a, Index dim, int n) {
  require_unit_interval(a, "analytic_sff");
  if (dim < 1) throw InvalidArgument("analytic_sff: N must be >= 1");
  if (n < 0) throw InvalidArgument("analytic_sff: n must be >= 0");
  const double nn = static_cast<double>(dim);
  if (n == 0 || a == 1.0) return nn * nn;
  const std::vector<double> c = coeff_cqn(a, n, static_cast<int>(dim) - 1);
  double sum = 0.0;
  for (Index q = 1; q < dim; ++q) {
    const double cq = c[static_cast<std::size_t>(q)];
    sum += static_cast<double>(dim - q) * cq * cq;
  }
  return nn + nn * (nn - 1.0) * std::pow(a, 2.0 * n) - sum;
}

double cue_form_factor(Index dim, int n) {
  if (dim < 1 || n < 0) throw InvalidArgument("cue_form_factor: need N >= 1, n >= 0");
  const double nn = static_cast<double>(dim);
  if (n == 0) return nn * nn;
  return std::min(static_cast<double>(n), nn);
}

DensityModel DensityModel::scaling(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument("dos_scaling: a must lie in [0, 1)");
  DensityModel m;
  m.kind_ = Kind::scaling;
  m.a_ = a;
  m.grid_min_ = m.scan_grid();
  return m;
}

DensityModel DensityModel::cauchy(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("dos_cauchy: t must be > 0");
  DensityModel m = scaling(std::exp(-0.5 * t));
  for (double phi : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double hyper = std::sinh(0.5 * t) / (std::cosh(0.5 * t) - std::cos(phi)) / kTwoPi;
    const double rho = m.density(phi);
    if (std::abs(hyper - rho) > 1e-12 * std::max(1.0, rho)) {
      throw NumericalFailure("dos_cauchy: hyperbolic and scaling forms disagree");
    }
  }
  return m;
}

DensityModel DensityModel::fourier(std::vector<double> moments, bool fejer) {
  for (double v : moments) {
    if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) {
      throw InvalidArgument("dos_fourier: moments must be finite with |A_n| <= 1");
    }
  }
  DensityModel m;
  m.kind_ = Kind::fourier;
  m.fejer_ = fejer;
  const double k = static_cast<double>(moments.size());
  if (fejer) {
    for (std::size_t i = 0; i < moments.size(); ++i) {
      moments[i] *= 1.0 - static_cast<double>(i + 1) / (k + 1.0);
    }
  }
  m.moments_ = std::move(moments);
  m.grid_min_ = m.scan_grid();
  return m;
}

DensityModel DensityModel::dbm(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("dos_dbm: t must be > 0");
  const int n_max = std::clamp(static_cast<int>(std::ceil(40.0 / t)), 16, 512);
  const MomentSeries series = dbm_moments_closed(t, n_max);
  std::vector<double> a(series.values.begin() + 1, series.values.end());
  DensityModel raw = fourier(a, false);
  if (raw.grid_minimum() >= -1e-6) return raw;
  return fourier(std::move(a), true);
}

double DensityModel::density(double phi) const {
  if (kind_ == Kind::scaling) {
    return (1.0 - a_ * a_) / (1.0 + a_ * a_ - 2.0 * a_ * std::cos(phi)) / kTwoPi;
  }
  const Complex step = std::polar(1.0, phi);
  Complex z = step;
  double sum = 0.0;
  for (double c : moments_) {
    sum += c * z.real();
    z *= step;
  }
  return (1.0 + 2.0 * sum) / kTwoPi;
}

double DensityModel::cdf(double phi) const {
  if (kind_ == Kind::scaling) {
    if (phi <= -kPi) return 0.0;
    if (phi >= kPi) return 1.0;
    const double k = (1.0 + a_) / (1.0 - a_);
    return 0.5 + std::atan(k * std::tan(0.5 * phi)) / kPi;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < moments_.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    sum += moments_[i] * std::sin(n * phi) / n;
  }
  return (phi + kPi) / kTwoPi + sum / kPi;
}

double DensityModel::scan_grid() const {
  double lo = density(-kPi);
  for (int j = 1; j < kDensityGrid; ++j) {
    lo = std::min(lo, density(-kPi + kTwoPi * j / kDensityGrid));
  }
  return lo;
}

std::string DensityModel::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::scaling) {
    os << "scaling(a=" << a_ << ")";
  } else {
    os << "fourier(n_max=" << moments_.size() << (fejer_ ? ", fejer" : "") << ")";
  }
  return os.str();
}

MomentSeries dbm_moments_closed(double t, int n_max) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("dbm_moments: t must be >= 0");
  if (n_max < 1 || n_max > kMomentCap) {
    throw InvalidArgument("dbm_moments: n_max must lie in [1, " + std::to_string(kMomentCap) + "]");
  }
  MomentSeries s;
  s.context = MomentContext::dbm_large_n;
  s.parameter = t;
  s.values.assign(static_cast<std::size_t>(n_max) + 1, 1.0);
  for (int n = 1; n <= n_max; ++n) {
    const auto [mant, log_scale] = laguerre1(n - 1, n * t);
    s.values[static_cast<std::size_t>(n)] =
        mant == 0.0 ? 0.0 : mant * std::exp(log_scale - 0.5 * n * t) / n;
  }
  return s;
}

MomentSeries dbm_moments_ode(double t, int n_max, double tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("dbm_moments: t must be >= 0");
  if (n_max < 1 || n_max > kMomentCap) {
    throw InvalidArgument("dbm_moments: n_max must lie in [1, " + std::to_string(kMomentCap) + "]");
  }
  if (!(tol > 0.0)) throw InvalidArgument("dbm_moments_ode: tol must be > 0");
  using State = std::vector<double>;
  State a(static_cast<std::size_t>(n_max), 1.0);  // a[k] = A_{k+1}
  auto rhs = [n_max](const State& x, State& dx, double) {
    for (int n = 1; n <= n_max; ++n) {
      double conv = x[static_cast<std::size_t>(n - 1)];
      for (int l = 1; l < n; ++l) {
        conv += x[static_cast<std::size_t>(l - 1)] * x[static_cast<std::size_t>(n - l - 1)];
      }
      dx[static_cast<std::size_t>(n - 1)] = -0.5 * n * conv;
    }
  };
  if (t > 0.0) {
    namespace odeint = boost::numeric::odeint;
    const double inner = std::max(1e-14, 1e-2 * tol);
    try {
      odeint::integrate_adaptive(
          odeint::make_controlled(inner, inner, odeint::runge_kutta_dopri5<State>()), rhs, a, 0.0,
          t, std::min(1e-3, t));
    } catch (const std::exception& e) {
      throw NumericalFailure(std::string("dbm_moments_ode: integration failed: ") + e.what());
    }
  }
  MomentSeries s;
  s.context = MomentContext::dbm_large_n;
  s.parameter = t;
  s.values.reserve(a.size() + 1);
  s.values.push_back(1.0);
  s.values.insert(s.values.end(), a.begin(), a.end());
  return s;
}

MomentSeries scaling_moments(double a, int n_max) {
  require_unit_interval(a, "scaling_moments");
  if (n_max < 0) throw InvalidArgument("scaling_moments: n_max must be >= 0");
  MomentSeries s;
  s.context = MomentContext::scaling;
  s.parameter = a;
  s.values.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) s.values[static_cast<std::size_t>(n)] = std::pow(a, n);
  return s;
}

DecayRates analytic_decay(ProcessKind process, Index dim) {
  if (dim < 1) throw InvalidArgument("analytic_decay: N must be >= 1");
  DecayRates r;
  r.gamma0 = 0.5;
  const double n = static_cast<double>(dim);
  r.gamma_n.push_back({1, process == ProcessKind::dbm ? 1.0 : n / (n + 1.0), 0.0});
  return r;
}

std::string to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::saturates: return "saturates";
    case BoundStatus::satisfies: return "satisfies";
    case BoundStatus::violates: return "violates";
  }
  return "unknown";
}

std::vector<BoundReport> chaos_bound_check(const DecayRates& rates, double slack) {
  if (!rates.gamma0) throw InvalidArgument("chaos_bound_check: gamma0 is missing");
  if (rates.gamma_n.empty()) throw InvalidArgument("chaos_bound_check: no gamma_n given");
  if (!(slack >= 0.0)) throw InvalidArgument("chaos_bound_check: slack must be >= 0");
  std::vector<BoundReport> out;
  for (const DecayRate& g : rates.gamma_n) {
    const double limit = 2.0 * g.n * *rates.gamma0;
    const double se = std::hypot(g.std_err, 2.0 * g.n * rates.gamma0_std_err);
    const double tol = slack * se + 1e-12 * std::max(1.0, limit);
    BoundStatus status = BoundStatus::satisfies;
    if (std::abs(g.rate - limit) <= tol) {
      status = BoundStatus::saturates;
    } else if (g.rate > limit) {
      status = BoundStatus::violates;
    }
    out.push_back({g.n, g.rate, limit, status});
  }
  return out;
}

}  // namespace sfflab
