#include "sfflab/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfflab/error.hpp"

namespace sfflab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_open_unit(double a, const char* what) {
  if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument(std::string(what) + ": a must lie in [0, 1)");
}

// Largest double below pi, so that CDF values of exactly 1 stay in [-pi, pi).
double clamp_phase(double psi) {
  static const double top = std::nextafter(kPi, 0.0);
  return std::clamp(psi, -kPi, top);
}

double phase_from_unit(Complex z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) {
    throw NumericalFailure("mobius: image left the unit circle");
  }
  return wrap_phase(std::arg(z));
}

double apply_stage(const UnfoldStage& stage, double phi) {
  return std::visit(
      overloaded{
          [phi](const MobiusToUniform& s) { return mobius_phase(phi, s.a, MobiusDirection::to_uniform); },
          [phi](const MobiusFromUniform& s) {
            return mobius_phase(phi, s.a, MobiusDirection::from_uniform);
          },
          [phi](const IntegratedDos& s) { return clamp_phase(kTwoPi * s.rho.cdf(phi) - kPi); },
          [phi](const EmpiricalPooledCdf& s) { return clamp_phase(kTwoPi * (*s.cdf)(phi) - kPi); },
      },
      stage);
}

void check_density(const DensityModel& rho) {
  const double mass = rho.cdf(kPi) - rho.cdf(-kPi);
  if (std::abs(mass - 1.0) > 1e-8) throw InvalidArgument("unfold: density is not normalized");
  if (!rho.nonnegative()) throw InvalidArgument("unfold: density is negative on the grid");
}

}  // namespace

double mobius_phase(double phi, double a, MobiusDirection direction) {
  require_open_unit(a, "mobius_phase");
  const Complex z = std::polar(1.0, phi);
  const Complex w = direction == MobiusDirection::to_uniform ? (z - a) / (1.0 - a * z)
                                                              : (z + a) / (1.0 + a * z);
  return phase_from_unit(w);
}

UnitaryMatrix mobius_matrix(const UnitaryMatrix& u, double a, double a_prime) {
  require_open_unit(a, "mobius_matrix");
  require_open_unit(a_prime, "mobius_matrix");
  const double denom = 1.0 - a * a_prime;
  if (std::abs(denom) < 1e-12) throw InvalidArgument("mobius_matrix: 1 - a a' vanishes");
  const double s = (a - a_prime) / denom;
  if (s == 0.0) return u;
  const UnitaryEigensystem es = eigensystem(u);
  std::vector<Complex> mapped;
  mapped.reserve(es.phases.size());
  for (double phi : es.phases) {
    const Complex z = std::polar(1.0, phi);
    const Complex w = (z - s) / (1.0 - s * z);
    mapped.push_back(w / std::abs(w));
  }
  return UnitaryMatrix::from_matrix(compose_spectral(es.vectors, mapped));
}

EmpiricalCdf::EmpiricalCdf(const std::vector<EigenphaseSpectrum>& spectra) {
  std::size_t total = 0;
  for (const auto& s : spectra) total += s.dim();
  pool_.reserve(total);
  for (const auto& s : spectra) pool_.insert(pool_.end(), s.phases.begin(), s.phases.end());
  std::sort(pool_.begin(), pool_.end());
  if (pool_.empty()) throw InvalidArgument("EmpiricalCdf: empty pool");
}

double EmpiricalCdf::operator()(double phi) const {
  const auto lo = std::lower_bound(pool_.begin(), pool_.end(), phi);
  const auto hi = std::upper_bound(lo, pool_.end(), phi);
  const double below = static_cast<double>(lo - pool_.begin());
  const double equal = static_cast<double>(hi - lo);
  return (below + 0.5 * (equal + 1.0)) / (static_cast<double>(pool_.size()) + 1.0);
}

UnfoldPlan::UnfoldPlan(std::vector<UnfoldStage> stages) : stages_(std::move(stages)) {
  for (const auto& st : stages_) {
    std::visit(overloaded{
                   [](const MobiusToUniform& s) { require_open_unit(s.a, "UnfoldPlan"); },
                   [](const MobiusFromUniform& s) { require_open_unit(s.a, "UnfoldPlan"); },
                   [](const IntegratedDos& s) { check_density(s.rho); },
                   [](const EmpiricalPooledCdf& s) {
                     if (!s.cdf) throw InvalidArgument("UnfoldPlan: empty empirical CDF");
                   },
               },
               st);
  }
}

std::string to_string(DbmDensity method) {
  return method == DbmDensity::empirical ? "empirical" : "analytic";
}

DbmDensity parse_dbm_density(const std::string& name) {
  if (name == "empirical") return DbmDensity::empirical;
  if (name == "analytic") return DbmDensity::analytic;
  throw InvalidArgument("unknown DBM density '" + name + "' (expected empirical or analytic)");
}

UnfoldPlan UnfoldPlan::dbm_uniformizer(double t, const std::vector<EigenphaseSpectrum>& pool,
                                       DbmDensity method) {
  if (method == DbmDensity::analytic) {
    DensityModel rho = DensityModel::dbm(t);
    if (rho.nonnegative()) return UnfoldPlan({IntegratedDos{std::move(rho)}});
  }
  if (pool.size() < kMinEmpiricalSpectra) {
    throw InvalidArgument("dbm_uniformizer: need at least 100 spectra for the pooled CDF");
  }
  return UnfoldPlan({EmpiricalPooledCdf{std::make_shared<const EmpiricalCdf>(pool)}});
}

UnfoldPlan UnfoldPlan::then(UnfoldStage stage) const {
  std::vector<UnfoldStage> next = stages_;
  next.push_back(std::move(stage));
  return UnfoldPlan(std::move(next));
}

EigenphaseSpectrum UnfoldPlan::apply(const EigenphaseSpectrum& spectrum) const {
  EigenphaseSpectrum out = spectrum;
  for (double& phi : out.phases) {
    for (const auto& st : stages_) phi = apply_stage(st, phi);
  }
  std::sort(out.phases.begin(), out.phases.end());
  out.frame = output_frame(spectrum.frame);
  return out;
}

std::vector<EigenphaseSpectrum> UnfoldPlan::apply(const std::vector<EigenphaseSpectrum>& spectra) const {
  std::vector<EigenphaseSpectrum> out;
  out.reserve(spectra.size());
  for (const auto& s : spectra) out.push_back(apply(s));
  return out;
}

bool UnfoldPlan::uses_empirical() const {
  return std::any_of(stages_.begin(), stages_.end(), [](const UnfoldStage& s) {
    return std::holds_alternative<EmpiricalPooledCdf>(s);
  });
}

Frame UnfoldPlan::output_frame(const Frame& input) const {
  Frame f = input;
  for (const auto& st : stages_) {
    if (const auto* from = std::get_if<MobiusFromUniform>(&st)) {
      f = from->a == 0.0 ? Frame::uniform() : Frame::scaling(from->a);
    } else {
      f = Frame::uniform();
    }
  }
  return f;
}

std::string UnfoldPlan::describe() const {
  if (stages_.empty()) return "none";
  std::ostringstream os;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (i) os << " > ";
    std::visit(overloaded{
                   [&os](const MobiusToUniform& s) { os << "mobius_to_uniform(a=" << s.a << ")"; },
                   [&os](const MobiusFromUniform& s) { os << "mobius_from_uniform(a=" << s.a << ")"; },
                   [&os](const IntegratedDos& s) { os << "integrated_dos[" << s.rho.describe() << "]"; },
                   [&os](const EmpiricalPooledCdf& s) {
                     os << "empirical_pooled_cdf(pool=" << s.cdf->pool_size() << ")";
                   },
               },
               stages_[i]);
  }
  return os.str();
}

EigenphaseSpectrum unfold_integrated_dos(const EigenphaseSpectrum& spectrum, const DensityModel& rho) {
  return UnfoldPlan({IntegratedDos{rho}}).apply(spectrum);
}

std::vector<EigenphaseSpectrum> unfold_empirical(const std::vector<EigenphaseSpectrum>& spectra) {
  if (spectra.size() < kMinEmpiricalSpectra) {
    throw InvalidArgument("unfold_empirical: need at least 100 spectra, got " +
                          std::to_string(spectra.size()));
  }
  return UnfoldPlan({EmpiricalPooledCdf{std::make_shared<const EmpiricalCdf>(spectra)}}).apply(spectra);
}

EigenphaseSpectrum two_stage_unfold(const EigenphaseSpectrum& spectrum, const UnfoldStage& stage1,
                                    double a_target) {
  require_open_unit(a_target, "two_stage_unfold");
  std::vector<UnfoldStage> stages{stage1};
  if (a_target != 0.0) stages.push_back(MobiusFromUniform{a_target});
  return UnfoldPlan(std::move(stages)).apply(spectrum);
}

}  // namespace sfflab
