#pragma once

// Maps between eigenphase frames: Mobius maps between the scaling ensemble
// and the CUE, integrated-density unfolding, and the pooled empirical CDF.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sfflab/matrix_kernel.hpp"
#include "sfflab/spectral_analytics.hpp"

namespace sfflab {

enum class MobiusDirection { to_uniform, from_uniform };

/// to_uniform: lambda -> (lambda - a)/(1 - a lambda); from_uniform is its inverse.
double mobius_phase(double phi, double a, MobiusDirection direction);

/// Carries a sample of the scaling ensemble at `a` to one at `a_prime` by the
/// spectral map lambda -> (lambda - s)/(1 - s lambda), s = (a - a')/(1 - a a').
UnitaryMatrix mobius_matrix(const UnitaryMatrix& u, double a, double a_prime);

/// Pooled ensemble CDF with mid-rank ties: F = (below + (equal + 1)/2)/(T + 1).
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const std::vector<EigenphaseSpectrum>& spectra);

  double operator()(double phi) const;
  std::size_t pool_size() const { return pool_.size(); }

 private:
  std::vector<double> pool_;
};

inline constexpr std::size_t kMinEmpiricalSpectra = 100;

struct MobiusToUniform {
  double a = 0.0;
};
struct MobiusFromUniform {
  double a = 0.0;
};
struct IntegratedDos {
  DensityModel rho;
};
struct EmpiricalPooledCdf {
  std::shared_ptr<const EmpiricalCdf> cdf;
};

using UnfoldStage = std::variant<MobiusToUniform, MobiusFromUniform, IntegratedDos, EmpiricalPooledCdf>;

enum class DbmDensity { empirical, analytic };

std::string to_string(DbmDensity method);
DbmDensity parse_dbm_density(const std::string& name);

class UnfoldPlan {
 public:
  UnfoldPlan() = default;
  explicit UnfoldPlan(std::vector<UnfoldStage> stages);

  /// Uniformizer for DBM spectra at time t. `analytic` uses the large-N
  /// density and drops to the pooled CDF of `pool` if that density is invalid.
  static UnfoldPlan dbm_uniformizer(double t, const std::vector<EigenphaseSpectrum>& pool,
                                    DbmDensity method = DbmDensity::empirical);

  UnfoldPlan then(UnfoldStage stage) const;

  EigenphaseSpectrum apply(const EigenphaseSpectrum& spectrum) const;
  std::vector<EigenphaseSpectrum> apply(const std::vector<EigenphaseSpectrum>& spectra) const;

  const std::vector<UnfoldStage>& stages() const { return stages_; }
  bool uses_empirical() const;
  Frame output_frame(const Frame& input) const;
  std::string describe() const;

 private:
  std::vector<UnfoldStage> stages_;
};

/// phi -> 2 pi CDF(phi) - pi; output frame uniform.
EigenphaseSpectrum unfold_integrated_dos(const EigenphaseSpectrum& spectrum, const DensityModel& rho);

/// Every phase through the pooled CDF of all `spectra`; needs >= 100 spectra.
std::vector<EigenphaseSpectrum> unfold_empirical(const std::vector<EigenphaseSpectrum>& spectra);

/// Stage 1 (density or pooled CDF) to uniform, then from_uniform(a_target).
/// a_target = 0 leaves the stage-1 output, frame uniform.
EigenphaseSpectrum two_stage_unfold(const EigenphaseSpectrum& spectrum, const UnfoldStage& stage1,
                                    double a_target);

}  // namespace sfflab
