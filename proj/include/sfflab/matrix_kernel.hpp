#pragma once

// Dense complex kernels for small unitary matrices: products, the Cayley
// transform, eigenphase extraction and re-unitarization.

#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sfflab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest unitarity defect tolerated at externally visible points.
inline constexpr double kVisibleDefect = 1e-8;

/// Maps any real phase onto [-pi, pi).
double wrap_phase(double phi);

/// Frobenius norm of M^dagger M - 1; an upper bound on the operator norm.
double unitarity_defect(const ComplexMatrix& m);

/// A square complex matrix together with an upper bound on its unitarity
/// defect. Values are immutable once constructed.
class UnitaryMatrix {
 public:
  /// Measures the defect of `m` and stores it as the bound.
  static UnitaryMatrix from_matrix(ComplexMatrix m);
  /// Trusts the caller-supplied bound.
  static UnitaryMatrix with_bound(ComplexMatrix m, double defect_bound);
  static UnitaryMatrix identity(Index n);

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double defect() const { return defect_; }
  /// Recomputes ||U^dagger U - 1||_F from the entries.
  double measured_defect() const { return unitarity_defect(m_); }
  Complex trace() const { return m_.trace(); }

 private:
  UnitaryMatrix(ComplexMatrix m, double defect) : m_(std::move(m)), defect_(defect) {}

  ComplexMatrix m_;
  double defect_ = 0.0;
};

enum class FrameKind { raw, uniform, scaling };

/// Which density an eigenphase spectrum has been mapped onto.
struct Frame {
  FrameKind kind = FrameKind::raw;
  double a = 0.0;  // only meaningful for FrameKind::scaling

  static Frame raw() { return {}; }
  static Frame uniform() { return {FrameKind::uniform, 0.0}; }
  static Frame scaling(double a) { return {FrameKind::scaling, a}; }

  bool operator==(const Frame&) const = default;
  std::string label() const;
};

/// Sorted eigenphases of one realization, each in [-pi, pi).
struct EigenphaseSpectrum {
  std::vector<double> phases;
  Frame frame;
  double parameter = 0.0;  // time t or scaling parameter a
  std::uint64_t realization = 0;

  std::size_t dim() const { return phases.size(); }
  /// Throws InvalidArgument unless sorted and inside [-pi, pi).
  void validate() const;
};

/// Eigenphases (unsorted) and an orthonormal eigenbasis of a unitary matrix:
/// U ~= vectors * diag(exp(i phases)) * vectors^dagger.
struct UnitaryEigensystem {
  std::vector<double> phases;
  ComplexMatrix vectors;
};

UnitaryMatrix multiply(const UnitaryMatrix& a, const UnitaryMatrix& b);

/// (1 - i s H / 2)(1 + i s H / 2)^{-1} for Hermitian H and s >= 0.
UnitaryMatrix cayley(const ComplexMatrix& h, double s);

EigenphaseSpectrum eigenphases(const UnitaryMatrix& u);

UnitaryEigensystem eigensystem(const UnitaryMatrix& u);

/// Rebuilds vectors * diag(values) * vectors^dagger.
ComplexMatrix compose_spectral(const ComplexMatrix& vectors, const std::vector<Complex>& values);

/// Polar projection onto the unitary group.
UnitaryMatrix reunitarize(const UnitaryMatrix& u);

}  // namespace sfflab
