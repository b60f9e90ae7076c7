#include "sfflab/matrix_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfflab/error.hpp"

namespace sfflab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Cayley images |h| above this are recomputed with a rotated spectrum; keeps
// the conditioning of 1 + e^{i theta} U at most ~100.
constexpr double kMaxCayleyValue = 100.0;

struct HermitianImage {
  ComplexMatrix h;
  double theta = 0.0;
};

// i (1 - M)(1 + M)^{-1} with M = e^{i theta} U. Eigenvalues tan(alpha / 2)
// where e^{i alpha} are the eigenvalues of M.
HermitianImage hermitian_image(const ComplexMatrix& u, double theta) {
  const Complex rot = std::polar(1.0, theta);
  ComplexMatrix lhs = rot * u;
  ComplexMatrix rhs = -Complex(0.0, 1.0) * lhs;
  lhs.diagonal().array() += 1.0;
  rhs.diagonal().array() += Complex(0.0, 1.0);
  ComplexMatrix h = lhs.partialPivLu().solve(rhs);
  ComplexMatrix sym = 0.5 * (h + h.adjoint());
  return {std::move(sym), theta};
}

// Rotation that places -1 in the middle of the widest gap between phases.
double gap_rotation(std::vector<double> phases) {
  std::sort(phases.begin(), phases.end());
  double best_gap = phases.front() + kTwoPi - phases.back();
  double mid = phases.back() + 0.5 * best_gap;
  for (std::size_t i = 1; i < phases.size(); ++i) {
    const double gap = phases[i] - phases[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      mid = phases[i - 1] + 0.5 * gap;
    }
  }
  return wrap_phase(kPi - mid);
}

template <typename Values>
bool acceptable(const Values& h) {
  for (Index i = 0; i < h.size(); ++i) {
    if (!std::isfinite(h[i]) || std::abs(h[i]) > kMaxCayleyValue) return false;
  }
  return true;
}

template <typename Values>
std::vector<double> phases_from_cayley(const Values& h, double theta) {
  std::vector<double> out(static_cast<std::size_t>(h.size()));
  for (Index i = 0; i < h.size(); ++i) {
    out[static_cast<std::size_t>(i)] = wrap_phase(2.0 * std::atan(h[i]) - theta);
  }
  return out;
}

std::vector<double> general_solver_phases(const ComplexMatrix& u) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(u, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigenphases: general eigensolver did not converge");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(u.rows()));
  for (Index i = 0; i < u.rows(); ++i) {
    const Complex z = solver.eigenvalues()[i];
    if (std::abs(std::abs(z) - 1.0) > 1e-6) {
      throw NumericalFailure("eigenphases: eigenvalue modulus deviates from 1 by more than 1e-6");
    }
    out.push_back(wrap_phase(std::arg(z)));
  }
  return out;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch(std::string(what) + ": matrix must be square with dim >= 1");
  }
}

// Tries the unrotated image first, then rotations chosen from the widest gap.
template <typename Solver, typename Accept>
bool cayley_eigen_attempts(const ComplexMatrix& u, int options, Solver& solver, double& theta,
                           Accept&& accept_values) {
  theta = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    HermitianImage img = hermitian_image(u, theta);
    if (!img.h.allFinite()) {
      theta = wrap_phase(theta + 1.0 + 0.5 * attempt);
      continue;
    }
    solver.compute(img.h, options);
    if (solver.info() != Eigen::Success) {
      theta = wrap_phase(theta + 1.0 + 0.5 * attempt);
      continue;
    }
    const auto& h = solver.eigenvalues();
    if (accept_values(h)) return true;
    bool finite = h.allFinite();
    theta = finite ? gap_rotation(phases_from_cayley(h, theta)) : wrap_phase(theta + 1.0);
  }
  return false;
}

}  // namespace

double wrap_phase(double phi) {
  double r = phi - kTwoPi * std::floor((phi + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return g.norm();
}

UnitaryMatrix UnitaryMatrix::from_matrix(ComplexMatrix m) {
  require_square(m, "UnitaryMatrix");
  const double d = unitarity_defect(m);
  return UnitaryMatrix(std::move(m), d);
}

UnitaryMatrix UnitaryMatrix::with_bound(ComplexMatrix m, double defect_bound) {
  require_square(m, "UnitaryMatrix");
  return UnitaryMatrix(std::move(m), defect_bound);
}

UnitaryMatrix UnitaryMatrix::identity(Index n) {
  if (n < 1) throw InvalidArgument("UnitaryMatrix::identity: dim must be >= 1");
  return UnitaryMatrix(ComplexMatrix::Identity(n, n), 0.0);
}

std::string Frame::label() const {
  switch (kind) {
    case FrameKind::raw:
      return "raw";
    case FrameKind::uniform:
      return "uniform";
    case FrameKind::scaling: {
      std::ostringstream os;
      os.precision(17);
      os << "scaling(" << a << ")";
      return os.str();
    }
  }
  return "raw";
}

void EigenphaseSpectrum::validate() const {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double p = phases[i];
    if (!(p >= -kPi && p < kPi)) {
      throw InvalidArgument("EigenphaseSpectrum: phase outside [-pi, pi)");
    }
    if (i > 0 && p < phases[i - 1]) {
      throw InvalidArgument("EigenphaseSpectrum: phases not sorted");
    }
  }
}

UnitaryMatrix multiply(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("multiply: dimension mismatch");
  }
  ComplexMatrix p = a.matrix() * b.matrix();
  // (AB)^+(AB) - 1 = B^+(A^+A - 1)B + (B^+B - 1), plus rounding in the product.
  const double bound = a.defect() + b.defect() + a.defect() * b.defect() +
                       8.0 * static_cast<double>(a.dim()) * kEps;
  return UnitaryMatrix::with_bound(std::move(p), bound);
}

UnitaryMatrix cayley(const ComplexMatrix& h, double s) {
  require_square(h, "cayley");
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw InvalidArgument("cayley: step s must be finite and >= 0");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("cayley: input is not Hermitian within 1e-12");
  }
  const Index n = h.rows();
  if (s == 0.0) return UnitaryMatrix::identity(n);

  const Complex half_step(0.0, 0.5 * s);
  ComplexMatrix plus = half_step * h;
  ComplexMatrix minus = -plus;
  plus.diagonal().array() += 1.0;
  minus.diagonal().array() += 1.0;
  ComplexMatrix u = plus.partialPivLu().solve(minus);
  if (!u.allFinite()) {
    throw NumericalFailure("cayley: singular 1 + i s H / 2 (internal error)");
  }
  return UnitaryMatrix::from_matrix(std::move(u));
}

EigenphaseSpectrum eigenphases(const UnitaryMatrix& u) {
  const ComplexMatrix& m = u.matrix();
  if (u.defect() > kVisibleDefect && u.measured_defect() > kVisibleDefect) {
    throw InvalidArgument("eigenphases: unitarity defect above 1e-8");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  double theta = 0.0;
  std::vector<double> phases;
  if (cayley_eigen_attempts(m, Eigen::EigenvaluesOnly, solver, theta,
                            [](const auto& h) { return acceptable(h); })) {
    phases = phases_from_cayley(solver.eigenvalues(), theta);
  } else {
    phases = general_solver_phases(m);
  }
  std::sort(phases.begin(), phases.end());

  Complex sum = 0.0;
  for (double p : phases) sum += std::polar(1.0, p);
  if (std::abs(sum - m.trace()) > 1e-8 * static_cast<double>(m.rows())) {
    throw NumericalFailure("eigenphases: trace identity check failed");
  }
  EigenphaseSpectrum out;
  out.phases = std::move(phases);
  return out;
}

UnitaryEigensystem eigensystem(const UnitaryMatrix& u) {
  const ComplexMatrix& m = u.matrix();
  if (u.defect() > kVisibleDefect && u.measured_defect() > kVisibleDefect) {
    throw InvalidArgument("eigensystem: unitarity defect above 1e-8");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  double theta = 0.0;
  if (!cayley_eigen_attempts(m, Eigen::ComputeEigenvectors, solver, theta,
                             [](const auto& h) { return acceptable(h); })) {
    throw NumericalFailure("eigensystem: no well-conditioned Cayley image found");
  }
  return {phases_from_cayley(solver.eigenvalues(), theta), solver.eigenvectors()};
}

ComplexMatrix compose_spectral(const ComplexMatrix& vectors, const std::vector<Complex>& values) {
  if (static_cast<Index>(values.size()) != vectors.cols()) {
    throw DimensionMismatch("compose_spectral: value count does not match basis");
  }
  ComplexMatrix scaled = vectors;
  for (Index j = 0; j < scaled.cols(); ++j) scaled.col(j) *= values[static_cast<std::size_t>(j)];
  return scaled * vectors.adjoint();
}

UnitaryMatrix reunitarize(const UnitaryMatrix& u) {
  double defect = u.defect();
  if (defect > 1e-3) defect = u.measured_defect();
  if (defect > 1e-3) {
    throw InvalidArgument("reunitarize: defect above 1e-3 (process misconfigured?)");
  }
  ComplexMatrix x = u.matrix();
  double current = unitarity_defect(x);
  for (int iter = 0; iter < 30 && current >= 1e-13; ++iter) {
    ComplexMatrix inv_adj = x.partialPivLu().inverse().adjoint();
    ComplexMatrix next = 0.5 * (x + inv_adj);
    const double d = unitarity_defect(next);
    if (iter > 0 && d >= current) break;  // reached the rounding floor
    x = std::move(next);
    current = d;
  }
  if (current > 1e-12) {
    throw NumericalFailure("reunitarize: Newton iteration did not reach defect 1e-12");
  }
  return UnitaryMatrix::with_bound(std::move(x), current);
}

}  // namespace sfflab
