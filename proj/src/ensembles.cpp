#include "sfflab/ensembles.hpp"

#include <cmath>

#include "sfflab/error.hpp"

namespace sfflab {
namespace {

void require_dim(Index n, const char* what) {
  if (n < 1) throw InvalidArgument(std::string(what) + ": N must be >= 1");
}

UnitaryMatrix spectral_mobius(const UnitaryMatrix& v, double a) {
  const UnitaryEigensystem es = eigensystem(v);
  std::vector<Complex> mapped;
  mapped.reserve(es.phases.size());
  for (double psi : es.phases) mapped.push_back(mobius(a, std::polar(1.0, psi)));
  return UnitaryMatrix::from_matrix(compose_spectral(es.vectors, mapped));
}

}  // namespace

ScalingParameter::ScalingParameter(double a) : a_(a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw InvalidArgument("scaling parameter a must lie in [0, 1]");
  }
}

UnitaryMatrix sample_haar(Index n, const SeedSpec& seed) {
  require_dim(n, "sample_haar");
  NormalSource normal(seed);
  const double scale = std::sqrt(0.5);
  ComplexMatrix z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = normal();
      const double im = normal();
      z(i, j) = Complex(re * scale, im * scale);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  // Divide out the phases of diag(R) so that Q is exactly Haar distributed.
  for (Index j = 0; j < n; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double mag = std::abs(r);
    if (mag > 0.0) q.col(j) *= r / mag;
  }
  return UnitaryMatrix::from_matrix(std::move(q));
}

ComplexMatrix sample_gue(Index n, const SeedSpec& seed) {
  require_dim(n, "sample_gue");
  NormalSource normal(seed);
  const double diag_sd = 1.0 / std::sqrt(static_cast<double>(n));
  const double off_sd = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  ComplexMatrix h(n, n);
  for (Index j = 0; j < n; ++j) {
    h(j, j) = Complex(normal() * diag_sd, 0.0);
    for (Index i = j + 1; i < n; ++i) {
      const double re = normal();
      const double im = normal();
      const Complex v(re * off_sd, im * off_sd);
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

UnitaryMatrix sample_poisson_kernel(Index n, ScalingParameter a, const SeedSpec& seed) {
  require_dim(n, "sample_poisson_kernel");
  if (a.value() == 1.0) return UnitaryMatrix::identity(n);
  UnitaryMatrix v = sample_haar(n, seed);
  if (a.value() == 0.0) return v;
  return spectral_mobius(v, a.value());
}

UnitaryMatrix dbm_generator(Index n, double dt, const SeedSpec& seed) {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw InvalidArgument("dbm_generator: dt must lie in (0, 0.1]");
  }
  return cayley(sample_gue(n, seed), std::sqrt(dt));
}

UnitaryMatrix cauchy_generator(Index n, double dt, const SeedSpec& seed) {
  if (!(dt > 0.0 && dt < 1.0)) {
    throw InvalidArgument("cauchy_generator: dt must lie in (0, 1)");
  }
  const double beta = std::sqrt(1.0 - dt);
  UnitaryMatrix v = sample_haar(n, seed);
  // Direct solve; (beta + V) commutes with (1 + beta V)^{-1}. The condition
  // number is at most (1 + beta)/(1 - beta), so fall back to the eigenbasis
  // construction when the result is not unitary to 1e-12.
  ComplexMatrix lhs = beta * v.matrix();
  ComplexMatrix rhs = v.matrix();
  lhs.diagonal().array() += 1.0;
  rhs.diagonal().array() += beta;
  UnitaryMatrix u = UnitaryMatrix::from_matrix(lhs.partialPivLu().solve(rhs));
  if (u.defect() <= 1e-12) return u;
  return spectral_mobius(v, beta);
}

}  // namespace sfflab
