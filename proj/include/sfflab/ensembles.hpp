#pragma once

// Seeded samplers for the CUE, the GUE, the single-parameter Poisson kernel
// and the incremental generators of the DBM and Cauchy processes. Every
// sampler is a pure function of its arguments.

#include "sfflab/matrix_kernel.hpp"
#include "sfflab/rng.hpp"

namespace sfflab {

/// Scaling parameter a in [0, 1].
class ScalingParameter {
 public:
  explicit ScalingParameter(double a);
  double value() const { return a_; }

 private:
  double a_;
};

/// Haar-distributed unitary via phase-corrected QR of a complex Ginibre matrix.
UnitaryMatrix sample_haar(Index n, const SeedSpec& seed);

/// GUE Hamiltonian with <H_kl H_mn> = delta_kn delta_lm / N.
ComplexMatrix sample_gue(Index n, const SeedSpec& seed);

/// (a + V)(1 + aV)^{-1} with Haar V, built in the eigenbasis of V so that the
/// map stays well conditioned as a -> 1; a = 1 gives the identity exactly.
UnitaryMatrix sample_poisson_kernel(Index n, ScalingParameter a, const SeedSpec& seed);

/// Cayley transform of a fresh GUE matrix with step sqrt(dt); 0 < dt <= 0.1.
UnitaryMatrix dbm_generator(Index n, double dt, const SeedSpec& seed);

/// (sqrt(1-dt) + V)(sqrt(1-dt) V + 1)^{-1} with Haar V; 0 < dt < 1.
UnitaryMatrix cauchy_generator(Index n, double dt, const SeedSpec& seed);

/// The scalar Poisson-kernel map z -> (a + z)/(1 + a z).
inline Complex mobius(double a, Complex z) { return (a + z) / (1.0 + a * z); }

}  // namespace sfflab
