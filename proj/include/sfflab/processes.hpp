#pragma once

// Time evolution U(t + dt) = u(t; dt) U(t) from U(0) = 1, with spectra and
// normalized traces recorded on a schedule expressed in whole steps.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfflab/matrix_kernel.hpp"
#include "sfflab/rng.hpp"

namespace sfflab {

enum class ProcessKind { dbm, cauchy };

std::string to_string(ProcessKind kind);
ProcessKind parse_process_kind(const std::string& name);

/// Re-unitarization cadence along trajectories, in steps.
inline constexpr std::uint64_t kReunitarizeEvery = 100;

struct ProcessSpec {
  ProcessKind kind = ProcessKind::dbm;
  Index dim = 16;
  double dt = 0.01;

  /// Throws InvalidArgument for a dt outside the generator's range.
  void validate() const;
};

/// Steps at which to record. Spectra are recorded at `spectrum_steps`; the
/// normalized trace is recorded at the union of both lists.
struct RecordSchedule {
  std::vector<std::uint64_t> spectrum_steps;
  std::vector<std::uint64_t> trace_steps;

  /// Spectra (and traces) at the steps nearest to the given times.
  static RecordSchedule spectra_at_times(const std::vector<double>& times, double dt);
  /// Traces at every step in [first, last].
  static RecordSchedule traces_every_step(std::uint64_t first, std::uint64_t last);
};

/// Scaling parameter of the ensemble reached after `step` steps: exp(-t/2)
/// for DBM and exactly (1 - dt)^{step/2} for the Cauchy process.
double scaling_parameter(const ProcessSpec& spec, std::uint64_t step);

/// Converts a time to a whole number of steps; throws if t is not on the
/// step grid to within 1e-9 relative.
std::uint64_t steps_for_time(double t, double dt);

struct TraceSample {
  std::uint64_t step = 0;
  double t = 0.0;
  Complex normalized_trace{1.0, 0.0};
  double defect = 0.0;  // measured ||U^+U - 1||_F at this record
};

struct TrajectoryRecord {
  ProcessSpec process;
  SeedSpec seed;
  std::vector<TraceSample> traces;         // strictly increasing steps
  std::vector<EigenphaseSpectrum> spectra;  // parameter = t

  std::vector<double> record_times() const;
};

/// One incremental generator u(t; dt).
UnitaryMatrix process_generator(const ProcessSpec& spec, const SeedSpec& seed);

/// Step k of a trajectory: multiplies by generator sub-stream k of `seed`
/// and re-unitarizes every kReunitarizeEvery steps.
UnitaryMatrix advance(const ProcessSpec& spec, const UnitaryMatrix& u, std::uint64_t k,
                      const SeedSpec& seed);

/// Evolves `steps` steps from `initial` (identity when empty). Step k uses
/// generator sub-stream k of `seed`, independent of any record schedule.
UnitaryMatrix evolve(const ProcessSpec& spec, std::uint64_t steps, const SeedSpec& seed,
                     std::optional<UnitaryMatrix> initial = std::nullopt);

TrajectoryRecord run_trajectory(const ProcessSpec& spec, std::uint64_t steps,
                                const RecordSchedule& schedule, const SeedSpec& seed,
                                std::optional<UnitaryMatrix> initial = std::nullopt);

/// Independent realizations 0..count-1 with seeds {master_seed, index},
/// returned in realization order whatever the worker count.
std::vector<TrajectoryRecord> run_ensemble(const ProcessSpec& spec, std::uint64_t steps,
                                           const RecordSchedule& schedule,
                                           std::uint64_t master_seed, std::size_t count,
                                           int workers = 0);

/// (t, N^{-1} tr U(t)) along one realization.
std::vector<std::pair<double, Complex>> com_trajectory(const TrajectoryRecord& record);

/// tr U^n = sum_l exp(i n phi_l) for n = 1..n_max.
std::vector<Complex> stroboscopic_powers(const EigenphaseSpectrum& spectrum, int n_max);

}  // namespace sfflab
