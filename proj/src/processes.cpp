#include "sfflab/processes.hpp"

#include <algorithm>
#include <cmath>

#include "sfflab/ensembles.hpp"
#include "sfflab/error.hpp"
#include "sfflab/parallel.hpp"

namespace sfflab {
namespace {

std::vector<std::uint64_t> sorted_unique(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

UnitaryMatrix advance(const ProcessSpec& spec, const UnitaryMatrix& u, std::uint64_t k,
                      const SeedSpec& seed) {
  UnitaryMatrix next = multiply(process_generator(spec, seed.substream(k)), u);
  if (k % kReunitarizeEvery == 0) next = reunitarize(next);
  return next;
}

std::string to_string(ProcessKind kind) { return kind == ProcessKind::dbm ? "dbm" : "cauchy"; }

ProcessKind parse_process_kind(const std::string& name) {
  if (name == "dbm") return ProcessKind::dbm;
  if (name == "cauchy") return ProcessKind::cauchy;
  throw InvalidArgument("unknown process kind '" + name + "' (expected dbm or cauchy)");
}

void ProcessSpec::validate() const {
  if (dim < 1) throw InvalidArgument("process: N must be >= 1");
  if (kind == ProcessKind::dbm && !(dt > 0.0 && dt <= 0.1)) {
    throw InvalidArgument("process: DBM requires 0 < dt <= 0.1");
  }
  if (kind == ProcessKind::cauchy && !(dt > 0.0 && dt < 1.0)) {
    throw InvalidArgument("process: Cauchy requires 0 < dt < 1");
  }
}

std::uint64_t steps_for_time(double t, double dt) {
  if (!(t >= 0.0) || !(dt > 0.0)) throw InvalidArgument("steps_for_time: need t >= 0, dt > 0");
  const double k = std::round(t / dt);
  if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, t)) {
    throw InvalidArgument("time " + std::to_string(t) + " is not a multiple of dt");
  }
  return static_cast<std::uint64_t>(k);
}

double scaling_parameter(const ProcessSpec& spec, std::uint64_t step) {
  const double k = static_cast<double>(step);
  if (spec.kind == ProcessKind::dbm) return std::exp(-0.5 * k * spec.dt);
  return std::pow(1.0 - spec.dt, 0.5 * k);
}

RecordSchedule RecordSchedule::spectra_at_times(const std::vector<double>& times, double dt) {
  RecordSchedule s;
  for (double t : times) s.spectrum_steps.push_back(steps_for_time(t, dt));
  return s;
}

RecordSchedule RecordSchedule::traces_every_step(std::uint64_t first, std::uint64_t last) {
  RecordSchedule s;
  for (std::uint64_t k = first; k <= last; ++k) s.trace_steps.push_back(k);
  return s;
}

std::vector<double> TrajectoryRecord::record_times() const {
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& r : traces) out.push_back(r.t);
  return out;
}

UnitaryMatrix process_generator(const ProcessSpec& spec, const SeedSpec& seed) {
  return spec.kind == ProcessKind::dbm ? dbm_generator(spec.dim, spec.dt, seed)
                                       : cauchy_generator(spec.dim, spec.dt, seed);
}

UnitaryMatrix evolve(const ProcessSpec& spec, std::uint64_t steps, const SeedSpec& seed,
                     std::optional<UnitaryMatrix> initial) {
  spec.validate();
  if (initial && initial->dim() != spec.dim) {
    throw DimensionMismatch("evolve: initial state has the wrong dimension");
  }
  UnitaryMatrix u = initial ? *initial : UnitaryMatrix::identity(spec.dim);
  for (std::uint64_t k = 1; k <= steps; ++k) u = advance(spec, u, k, seed);
  return u;
}

TrajectoryRecord run_trajectory(const ProcessSpec& spec, std::uint64_t steps,
                                const RecordSchedule& schedule, const SeedSpec& seed,
                                std::optional<UnitaryMatrix> initial) {
  spec.validate();
  const auto spectrum_steps = sorted_unique(schedule.spectrum_steps);
  std::vector<std::uint64_t> all = schedule.trace_steps;
  all.insert(all.end(), spectrum_steps.begin(), spectrum_steps.end());
  const auto trace_steps = sorted_unique(std::move(all));
  if (!trace_steps.empty() && trace_steps.back() > steps) {
    throw InvalidArgument("record schedule extends beyond the run window");
  }
  if (initial && initial->dim() != spec.dim) {
    throw DimensionMismatch("run_trajectory: initial state has the wrong dimension");
  }

  TrajectoryRecord rec;
  rec.process = spec;
  rec.seed = seed;
  rec.traces.reserve(trace_steps.size());
  rec.spectra.reserve(spectrum_steps.size());

  UnitaryMatrix u = initial ? *initial : UnitaryMatrix::identity(spec.dim);
  auto next_trace = trace_steps.begin();
  auto next_spectrum = spectrum_steps.begin();
  const double n = static_cast<double>(spec.dim);

  auto record = [&](std::uint64_t k) {
    if (next_trace == trace_steps.end() || *next_trace != k) return;
    ++next_trace;
    const double t = static_cast<double>(k) * spec.dt;
    rec.traces.push_back({k, t, u.trace() / n, u.measured_defect()});
    if (next_spectrum != spectrum_steps.end() && *next_spectrum == k) {
      ++next_spectrum;
      try {
        EigenphaseSpectrum s = eigenphases(u);
        s.parameter = t;
        s.realization = seed.stream_index;
        rec.spectra.push_back(std::move(s));
      } catch (const NumericalFailure& e) {
        throw NumericalFailure(std::string(e.what()) + " (realization " +
                               std::to_string(seed.stream_index) + ", step " +
                               std::to_string(k) + ")");
      }
    }
  };

  record(0);
  for (std::uint64_t k = 1; k <= steps; ++k) {
    u = advance(spec, u, k, seed);
    record(k);
  }
  return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const ProcessSpec& spec, std::uint64_t steps,
                                           const RecordSchedule& schedule,
                                           std::uint64_t master_seed, std::size_t count,
                                           int workers) {
  spec.validate();
  return parallel_map<TrajectoryRecord>(count, workers, [&](std::size_t r) {
    return run_trajectory(spec, steps, schedule, SeedSpec{master_seed, r});
  });
}

std::vector<std::pair<double, Complex>> com_trajectory(const TrajectoryRecord& record) {
  std::vector<std::pair<double, Complex>> out;
  out.reserve(record.traces.size());
  for (const auto& s : record.traces) out.emplace_back(s.t, s.normalized_trace);
  return out;
}

std::vector<Complex> stroboscopic_powers(const EigenphaseSpectrum& spectrum, int n_max) {
  if (n_max < 1) throw InvalidArgument("stroboscopic_powers: n_max must be >= 1");
  std::vector<Complex> out(static_cast<std::size_t>(n_max), Complex(0.0, 0.0));
  for (int n = 1; n <= n_max; ++n) {
    Complex sum(0.0, 0.0);
    for (double phi : spectrum.phases) sum += std::polar(1.0, n * phi);
    out[static_cast<std::size_t>(n - 1)] = sum;
  }
  return out;
}

}  // namespace sfflab
