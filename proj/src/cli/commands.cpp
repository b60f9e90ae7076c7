#include "sfflab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfflab/ensembles.hpp"
#include "sfflab/error.hpp"
#include "sfflab/parallel.hpp"

namespace sfflab::cli {
namespace {

constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

Cell optional_cell(double v) { return std::isnan(v) ? Cell{std::string()} : Cell{v}; }

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

void check_common(const RunConfig& c) {
  require(c.N >= 1 && c.N <= 512, "--N must lie in [1, 512]");
  require(c.n_max >= 1, "--n-max must be >= 1");
  require(c.realizations >= 1, "--realizations must be >= 1");
  require(c.workers >= 0, "--workers must be >= 0");
}

void check_a_grid(const std::vector<double>& grid, bool allow_one) {
  require(!grid.empty(), "--a needs at least one value");
  for (double a : grid) {
    require(a >= 0.0 && (allow_one ? a <= 1.0 : a < 1.0),
            allow_one ? "--a values must lie in [0, 1]" : "--a values must lie in [0, 1)");
  }
}

void check_t_grid(const RunConfig& c) {
  require(!c.t_grid.empty(), "--t-grid needs at least one value");
  for (double t : c.t_grid) {
    require(t > 0.0 && std::isfinite(t), "--t-grid values must be > 0");
    steps_for_time(t, c.dt);
  }
}

ProcessSpec process_spec(const RunConfig& c) {
  ProcessSpec spec{parse_process_kind(c.kind), static_cast<Index>(c.N), c.dt};
  spec.validate();
  return spec;
}

SffSeries estimate_any(const std::vector<EigenphaseSpectrum>& spectra, int n_max) {
  if (spectra.size() >= 2) return estimate_sff(spectra, n_max);
  SffSeries s;
  s.dim = static_cast<Index>(spectra.front().dim());
  s.parameter = spectra.front().parameter;
  s.frame = spectra.front().frame;
  const Eigen::MatrixXd x = sff_samples(spectra, n_max);
  for (int n = 1; n <= n_max; ++n) s.points.push_back({n, x(0, n - 1), 0.0, false});
  return s;
}

std::string t_label(double t) { return format_double(t); }

void header(CsvTable& table, const std::string& command, const RunConfig& cfg) {
  table.meta("command", command);
  table.meta(cfg.entries());
}

std::filesystem::path sibling(const std::filesystem::path& p, const std::string& suffix) {
  std::filesystem::path out = p;
  out.replace_filename(p.stem().string() + suffix + p.extension().string());
  return out;
}

}  // namespace

std::uint64_t derived_seed(std::uint64_t master_seed, std::uint64_t index) {
  return SeedSpec{master_seed, index}.stream_key();
}

std::vector<EigenphaseSpectrum> sample_scaling_spectra(Index dim, double a, std::size_t count,
                                                       std::uint64_t master_seed, int workers) {
  const ScalingParameter param(a);
  return parallel_map<EigenphaseSpectrum>(count, workers, [&](std::size_t r) {
    EigenphaseSpectrum s = eigenphases(sample_poisson_kernel(dim, param, SeedSpec{master_seed, r}));
    s.parameter = a;
    s.realization = r;
    return s;
  });
}

std::vector<ProcessSnapshot> collect_process(const ProcessSpec& spec, const std::vector<double>& t_grid,
                                             std::size_t realizations, std::uint64_t master_seed,
                                             int workers) {
  RecordSchedule schedule = RecordSchedule::spectra_at_times(t_grid, spec.dt);
  std::vector<std::uint64_t> steps = schedule.spectrum_steps;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  const auto records =
      run_ensemble(spec, steps.empty() ? 0 : steps.back(), schedule, master_seed, realizations, workers);
  std::vector<ProcessSnapshot> out;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    ProcessSnapshot snap;
    snap.step = steps[k];
    snap.t = static_cast<double>(steps[k]) * spec.dt;
    snap.a = scaling_parameter(spec, steps[k]);
    snap.spectra.reserve(records.size());
    for (const auto& r : records) snap.spectra.push_back(r.spectra[k]);
    out.push_back(std::move(snap));
  }
  return out;
}

UnfoldPlan process_unfold_plan(ProcessKind kind, const std::string& unfold, const ProcessSnapshot& snap,
                               DbmDensity density) {
  if (unfold == "none") return UnfoldPlan();
  if (unfold != "uniform" && unfold != "scaling") {
    throw InvalidArgument("--unfold must be none, uniform or scaling");
  }
  if (!(snap.a < 1.0)) throw InvalidArgument("unfolding needs t > 0");
  UnfoldPlan plan = kind == ProcessKind::dbm ? UnfoldPlan::dbm_uniformizer(snap.t, snap.spectra, density)
                                             : UnfoldPlan({MobiusToUniform{snap.a}});
  if (unfold == "scaling" && snap.a > 0.0) plan = plan.then(MobiusFromUniform{snap.a});
  return plan;
}

double frame_prediction(const Frame& frame, double ensemble_a, Index dim, int n) {
  switch (frame.kind) {
    case FrameKind::uniform: return cue_form_factor(dim, n);
    case FrameKind::scaling: return analytic_sff(frame.a, dim, n);
    case FrameKind::raw: return analytic_sff(ensemble_a, dim, n);
  }
  return kNoValue;
}

CsvTable sff_table() {
  return CsvTable({"n", "K_mean", "K_stderr", "realizations", "N", "a", "t", "frame", "K_analytic"});
}

void append_sff_rows(CsvTable& table, const SffSeries& sff, std::size_t realizations, double a, double t,
                     double ensemble_a) {
  for (const auto& p : sff.points) {
    table.row({static_cast<long long>(p.n), p.value, p.std_err, static_cast<std::uint64_t>(realizations),
               static_cast<long long>(sff.dim), optional_cell(a), optional_cell(t), sff.frame.label(),
               frame_prediction(sff.frame, ensemble_a, sff.dim, p.n)});
  }
}

CsvTable histogram_table(const HistogramDos& h, const DensityModel& rho) {
  CsvTable table({"bin_center", "height", "per_bin_se", "rho_analytic"});
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double width = h.edges[b + 1] - h.edges[b];
    const double avg = (rho.cdf(h.edges[b + 1]) - rho.cdf(h.edges[b])) / width;
    table.row({h.center(b), h.heights[b], h.per_bin_se[b], avg});
  }
  return table;
}

Files cmd_analytic_sff(const RunConfig& cfg) {
  check_common(cfg);
  check_a_grid(cfg.a_grid, true);
  CsvTable table({"a", "n", "K_analytic"});
  header(table, "analytic-sff", cfg);
  for (double a : cfg.a_grid) {
    for (int n = 1; n <= cfg.n_max; ++n) {
      table.row({a, static_cast<long long>(n), analytic_sff(a, static_cast<Index>(cfg.N), n)});
    }
  }
  table.write(cfg.out);
  return {cfg.out};
}

Files cmd_sample_sff(const RunConfig& cfg) {
  check_common(cfg);
  require(cfg.kind == "poisson" || cfg.kind == "haar", "--ensemble must be poisson or haar");
  require(cfg.unfold == "none" || cfg.unfold == "uniform", "--unfold must be none or uniform");
  const std::vector<double> grid = cfg.kind == "haar" ? std::vector<double>{0.0} : cfg.a_grid;
  check_a_grid(grid, false);
  CsvTable table = sff_table();
  header(table, "sample-sff", cfg);
  if (cfg.realizations < 2) table.meta("degenerate", "K_stderr undefined for realizations < 2, written as 0");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    auto spectra = sample_scaling_spectra(static_cast<Index>(cfg.N), a, cfg.realizations,
                                          derived_seed(cfg.master_seed, i), cfg.workers);
    if (cfg.unfold == "uniform" && a > 0.0) spectra = UnfoldPlan({MobiusToUniform{a}}).apply(spectra);
    if (cfg.unfold == "uniform") {
      for (auto& s : spectra) s.frame = Frame::uniform();
    }
    append_sff_rows(table, estimate_any(spectra, cfg.n_max), cfg.realizations, a, kNoValue, a);
  }
  table.write(cfg.out);
  return {cfg.out};
}

Files cmd_run_process(const RunConfig& cfg) {
  check_common(cfg);
  const ProcessSpec spec = process_spec(cfg);
  check_t_grid(cfg);
  const DbmDensity density = parse_dbm_density(cfg.dbm_density);
  require(cfg.unfold == "none" || cfg.unfold == "uniform" || cfg.unfold == "scaling",
          "--unfold must be none, uniform or scaling");
  const auto snaps = collect_process(spec, cfg.t_grid, cfg.realizations, cfg.master_seed, cfg.workers);
  const std::filesystem::path dir = cfg.out;
  Files files;
  for (const auto& snap : snaps) {
    const UnfoldPlan plan = process_unfold_plan(spec.kind, cfg.unfold, snap, density);
    const auto spectra = plan.apply(snap.spectra);

    CsvTable sff = sff_table();
    header(sff, "run-process", cfg);
    sff.meta("unfold_plan", plan.describe());
    if (cfg.realizations < 2) sff.meta("degenerate", "K_stderr undefined for realizations < 2, written as 0");
    append_sff_rows(sff, estimate_any(spectra, cfg.n_max), cfg.realizations, snap.a, snap.t, snap.a);
    files.push_back(dir / ("sff_t" + t_label(snap.t) + ".csv"));
    sff.write(files.back());

    CsvTable moments({"n", "A_mean", "A_stderr", "t", "A_analytic"});
    header(moments, "run-process", cfg);
    const int n_mom = std::min(cfg.n_max, 64);
    const MomentSeries analytic = spec.kind == ProcessKind::dbm ? dbm_moments_closed(snap.t, n_mom)
                                                                : scaling_moments(snap.a, n_mom);
    if (snap.spectra.size() >= 2) {
      const MomentSeries est = estimate_moments(snap.spectra, n_mom);
      for (int n = 1; n <= n_mom; ++n) {
        const auto i = static_cast<std::size_t>(n);
        moments.row({static_cast<long long>(n), est.values[i], est.std_err[i], snap.t, analytic.values[i]});
      }
    }
    files.push_back(dir / ("moments_t" + t_label(snap.t) + ".csv"));
    moments.write(files.back());

    if (cfg.dump_spectra) {
      CsvTable dump({"realization", "index", "phi", "frame"});
      header(dump, "run-process", cfg);
      for (const auto& s : spectra) {
        for (std::size_t l = 0; l < s.phases.size(); ++l) {
          dump.row({s.realization, static_cast<std::uint64_t>(l), s.phases[l], s.frame.label()});
        }
      }
      files.push_back(dir / ("spectra_t" + t_label(snap.t) + ".csv"));
      dump.write(files.back());
    }
  }
  return files;
}

Files cmd_com_trajectory(const RunConfig& cfg) {
  require(cfg.N >= 1 && cfg.N <= 512, "--N must lie in [1, 512]");
  const ProcessSpec spec = process_spec(cfg);
  RecordSchedule schedule = RecordSchedule::traces_every_step(0, cfg.steps);
  for (auto s : cfg.snapshots) {
    require(s <= cfg.steps, "--snapshots must not exceed --steps");
    schedule.spectrum_steps.push_back(s);
  }
  const TrajectoryRecord rec = run_trajectory(spec, cfg.steps, schedule, SeedSpec{cfg.master_seed, 0});

  CsvTable com({"step", "t", "re", "im"});
  header(com, "com-trajectory", cfg);
  for (const auto& s : rec.traces) com.row({s.step, s.t, s.normalized_trace.real(), s.normalized_trace.imag()});

  CsvTable snaps({"step", "t", "index", "phi", "re", "im"});
  header(snaps, "com-trajectory", cfg);
  for (const auto& sp : rec.spectra) {
    const auto step = steps_for_time(sp.parameter, spec.dt);
    for (std::size_t l = 0; l < sp.phases.size(); ++l) {
      snaps.row({step, sp.parameter, static_cast<std::uint64_t>(l), sp.phases[l], std::cos(sp.phases[l]),
                 std::sin(sp.phases[l])});
    }
  }
  const std::filesystem::path out = cfg.out;
  const std::filesystem::path snap_path = sibling(out, "_snapshots");
  com.write(out);
  snaps.write(snap_path);
  return {out, snap_path};
}

Files cmd_dos(const RunConfig& cfg) {
  require(cfg.grid >= 2, "--grid must be >= 2");
  DensityModel rho = DensityModel::scaling(0.0);
  if (cfg.model == "scaling") {
    check_a_grid(cfg.a_grid, false);
    require(cfg.a_grid.size() == 1, "dos: give a single --a");
    rho = DensityModel::scaling(cfg.a_grid.front());
  } else if (cfg.model == "cauchy" || cfg.model == "dbm") {
    require(cfg.t_grid.size() == 1 && cfg.t_grid.front() > 0.0, "dos: give a single --t > 0");
    rho = cfg.model == "cauchy" ? DensityModel::cauchy(cfg.t_grid.front()) : DensityModel::dbm(cfg.t_grid.front());
  } else {
    throw InvalidArgument("--model must be scaling, cauchy or dbm");
  }
  CsvTable table({"phi", "rho"});
  header(table, "dos", cfg);
  table.meta("density", rho.describe());
  for (int j = 0; j < cfg.grid; ++j) {
    const double phi = -kPi + kTwoPi * j / cfg.grid;
    table.row({phi, rho.density(phi)});
  }
  table.write(cfg.out);
  return {cfg.out};
}

Files cmd_dos_hist(const RunConfig& cfg) {
  check_common(cfg);
  const ProcessSpec spec = process_spec(cfg);
  require(cfg.t_grid.size() == 1, "dos-hist: give a single --t");
  check_t_grid(cfg);
  require(cfg.bins >= 8, "--bins must be >= 8");
  const auto snaps = collect_process(spec, cfg.t_grid, cfg.realizations, cfg.master_seed, cfg.workers);
  const ProcessSnapshot& snap = snaps.front();
  const DensityModel rho =
      spec.kind == ProcessKind::dbm ? DensityModel::dbm(snap.t) : DensityModel::scaling(snap.a);
  CsvTable table = histogram_table(histogram_dos(snap.spectra, cfg.bins), rho);
  header(table, "dos-hist", cfg);
  table.meta("density", rho.describe());
  table.meta("a", format_double(snap.a));
  table.write(cfg.out);
  return {cfg.out};
}

}  // namespace sfflab::cli
