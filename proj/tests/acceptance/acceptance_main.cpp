// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Informational lines are indented under their criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <CLI11.hpp>

#include "sfflab/cli/commands.hpp"
#include "sfflab/cli/figures.hpp"
#include "sfflab/ensembles.hpp"
#include "sfflab/estimation.hpp"
#include "sfflab/parallel.hpp"
#include "sfflab/processes.hpp"
#include "sfflab/spectral_analytics.hpp"
#include "sfflab/unfolding.hpp"

namespace fs = std::filesystem;
using namespace sfflab;

namespace {

constexpr Index kN = 16;
constexpr double kSe = 4.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> info;
};

struct Context {
  std::uint64_t master = 1;
  int workers = 0;
  fs::path workdir;
};

std::uint64_t seed_for(const Context& ctx, int criterion) {
  return cli::derived_seed(ctx.master, static_cast<std::uint64_t>(criterion));
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double z_score(double value, double se, double target) {
  if (se == 0.0) return value == target ? 0.0 : INFINITY;
  return (value - target) / se;
}

// Largest |z| of an SFF series against a prediction.
double worst_z(const SffSeries& s, const std::function<double(int)>& predict, int* at = nullptr) {
  double worst = 0.0;
  for (const auto& p : s.points) {
    const double z = std::abs(z_score(p.value, p.std_err, predict(p.n)));
    if (z > worst) {
      worst = z;
      if (at) *at = p.n;
    }
  }
  return worst;
}

std::vector<EigenphaseSpectrum> column(const std::vector<TrajectoryRecord>& recs, std::size_t k) {
  std::vector<EigenphaseSpectrum> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back(r.spectra[k]);
  return out;
}

Outcome cue_endpoint(const Context& ctx) {
  const std::size_t count = 100000;
  const auto spectra = cli::sample_scaling_spectra(kN, 0.0, count, seed_for(ctx, 1), ctx.workers);
  const SffSeries s = estimate_sff(spectra, 32);
  int at = 0;
  const double w = worst_z(s, [](int n) { return cue_form_factor(kN, n); }, &at);
  return {w <= kSe, fmt("worst %.2f SE at n=%d over n=1..32, 10^5 Haar samples", w, at), {}};
}

Outcome prefactor(const Context& ctx) {
  const std::size_t count = 100000;
  const double a = 0.5;
  const std::uint64_t seed = seed_for(ctx, 2);
  const auto k1 = parallel_map<double>(count, ctx.workers, [&](std::size_t r) {
    return std::norm(sample_poisson_kernel(kN, ScalingParameter(a), {seed, r}).trace());
  });
  const EstimateWithError e = mean_with_error(k1);
  const double z_fixed = z_score(e.value, e.std_err, 65.0);
  const double z_printed = z_score(e.value, e.std_err, 35.0);
  Outcome o{std::abs(z_fixed) <= kSe && std::abs(z_printed) > 20.0,
            fmt("K_1 = %.3f +- %.3f: %.2f SE from 65, %.1f SE from 35", e.value, e.std_err, z_fixed, z_printed), {}};
  o.info.push_back(fmt("closed form 1 + N^2 a^2 - a^(2N) = %.12f, analytic_sff = %.12f",
                       1.0 + 256.0 * a * a - std::pow(a, 32), analytic_sff(a, kN, 1)));
  return o;
}

// Criteria 3 and 4 share the samples.
std::vector<std::vector<EigenphaseSpectrum>> scaling_samples;
const std::vector<double> kAGrid{0.0, 0.3, 0.6, 0.9};

Outcome analytic_vs_mc(const Context& ctx) {
  scaling_samples.clear();
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < kAGrid.size(); ++i) {
    const double a = kAGrid[i];
    scaling_samples.push_back(
        cli::sample_scaling_spectra(kN, a, 10000, cli::derived_seed(seed_for(ctx, 3), i), ctx.workers));
    int at = 0;
    const double w = worst_z(estimate_sff(scaling_samples.back(), 32),
                             [a](int n) { return analytic_sff(a, kN, n); }, &at);
    o.info.push_back(fmt("a=%.1f worst %.2f SE at n=%d", a, w, at));
    worst = std::max(worst, w);
  }
  o.pass = worst <= kSe;
  o.detail = fmt("worst %.2f SE over a in {0,0.3,0.6,0.9}, n=1..32, 10^4 samples each", worst);
  return o;
}

Outcome collapse(const Context&) {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < kAGrid.size(); ++i) {
    std::vector<EigenphaseSpectrum> unfolded;
    for (const auto& s : scaling_samples[i]) unfolded.push_back(two_stage_unfold(s, MobiusToUniform{kAGrid[i]}, 0.0));
    int at = 0;
    const double w = worst_z(estimate_sff(unfolded, 32), [](int n) { return cue_form_factor(kN, n); }, &at);
    o.info.push_back(fmt("a=%.1f worst %.2f SE at n=%d", kAGrid[i], w, at));
    worst = std::max(worst, w);
  }
  o.pass = worst <= kSe;
  o.detail = fmt("unfolded (a_target=0) worst %.2f SE from min(n,N)", worst);
  return o;
}

// Criteria 5 and 6 share one DBM ensemble.
std::vector<TrajectoryRecord> dbm_run;
const std::vector<double> kDbmSpectrumTimes{0.5, 1.0, 2.0};
constexpr double kDbmDt = 0.01;

void ensure_dbm_run(const Context& ctx) {
  if (!dbm_run.empty()) return;
  RecordSchedule sched = RecordSchedule::spectra_at_times(kDbmSpectrumTimes, kDbmDt);
  for (std::uint64_t k = 0; k <= 300; k += 5) sched.trace_steps.push_back(k);
  dbm_run = run_ensemble({ProcessKind::dbm, kN, kDbmDt}, 300, sched, seed_for(ctx, 5), 10000, ctx.workers);
}

Outcome dbm_decay(const Context& ctx) {
  ensure_dbm_run(ctx);
  const auto& traces0 = dbm_run.front().traces;
  std::vector<double> times;
  for (const auto& s : traces0) times.push_back(s.t);
  const auto rows = static_cast<Index>(dbm_run.size());
  const auto cols = static_cast<Index>(times.size());
  Eigen::MatrixXd re(rows, cols), k1(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index j = 0; j < cols; ++j) {
      const Complex z = dbm_run[static_cast<std::size_t>(r)].traces[static_cast<std::size_t>(j)].normalized_trace;
      re(r, j) = z.real();
      k1(r, j) = std::norm(z * static_cast<double>(kN));
    }
  }
  // t = 0 is exact (tr U = N) and carries no weight in a noisy fit; start at the first record.
  const DecayFit g0 = fit_decay_samples(times, re, 0.0, {times.at(1), 3.0});
  Outcome o;
  const bool rate_ok = std::abs(g0.rate - 0.5) <= 0.02;
  const auto est = column_estimates(k1);
  double worst = 0.0;
  std::string pts;
  for (double t : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    const auto j = static_cast<std::size_t>(std::find_if(times.begin(), times.end(),
                                                         [t](double x) { return std::abs(x - t) < 1e-9; }) -
                                            times.begin());
    const double law = (kN * kN - 1.0) * std::exp(-t) + 1.0;
    const double z = z_score(est[j].value, est[j].std_err, law);
    worst = std::max(worst, std::abs(z));
    pts += fmt(" t=%g:%+.2f", t, z);
  }
  o.pass = rate_ok && worst <= kSe;
  o.detail = fmt("gamma0 = %.4f +- %.4f (%zu points), K_1 worst %.2f SE", g0.rate, g0.std_err, g0.points, worst);
  o.info.push_back("K_1 z-scores:" + pts);
  return o;
}

Outcome dbm_scaling(const Context& ctx) {
  ensure_dbm_run(ctx);
  Outcome o;
  double worst_s = 0.0, worst_u = 0.0;
  for (std::size_t k = 0; k < kDbmSpectrumTimes.size(); ++k) {
    const auto spectra = column(dbm_run, k);
    const double t = kDbmSpectrumTimes[k];
    const double a = std::exp(-0.5 * t);
    const UnfoldPlan stage1 = UnfoldPlan::dbm_uniformizer(t, spectra, DbmDensity::empirical);
    const SffSeries uni = estimate_sff(stage1.apply(spectra), 16);
    const SffSeries sca = estimate_sff(stage1.then(MobiusFromUniform{a}).apply(spectra), 16);
    int au = 0, as = 0;
    const double wu = worst_z(uni, [](int n) { return static_cast<double>(n); }, &au);
    const double ws = worst_z(sca, [a](int n) { return analytic_sff(a, kN, n); }, &as);
    o.info.push_back(fmt("t=%g scaling frame worst %.2f SE (n=%d), uniform frame worst %.2f SE (n=%d)", t, ws, as,
                         wu, au));
    worst_s = std::max(worst_s, ws);
    worst_u = std::max(worst_u, wu);
  }
  o.pass = worst_s <= kSe && worst_u <= kSe;
  o.detail = fmt("empirical stage 1: scaling worst %.2f SE, uniform worst %.2f SE, n=1..16", worst_s, worst_u);
  return o;
}

Outcome cauchy_dos(const Context& ctx) {
  // dt chosen so that (1 - dt)^{k/2} = exp(-t/2) with t = k/4.
  const double dt = 1.0 - std::exp(-0.25);
  const ProcessSpec spec{ProcessKind::cauchy, 32, dt};
  RecordSchedule sched;
  sched.spectrum_steps = {4, 20};
  const auto recs = run_ensemble(spec, 20, sched, seed_for(ctx, 7), 100000, ctx.workers);
  Outcome o;
  double worst = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double t = 0.25 * static_cast<double>(sched.spectrum_steps[k]);
    const DensityModel rho = DensityModel::cauchy(t);
    const HistogramDos h = histogram_dos(column(recs, k), 64);
    double w = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) {
      const double lo = h.edges[b], hi = h.edges[b + 1];
      const double expected = (rho.cdf(hi) - rho.cdf(lo)) / (hi - lo);
      w = std::max(w, std::abs(h.heights[b] - expected) / h.per_bin_se[b]);
    }
    o.info.push_back(fmt("t=%g: sup deviation %.2f per-bin SE", t, w));
    worst = std::max(worst, w);
  }
  o.pass = worst <= kSe;
  o.detail = fmt("N=32, 10^5 realizations, 64 bins: sup deviation %.2f per-bin SE", worst);
  return o;
}

Outcome cauchy_rates(const Context& ctx) {
  Outcome o;
  const std::uint64_t seed = seed_for(ctx, 8);

  // Single step.
  const double dt1 = 0.01;
  const auto single = parallel_map<double>(100000, ctx.workers, [&](std::size_t r) {
    return std::norm(cauchy_generator(kN, dt1, {cli::derived_seed(seed, 0), r}).trace());
  });
  const EstimateWithError s1 = mean_with_error(single);
  const double want1 = 1.0 + kN * kN * (1.0 - dt1) - std::pow(1.0 - dt1, kN);
  const double z1 = z_score(s1.value, s1.std_err, want1);

  // Flow: gamma_1 and the self-similarity bound grid.
  const double dt = 0.002;
  const ProcessSpec spec{ProcessKind::cauchy, kN, dt};
  const std::vector<double> grid_t{0.25, 0.5, 1.0, 1.5};
  RecordSchedule sched = RecordSchedule::spectra_at_times(grid_t, dt);
  const std::uint64_t last = steps_for_time(1.5, dt);
  for (std::uint64_t k = 0; k <= last; ++k) sched.trace_steps.push_back(k);
  const auto recs = run_ensemble(spec, last, sched, cli::derived_seed(seed, 1), 10000, ctx.workers);

  std::vector<double> times;
  for (const auto& s : recs.front().traces) times.push_back(s.t);
  Eigen::MatrixXd k1(static_cast<Index>(recs.size()), static_cast<Index>(times.size()));
  for (std::size_t r = 0; r < recs.size(); ++r) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      k1(static_cast<Index>(r), static_cast<Index>(j)) =
          std::norm(recs[r].traces[j].normalized_trace * static_cast<double>(kN));
    }
  }
  const DecayFit g1 = fit_decay_samples(times, k1, 1.0, {0.2, 1.5});
  const double target = analytic_decay(ProcessKind::cauchy, kN).gamma_n.front().rate;
  const double zg = (g1.rate - target) / g1.std_err;

  bool exceeds_2 = false, exceeds_3 = false, below = false;
  double min_z = INFINITY;
  for (std::size_t k = 0; k < grid_t.size(); ++k) {
    const double a = scaling_parameter(spec, sched.spectrum_steps[k]);
    const SffSeries s = estimate_sff(column(recs, k), 16);
    std::string line = fmt("t=%-4g a=%.4f z(n=1..16):", grid_t[k], a);
    for (const auto& p : s.points) {
      const double z = z_score(p.value, p.std_err, analytic_sff(a, kN, p.n));
      line += fmt(" %+.1f", z);
      if (p.n > 3) continue;
      min_z = std::min(min_z, z);
      if (z < -2.0) below = true;
      if (p.n == 2 && z > 2.0) exceeds_2 = true;
      if (p.n == 3 && z > 2.0) exceeds_3 = true;
    }
    o.info.push_back(line);
  }
  o.info.insert(o.info.begin(),
                fmt("single step dt=0.01: <|tr u|^2> = %.3f +- %.3f vs %.3f (%.2f SE)", s1.value, s1.std_err, want1, z1));
  o.info.insert(o.info.begin() + 1, fmt("gamma_1 = %.5f +- %.5f vs %.5f (%.2f fit-sigma), dt=0.002, %zu points",
                                        g1.rate, g1.std_err, target, zg, g1.points));
  o.info.insert(o.info.begin() + 2, fmt("bound grid n in {1,2,3}: minimum z %+.1f; n>3 rows below are informational",
                                        min_z));
  o.pass = std::abs(z1) <= kSe && std::abs(zg) <= 2.0 && exceeds_2 && exceeds_3 && !below;
  o.detail = fmt("single step %.2f SE, gamma_1 %.2f sigma, K_2/K_3 exceed analytic: %s/%s, none below by >2 SE: %s", z1,
                 zg, exceeds_2 ? "yes" : "no", exceeds_3 ? "yes" : "no", below ? "no" : "yes");
  return o;
}

Outcome moment_hierarchy(const Context& ctx) {
  Outcome o;
  double worst_ode = 0.0;
  for (int j = 0; j <= 50; ++j) {
    const double t = 0.1 * j;
    const auto c = dbm_moments_closed(t, 8);
    const auto e = dbm_moments_ode(t, 8, 1e-10);
    for (int n = 0; n <= 8; ++n) {
      worst_ode = std::max(worst_ode, std::abs(c.values[static_cast<std::size_t>(n)] - e.values[static_cast<std::size_t>(n)]));
    }
  }
  const std::vector<double> times{0.5, 1.0, 2.0};
  const auto recs = run_ensemble({ProcessKind::dbm, 64, kDbmDt}, 200, RecordSchedule::spectra_at_times(times, kDbmDt),
                                 seed_for(ctx, 9), 1000, ctx.workers);
  double worst_excess = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const MomentSeries est = estimate_moments(column(recs, k), 4);
    const MomentSeries closed = dbm_moments_closed(times[k], 4);
    std::string line = fmt("t=%g:", times[k]);
    for (int n = 1; n <= 4; ++n) {
      const auto i = static_cast<std::size_t>(n);
      const double dev = std::abs(est.values[i] - closed.values[i]);
      const double allowed = kSe * est.std_err[i] + 0.02;
      worst_excess = std::max(worst_excess, dev / allowed);
      line += fmt(" A_%d %.4f+-%.4f vs %.4f", n, est.values[i], est.std_err[i], closed.values[i]);
    }
    o.info.push_back(line);
  }
  o.pass = worst_ode <= 1e-6 && worst_excess <= 1.0;
  o.detail = fmt("ODE vs closed max |diff| %.2e over t in [0,5], n<=8; N=64 moments use %.0f%% of 4 SE + 0.02",
                 worst_ode, 100.0 * worst_excess);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome hygiene(const Context& ctx) {
  Outcome o;
  std::vector<std::string> failed;

  // Parseval partial sums.
  double lo = 1.0, top = 0.0, hi = 0.0;
  for (double a : {0.0, 0.3, 0.6, 0.9}) {
    for (int n : {1, 2, 8, 32}) {
      const auto c = coeff_cqn(a, n, 2048);
      double sum = 0.0;
      for (double v : c) {
        sum += v * v;
        hi = std::max(hi, sum);
      }
      lo = std::min(lo, sum);
      top = std::max(top, sum);
    }
  }
  // Rounding in the DFT may nudge the sum past 1 by a few ulps.
  if (!(lo >= 1.0 - 1e-8 && hi <= 1.0 + 1e-12)) failed.push_back("parseval");
  o.info.push_back(fmt("Parseval: totals in [%.12f, %.12f], partial sums <= %.15f", lo, top, hi));

  // Unitarity along 1000-step trajectories.
  double defect = 0.0;
  for (ProcessKind kind : {ProcessKind::dbm, ProcessKind::cauchy}) {
    for (Index dim : {16, 64}) {
      const ProcessSpec spec{kind, dim, kind == ProcessKind::dbm ? 0.01 : 0.05};
      const auto rec = run_trajectory(spec, 1000, RecordSchedule::traces_every_step(1, 1000), {seed_for(ctx, 10), 0});
      for (const auto& s : rec.traces) defect = std::max(defect, s.defect);
    }
  }
  if (!(defect <= 1e-10)) failed.push_back("unitarity");
  o.info.push_back(fmt("max unitarity defect over 1000 steps (DBM, Cauchy; N=16, 64): %.2e", defect));

  // Mobius round trips, scalar and matrix.
  double trip = 0.0;
  for (double a : {0.1, 0.5, 0.9, 0.99}) {
    for (int j = 0; j < 1000; ++j) {
      const double phi = -kPi + kTwoPi * (j + 0.5) / 1000.0;
      const double u = mobius_phase(phi, a, MobiusDirection::to_uniform);
      trip = std::max(trip, std::abs(wrap_phase(mobius_phase(u, a, MobiusDirection::from_uniform) - phi)));
    }
    const UnitaryMatrix m = sample_poisson_kernel(16, ScalingParameter(a), {seed_for(ctx, 10), 1});
    const UnitaryMatrix back = mobius_matrix(mobius_matrix(m, a, 0.2), 0.2, a);
    trip = std::max(trip, (back.matrix() - m.matrix()).cwiseAbs().maxCoeff());
  }
  if (!(trip <= 1e-10)) failed.push_back("mobius");
  o.info.push_back(fmt("Mobius round trip max error %.2e", trip));

  // Density normalization, by quadrature and through the CDF.
  double norm_err = 0.0;
  std::vector<DensityModel> models;
  for (double a : {0.0, 0.3, 0.6, 0.9, 0.99}) models.push_back(DensityModel::scaling(a));
  for (double t : {0.1, 1.0, 5.0}) models.push_back(DensityModel::cauchy(t));
  for (double t : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0}) models.push_back(DensityModel::dbm(t));
  for (const auto& m : models) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return m.density(x); }, -kPi, kPi, 20, 1e-14);
    norm_err = std::max({norm_err, std::abs(q - 1.0), std::abs(m.cdf(kPi) - m.cdf(-kPi) - 1.0)});
  }
  if (!(norm_err <= 1e-8)) failed.push_back("normalization");
  o.info.push_back(fmt("density normalization max error %.2e over %zu models", norm_err, models.size()));

  // Byte determinism of the quick figure bundle.
  const fs::path d1 = ctx.workdir / "figures_a", d2 = ctx.workdir / "figures_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  const auto r1 = cli::cmd_figures(d1, cli::FigureScale::quick, 1234, ctx.workers);
  const auto r2 = cli::cmd_figures(d2, cli::FigureScale::quick, 1234, ctx.workers);
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(d1)) names.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(d2)) names.insert(e.path().filename().string());
  std::size_t differing = 0;
  for (const auto& n : names) {
    if (!fs::exists(d1 / n) || !fs::exists(d2 / n) || slurp(d1 / n) != slurp(d2 / n)) ++differing;
  }
  if (differing > 0 || r1.failed > 0 || r2.failed > 0) failed.push_back("determinism");
  o.info.push_back(fmt("figures --scale quick twice: %zu files, %zu differ, %zu panel failures", names.size(), differing,
                       r1.failed + r2.failed));

  o.pass = failed.empty();
  if (failed.empty()) {
    o.detail = "Parseval, unitarity, Mobius round trips, normalization and figure determinism all hold";
  } else {
    o.detail = "failed:";
    for (const auto& f : failed) o.detail += " " + f;
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)(const Context&);
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  Context ctx;
  std::string workdir = "acceptance_work";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Scratch directory for generated files");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--seed", ctx.master, "Master seed");
  app.add_option("--workers", ctx.workers, "Worker threads (0: all cores)");
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);

  const std::vector<Criterion> criteria{
      {1, "CUE endpoint", cue_endpoint},
      {2, "prefactor arbitration", prefactor},
      {3, "analytic vs Monte Carlo SFF", analytic_vs_mc},
      {4, "self-similarity collapse", collapse},
      {5, "DBM decay laws", dbm_decay},
      {6, "DBM scaling agreement", dbm_scaling},
      {7, "Cauchy density of states", cauchy_dos},
      {8, "Cauchy rates and bound", cauchy_rates},
      {9, "moment hierarchy", moment_hierarchy},
      {10, "numerical hygiene", hygiene},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const bool wanted = only.empty() || std::find(only.begin(), only.end(), c.id) != only.end();
    // Criterion 4 reuses the samples of criterion 3.
    if (!wanted && !(c.id == 3 && std::find(only.begin(), only.end(), 4) != only.end())) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!wanted) continue;
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    for (const auto& line : o.info) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
