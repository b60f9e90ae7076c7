#include "sfflab/cli/figures.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "sfflab/cli/commands.hpp"
#include "sfflab/cli/csv.hpp"
#include "sfflab/error.hpp"
#include "sfflab/estimation.hpp"

#ifndef SFFLAB_VERSION
#define SFFLAB_VERSION "0.1.0"
#endif

namespace sfflab::cli {
namespace {

struct FigurePlan {
  std::string scale;
  std::size_t realizations = 1000;
  std::vector<double> flow_times;  // Figs. 3 and 4
  std::vector<double> a_analytic{0.0, 0.2, 0.4, 0.6, 0.8, 0.9};
  std::vector<double> a_sampled{0.0, 0.3, 0.6, 0.9};
  std::vector<double> dbm_dos_times{0.5, 2.0};
  int sff_n_max = 64;
  int flow_n_max = 16;
  Index dim = 16;
  Index dos_dim = 32;
  double dt = 0.01;
  int bins = 64;
  std::uint64_t com_steps = 1000;
  std::vector<std::uint64_t> snapshots{10, 100, 1000};

  std::string canonical() const {
    std::ostringstream os;
    os << "scale=" << scale << ";R=" << realizations << ";dim=" << dim << ";dos_dim=" << dos_dim
       << ";dt=" << format_double(dt) << ";bins=" << bins << ";flow=";
    for (double t : flow_times) os << format_double(t) << ',';
    os << ";dbm_dos=";
    for (double t : dbm_dos_times) os << format_double(t) << ',';
    os << ";n_max=" << sff_n_max << ',' << flow_n_max;
    return os.str();
  }
};

FigurePlan make_plan(FigureScale scale) {
  FigurePlan p;
  if (scale == FigureScale::quick) {
    p.scale = "quick";
    p.realizations = 1000;
    p.flow_times = {0.25, 0.5, 1.0, 2.0, 3.0};
  } else {
    p.scale = "full";
    p.realizations = 100000;
    for (int k = 1; k <= 30; ++k) p.flow_times.push_back(0.1 * k);
  }
  return p;
}

// Cauchy step whose exact clock -ln(1 - dt) is 1/4, so t = 1 and 5 are whole steps.
const double kCauchyDosDt = 1.0 - std::exp(-0.25);

struct Context {
  const FigurePlan& plan;
  std::uint64_t master_seed;
  int workers;
};

using Panel = std::function<std::vector<std::pair<std::string, CsvTable>>(const Context&, std::uint64_t seed)>;

void stamp(CsvTable& t, const std::string& panel, const Context& ctx, std::uint64_t seed) {
  t.meta("command", "figures");
  t.meta("panel", panel);
  t.meta("scale", ctx.plan.scale);
  t.meta("master_seed", std::to_string(ctx.master_seed));
  t.meta("panel_seed", std::to_string(seed));
}

std::vector<std::pair<std::string, CsvTable>> fig1(const Context& ctx, std::uint64_t seed) {
  const FigurePlan& p = ctx.plan;
  ProcessSpec spec{ProcessKind::dbm, p.dim, p.dt};
  RecordSchedule schedule = RecordSchedule::traces_every_step(0, p.com_steps);
  schedule.spectrum_steps = p.snapshots;
  const TrajectoryRecord rec = run_trajectory(spec, p.com_steps, schedule, SeedSpec{seed, 0});
  CsvTable com({"step", "t", "re", "im"});
  stamp(com, "fig1_com", ctx, seed);
  com.meta("N", std::to_string(p.dim));
  com.meta("dt", format_double(p.dt));
  for (const auto& s : rec.traces) com.row({s.step, s.t, s.normalized_trace.real(), s.normalized_trace.imag()});
  CsvTable snaps({"step", "t", "index", "phi", "re", "im"});
  stamp(snaps, "fig1_snapshots", ctx, seed);
  snaps.meta("N", std::to_string(p.dim));
  snaps.meta("dt", format_double(p.dt));
  for (std::size_t k = 0; k < rec.spectra.size(); ++k) {
    const auto& sp = rec.spectra[k];
    for (std::size_t l = 0; l < sp.phases.size(); ++l) {
      snaps.row({p.snapshots[k], sp.parameter, static_cast<std::uint64_t>(l), sp.phases[l],
                 std::cos(sp.phases[l]), std::sin(sp.phases[l])});
    }
  }
  return {{"fig1_com", std::move(com)}, {"fig1_snapshots", std::move(snaps)}};
}

std::vector<std::pair<std::string, CsvTable>> fig2a(const Context& ctx, std::uint64_t seed) {
  const FigurePlan& p = ctx.plan;
  CsvTable t({"a", "n", "K_analytic"});
  stamp(t, "fig2a", ctx, seed);
  t.meta("N", std::to_string(p.dim));
  for (double a : p.a_analytic) {
    for (int n = 1; n <= p.sff_n_max; ++n) t.row({a, static_cast<long long>(n), analytic_sff(a, p.dim, n)});
  }
  return {{"fig2a", std::move(t)}};
}

// Sampled scaling ensemble: raw frame (A3) and unfolded with a' = 0 (2b).
std::vector<std::pair<std::string, CsvTable>> fig2b_a3(const Context& ctx, std::uint64_t seed) {
  const FigurePlan& p = ctx.plan;
  CsvTable raw = sff_table(), uni = sff_table();
  stamp(raw, "figA3", ctx, seed);
  stamp(uni, "fig2b", ctx, seed);
  for (std::size_t i = 0; i < p.a_sampled.size(); ++i) {
    const double a = p.a_sampled[i];
    auto spectra = sample_scaling_spectra(p.dim, a, p.realizations, derived_seed(seed, i), ctx.workers);
    append_sff_rows(raw, estimate_sff(spectra, p.sff_n_max), p.realizations, a, std::nan(""), a);
    auto unfolded = UnfoldPlan({MobiusToUniform{a}}).apply(spectra);
    append_sff_rows(uni, estimate_sff(unfolded, p.sff_n_max), p.realizations, a, std::nan(""), a);
  }
  return {{"fig2b", std::move(uni)}, {"figA3", std::move(raw)}};
}

std::vector<std::pair<std::string, CsvTable>> flow(const Context& ctx, std::uint64_t seed, ProcessKind kind,
                                                   const std::string& prefix) {
  const FigurePlan& p = ctx.plan;
  const ProcessSpec spec{kind, p.dim, p.dt};
  const auto snaps = collect_process(spec, p.flow_times, p.realizations, seed, ctx.workers);
  CsvTable scaling = sff_table(), uniform = sff_table();
  stamp(scaling, prefix + "a", ctx, seed);
  stamp(uniform, prefix + "b", ctx, seed);
  for (const auto& snap : snaps) {
    for (const auto& [unfold, table] : {std::pair{"scaling", &scaling}, std::pair{"uniform", &uniform}}) {
      const UnfoldPlan plan = process_unfold_plan(kind, unfold, snap, DbmDensity::empirical);
      table->meta("unfold_plan_t" + format_double(snap.t), plan.describe());
      append_sff_rows(*table, estimate_sff(plan.apply(snap.spectra), p.flow_n_max), p.realizations, snap.a,
                      snap.t, snap.a);
    }
  }
  return {{prefix + "a", std::move(scaling)}, {prefix + "b", std::move(uniform)}};
}

std::vector<std::pair<std::string, CsvTable>> dos_pair(const Context& ctx, std::uint64_t seed, ProcessKind kind,
                                                       const std::string& prefix) {
  const FigurePlan& p = ctx.plan;
  const bool cauchy = kind == ProcessKind::cauchy;
  const double dt = cauchy ? kCauchyDosDt : p.dt;
  const ProcessSpec spec{kind, p.dos_dim, dt};
  std::vector<double> times;
  if (cauchy) {
    times = {4 * dt, 20 * dt};  // clock times 1 and 5
  } else {
    times = p.dbm_dos_times;
  }
  const auto snaps = collect_process(spec, times, p.realizations, seed, ctx.workers);
  std::vector<std::pair<std::string, CsvTable>> out;
  const char* suffix[] = {"a", "b"};
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const auto& snap = snaps[k];
    const DensityModel rho = cauchy ? DensityModel::scaling(snap.a) : DensityModel::dbm(snap.t);
    CsvTable t = histogram_table(histogram_dos(snap.spectra, p.bins), rho);
    const std::string name = prefix + suffix[k];
    stamp(t, name, ctx, seed);
    t.meta("N", std::to_string(p.dos_dim));
    t.meta("dt", format_double(dt));
    t.meta("steps", std::to_string(snap.step));
    t.meta("t", format_double(cauchy ? -2.0 * std::log(snap.a) : snap.t));
    t.meta("a", format_double(snap.a));
    t.meta("density", rho.describe());
    out.emplace_back(name, std::move(t));
  }
  return out;
}

}  // namespace

FigureScale parse_figure_scale(const std::string& name) {
  if (name == "quick") return FigureScale::quick;
  if (name == "full") return FigureScale::full;
  throw InvalidArgument("--scale must be quick or full");
}

const char* version_string() { return SFFLAB_VERSION; }

FiguresReport cmd_figures(const std::filesystem::path& outdir, FigureScale scale, std::uint64_t master_seed,
                          int workers) {
  const FigurePlan plan = make_plan(scale);
  const Context ctx{plan, master_seed, workers};
  const std::vector<std::pair<std::vector<std::string>, Panel>> panels = {
      {{"fig1_com", "fig1_snapshots"}, fig1},
      {{"fig2a"}, fig2a},
      {{"fig2b", "figA3"}, fig2b_a3},
      {{"fig3a", "fig3b"}, [](const Context& c, std::uint64_t s) { return flow(c, s, ProcessKind::dbm, "fig3"); }},
      {{"fig4a", "fig4b"}, [](const Context& c, std::uint64_t s) { return flow(c, s, ProcessKind::cauchy, "fig4"); }},
      {{"figA1a", "figA1b"}, [](const Context& c, std::uint64_t s) { return dos_pair(c, s, ProcessKind::cauchy, "figA1"); }},
      {{"figA2a", "figA2b"}, [](const Context& c, std::uint64_t s) { return dos_pair(c, s, ProcessKind::dbm, "figA2"); }},
  };

  nlohmann::ordered_json manifest;
  manifest["version"] = version_string();
  manifest["scale"] = plan.scale;
  manifest["master_seed"] = master_seed;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : plan.canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  manifest["config_hash"] = hex;
  manifest["config"] = plan.canonical();
  manifest["files"] = nlohmann::ordered_json::array();

  FiguresReport report;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& [names, fn] = panels[i];
    const std::uint64_t seed = derived_seed(master_seed, i);
    try {
      for (auto& [name, table] : fn(ctx, seed)) {
        const std::string file = name + ".csv";
        table.write(outdir / file);
        manifest["files"].push_back({{"panel", name}, {"file", file}, {"rows", table.rows()}, {"status", "ok"}});
        ++report.written;
      }
    } catch (const std::exception& e) {
      for (const auto& name : names) {
        manifest["files"].push_back(
            {{"panel", name}, {"file", name + ".csv"}, {"status", "failed"}, {"error", e.what()}});
        ++report.failed;
      }
    }
  }
  write_text(outdir / "manifest.json", manifest.dump(2) + "\n");
  return report;
}

}  // namespace sfflab::cli
