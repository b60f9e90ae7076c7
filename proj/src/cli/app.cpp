#include "sfflab/cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string_view>

#include <CLI11.hpp>

#include "sfflab/cli/commands.hpp"
#include "sfflab/cli/config.hpp"
#include "sfflab/cli/figures.hpp"
#include "sfflab/error.hpp"

namespace sfflab::cli {
namespace {

constexpr int kFlagError = 2;
constexpr int kRuntimeError = 1;

// The config file has to be read before flags are bound, so that flags
// parsed afterwards override it.
std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return std::string(arg.substr(9));
  }
  return {};
}

void add_seed(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.master_seed, "Master seed (fallback: $SFFLAB_SEED)");
  sub->add_option("--workers", cfg.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(int argc, char** argv) {
  RunConfig cfg;
  bool seed_from_file = false;
  const std::string config_path = find_config(argc, argv);
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidArgument("cannot read config file " + config_path);
      for (const auto& k : cfg.merge_toml(f)) seed_from_file = seed_from_file || k == "master_seed";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlagError;
  }

  CLI::App app{"Spectral form factors of scrambling flows on the unitary group"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_flag;
  app.add_option("--config", config_flag, "TOML file with RunConfig fields; flags override it");
  std::string scale = "quick";
  std::string outdir = "figures";

  auto* analytic = app.add_subcommand("analytic-sff", "Scaling-theory K_n for a list of a");
  analytic->add_option("--N", cfg.N, "Matrix dimension");
  analytic->add_option("--a", cfg.a_grid, "Scaling parameters")->delimiter(',');
  analytic->add_option("--n-max", cfg.n_max, "Largest n");
  analytic->add_option("--out", cfg.out, "Output CSV");

  auto* sample = app.add_subcommand("sample-sff", "Monte Carlo K_n of the scaling ensemble or the CUE");
  sample->add_option("--ensemble", cfg.kind, "poisson or haar");
  sample->add_option("--N", cfg.N, "Matrix dimension");
  sample->add_option("--a", cfg.a_grid, "Scaling parameters")->delimiter(',');
  sample->add_option("--realizations", cfg.realizations, "Samples per a");
  sample->add_option("--n-max", cfg.n_max, "Largest n");
  sample->add_option("--unfold", cfg.unfold, "none or uniform");
  sample->add_option("--out", cfg.out, "Output CSV");
  add_seed(sample, cfg);

  auto* proc = app.add_subcommand("run-process", "DBM or Cauchy ensemble: SFF and moments per time");
  proc->add_option("--process", cfg.kind, "dbm or cauchy");
  proc->add_option("--N", cfg.N, "Matrix dimension");
  proc->add_option("--dt", cfg.dt, "Time step");
  proc->add_option("--t-grid", cfg.t_grid, "Record times (multiples of dt)")->delimiter(',');
  proc->add_option("--realizations", cfg.realizations, "Trajectories");
  proc->add_option("--n-max", cfg.n_max, "Largest n");
  proc->add_option("--unfold", cfg.unfold, "none, uniform or scaling");
  proc->add_option("--dbm-density", cfg.dbm_density, "DBM stage-1 unfolding: empirical or analytic");
  proc->add_flag("--dump-spectra", cfg.dump_spectra, "Also write the unfolded spectra");
  proc->add_option("--out", cfg.out, "Output directory");
  add_seed(proc, cfg);

  auto* com = app.add_subcommand("com-trajectory", "Center of mass N^-1 tr U(t) along one trajectory");
  com->add_option("--process", cfg.kind, "dbm or cauchy");
  com->add_option("--N", cfg.N, "Matrix dimension");
  com->add_option("--dt", cfg.dt, "Time step");
  com->add_option("--steps", cfg.steps, "Number of steps");
  com->add_option("--snapshots", cfg.snapshots, "Steps with eigenphase snapshots")->delimiter(',');
  com->add_option("--out", cfg.out, "Output CSV; snapshots go to <stem>_snapshots.csv");
  add_seed(com, cfg);

  auto* dos = app.add_subcommand("dos", "Analytic density of states on a grid");
  dos->add_option("--model", cfg.model, "scaling, cauchy or dbm");
  dos->add_option("--a", cfg.a_grid, "Scaling parameter (scaling model)")->delimiter(',');
  dos->add_option("--t", cfg.t_grid, "Time (cauchy, dbm models)")->delimiter(',');
  dos->add_option("--grid", cfg.grid, "Grid points");
  dos->add_option("--out", cfg.out, "Output CSV");

  auto* hist = app.add_subcommand("dos-hist", "Sampled eigenphase histogram of a process");
  hist->add_option("--process", cfg.kind, "dbm or cauchy");
  hist->add_option("--t", cfg.t_grid, "Time (multiple of dt)")->delimiter(',');
  hist->add_option("--N", cfg.N, "Matrix dimension");
  hist->add_option("--dt", cfg.dt, "Time step");
  hist->add_option("--realizations", cfg.realizations, "Trajectories");
  hist->add_option("--bins", cfg.bins, "Histogram bins");
  hist->add_option("--out", cfg.out, "Output CSV");
  add_seed(hist, cfg);

  auto* figs = app.add_subcommand("figures", "CSV data for every figure panel plus a manifest");
  figs->add_option("--outdir", outdir, "Output directory");
  figs->add_option("--scale", scale, "quick (10^3 realizations) or full")->check(CLI::IsMember({"quick", "full"}));
  add_seed(figs, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kFlagError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const bool seed_flag = chosen->get_option_no_throw("--seed") != nullptr && chosen->count("--seed") > 0;
  if (!seed_flag && !seed_from_file) {
    if (const char* env = std::getenv("SFFLAB_SEED")) {
      try {
        std::size_t pos = 0;
        cfg.master_seed = std::stoull(env, &pos);
        if (pos != std::string_view(env).size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        std::cerr << "error: SFFLAB_SEED is not an unsigned integer\n";
        return kFlagError;
      }
    }
  }

  try {
    Files files;
    if (analytic->parsed()) files = cmd_analytic_sff(cfg);
    if (sample->parsed()) files = cmd_sample_sff(cfg);
    if (proc->parsed()) files = cmd_run_process(cfg);
    if (com->parsed()) files = cmd_com_trajectory(cfg);
    if (dos->parsed()) files = cmd_dos(cfg);
    if (hist->parsed()) files = cmd_dos_hist(cfg);
    if (figs->parsed()) {
      const FiguresReport r = cmd_figures(outdir, parse_figure_scale(scale), cfg.master_seed, cfg.workers);
      std::cout << "wrote " << r.written << " panel files to " << outdir << "\n";
      if (r.failed > 0) {
        std::cerr << "error: " << r.failed << " panel files failed, see manifest.json\n";
        return kRuntimeError;
      }
      return 0;
    }
    for (const auto& f : files) std::cout << f.string() << "\n";
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlagError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}

}  // namespace sfflab::cli
