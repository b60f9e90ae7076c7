#pragma once

// Subcommand implementations. Each validates its slice of the RunConfig
// (throwing InvalidArgument), runs, and returns the files it wrote.

#include <filesystem>
#include <vector>

#include "sfflab/cli/config.hpp"
#include "sfflab/cli/csv.hpp"
#include "sfflab/estimation.hpp"
#include "sfflab/matrix_kernel.hpp"
#include "sfflab/processes.hpp"
#include "sfflab/spectral_analytics.hpp"
#include "sfflab/unfolding.hpp"

namespace sfflab::cli {

using Files = std::vector<std::filesystem::path>;

Files cmd_analytic_sff(const RunConfig& cfg);
Files cmd_sample_sff(const RunConfig& cfg);
Files cmd_run_process(const RunConfig& cfg);
Files cmd_com_trajectory(const RunConfig& cfg);
Files cmd_dos(const RunConfig& cfg);
Files cmd_dos_hist(const RunConfig& cfg);

// Building blocks shared with the figure pipeline.

/// Eigenphase spectra of `count` scaling-ensemble samples; a = 0 is Haar.
std::vector<EigenphaseSpectrum> sample_scaling_spectra(Index dim, double a, std::size_t count,
                                                       std::uint64_t master_seed, int workers);

struct ProcessSnapshot {
  double t = 0.0;
  std::uint64_t step = 0;
  double a = 0.0;  // scaling_parameter at this step
  std::vector<EigenphaseSpectrum> spectra;
};

std::vector<ProcessSnapshot> collect_process(const ProcessSpec& spec, const std::vector<double>& t_grid,
                                             std::size_t realizations, std::uint64_t master_seed,
                                             int workers);

/// unfold in {none, uniform, scaling}.
UnfoldPlan process_unfold_plan(ProcessKind kind, const std::string& unfold, const ProcessSnapshot& snap,
                               DbmDensity density);

/// Scaling-theory prediction matching the frame of an SFF series.
double frame_prediction(const Frame& frame, double ensemble_a, Index dim, int n);

CsvTable sff_table();
void append_sff_rows(CsvTable& table, const SffSeries& sff, std::size_t realizations, double a,
                     double t, double ensemble_a);

CsvTable histogram_table(const HistogramDos& h, const DensityModel& rho);

/// Per-config seed for an independent sub-experiment `index`.
std::uint64_t derived_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace sfflab::cli
