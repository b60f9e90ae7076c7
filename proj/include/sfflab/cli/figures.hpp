#pragma once

#include <filesystem>
#include <string>

#include "sfflab/cli/config.hpp"

namespace sfflab::cli {

enum class FigureScale { quick, full };

FigureScale parse_figure_scale(const std::string& name);

struct FiguresReport {
  std::size_t written = 0;
  std::size_t failed = 0;
};

/// Writes one CSV per figure panel into `outdir` plus manifest.json. A panel
/// that throws is recorded as failed in the manifest and the rest still run.
FiguresReport cmd_figures(const std::filesystem::path& outdir, FigureScale scale, std::uint64_t master_seed,
                          int workers);

/// Version string baked in at configure time.
const char* version_string();

}  // namespace sfflab::cli
