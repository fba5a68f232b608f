#pragma once

#include <string>
#include <vector>

#include "placegen/analysis.hpp"
#include "placegen/config.hpp"

namespace placegen {

struct RunDirResult {
    std::string dir;
    std::uint64_t seed;
};

/// One run per seed under <root>/<scenario>/<method>/seed_<n>/ with the
/// archive, coverage series, manifest and log. `out_root_override` (or the
/// PLACEGEN_OUT_ROOT environment variable) replaces the config's output_dir.
std::vector<RunDirResult> cli_run(const RunConfig& cfg, const std::string& out_root_override);

/// Per-method median and interquartile coverage at the checkpoints across
/// run directories; writes <out_prefix>.csv and <out_prefix>.svg.
void cli_compare(const std::vector<std::string>& run_dirs,
                 std::vector<std::int64_t> checkpoints, const std::string& out_prefix);

LabelSummary cli_filter_dr(const std::string& archive_path, const std::string& scenario_path,
                           const DrConfig& dr, int threads, const std::string& out_archive,
                           const std::string& out_summary);

void cli_analyze(const std::string& archive_path, const std::string& kind,
                 const std::string& scenario_path, const std::string& out_dir);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

} // namespace placegen
