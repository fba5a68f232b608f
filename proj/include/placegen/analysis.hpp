#pragma once

#include <string>
#include <vector>

#include "placegen/archive.hpp"
#include "placegen/space.hpp"

namespace placegen {

/// Fraction of cells holding a valid elite. Throws SpecMismatch when the
/// spec does not match the archive's own.
double coverage(const Archive& archive, const ArchiveSpec& spec);

/// Per-surface-point relative contact quality for a table-top scenario.
struct HeatmapResult {
    std::vector<Vec3> points;    // object frame (COM-centered)
    std::vector<double> quality; // in [0, 1], max exactly 1
    double fitness_shift = 0.0;  // subtracted from every fitness before accumulation
    double chunk_fraction = 0.0;
};

/// Accumulates shifted fitness onto the object surface points that fall in
/// the lowest chunk of each settled pose's z-extent above the support top.
HeatmapResult placement_heatmap(const Archive& archive, const Scenario& sc,
                                double chunk_fraction = 0.10);

struct PerturbationHistogram {
    std::vector<double> edges;               // n_bins + 1, log10-spaced
    std::vector<std::int64_t> counts;        // n_bins
    std::vector<std::int64_t> exemplar_cell; // lowest-sigma member per bin, -1 if empty
    std::vector<double> exemplar_sigma;
    std::int64_t total = 0;                  // sum of counts
    bool per_pose_mean = false;
};

/// Histogram of per-trial DR variances (or per-pose means) on log10 bins.
/// Requires every elite to carry DR labels.
PerturbationHistogram perturbation_histogram(const Archive& archive, bool per_pose_mean = false,
                                             int bins = 30, double lo = 1e-12, double hi = 1e3);

// Plot emission: deterministic bytes for fixed inputs.
void write_coverage_svg(const std::vector<std::pair<std::string, CoverageSeries>>& series,
                        const std::string& path);
void write_heatmap_points(const HeatmapResult& heatmap, const std::string& path);
void write_heatmap_svg(const HeatmapResult& heatmap, const std::string& path);
void write_histogram_csv(const PerturbationHistogram& histogram, const std::string& path);
void write_histogram_svg(const PerturbationHistogram& histogram, const std::string& path);

} // namespace placegen
