#include "placegen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "placegen/error.hpp"

namespace placegen {

double coverage(const Archive& archive, const ArchiveSpec& spec) {
    if (!(archive.spec() == spec))
        throw SpecMismatch("coverage: spec does not match the archive");
    return static_cast<double>(archive.filled_cells()) /
           static_cast<double>(spec.total_cells());
}

HeatmapResult placement_heatmap(const Archive& archive, const Scenario& sc,
                                double chunk_fraction) {
    if (!sc.table_top)
        throw Error("placement_heatmap: scenario '" + sc.name +
                    "' has no planar top support face");
    if (archive.filled_cells() == 0)
        throw NoValidElites("placement_heatmap: archive has no valid elites");

    double min_fitness = std::numeric_limits<double>::max();
    for (const auto& [cell, elite] : archive.cells())
        min_fitness = std::min(min_fitness, elite.fitness);

    // Shift so sums are non-negative; if every shifted fitness is zero
    // (single elite, or all equal) fall back to unit mass per elite.
    double max_shifted = 0.0;
    for (const auto& [cell, elite] : archive.cells())
        max_shifted = std::max(max_shifted, elite.fitness - min_fitness);
    const bool unit_mass = max_shifted <= 0.0;

    HeatmapResult out;
    out.points = sc.object.samples;
    out.quality.assign(out.points.size(), 0.0);
    out.fitness_shift = min_fitness;
    out.chunk_fraction = chunk_fraction;

    const double surface = sc.support_top_z;
    std::vector<double> z(out.points.size());
    for (const auto& [cell, elite] : archive.cells()) {
        double z_max = std::numeric_limits<double>::lowest();
        for (std::size_t i = 0; i < out.points.size(); ++i) {
            z[i] = elite.feature.apply(out.points[i]).z();
            z_max = std::max(z_max, z[i]);
        }
        const double extent = std::max(z_max - surface, 0.0);
        const double threshold = surface + chunk_fraction * extent;
        const double mass = unit_mass ? 1.0 : elite.fitness - min_fitness;
        for (std::size_t i = 0; i < out.points.size(); ++i)
            if (z[i] <= threshold) out.quality[i] += mass;
    }

    const double max_acc = *std::max_element(out.quality.begin(), out.quality.end());
    if (max_acc > 0.0)
        for (double& q : out.quality) q /= max_acc;
    return out;
}

PerturbationHistogram perturbation_histogram(const Archive& archive, bool per_pose_mean,
                                             int bins, double lo, double hi) {
    PerturbationHistogram h;
    h.per_pose_mean = per_pose_mean;
    h.edges.resize(bins + 1);
    const double log_lo = std::log10(lo), log_hi = std::log10(hi);
    for (int i = 0; i <= bins; ++i)
        h.edges[i] = std::pow(10.0, log_lo + (log_hi - log_lo) * i / bins);
    h.counts.assign(bins, 0);
    h.exemplar_cell.assign(bins, -1);
    h.exemplar_sigma.assign(bins, std::numeric_limits<double>::max());

    auto bin_of = [&](double sigma) {
        if (!(sigma > 0.0)) return 0;
        const double t = (std::log10(sigma) - log_lo) / (log_hi - log_lo) * bins;
        return std::clamp(static_cast<int>(t), 0, bins - 1);
    };

    for (const auto& [cell, elite] : archive.cells()) {
        if (!elite.robust.has_value() || elite.dr_sigmas.empty())
            throw MissingLabels("perturbation_histogram: elite without DR labels");
        if (per_pose_mean) {
            double mean = 0.0;
            for (double s : elite.dr_sigmas) mean += s;
            mean /= static_cast<double>(elite.dr_sigmas.size());
            const int b = bin_of(mean);
            ++h.counts[b];
            ++h.total;
            if (mean < h.exemplar_sigma[b]) {
                h.exemplar_sigma[b] = mean;
                h.exemplar_cell[b] = cell;
            }
        } else {
            for (double s : elite.dr_sigmas) {
                const int b = bin_of(s);
                ++h.counts[b];
                ++h.total;
                if (s < h.exemplar_sigma[b]) {
                    h.exemplar_sigma[b] = s;
                    h.exemplar_cell[b] = cell;
                }
            }
        }
    }
    for (int b = 0; b < bins; ++b)
        if (h.exemplar_cell[b] < 0) h.exemplar_sigma[b] = 0.0;
    return h;
}

// ---------------------------------------------------------------------------
// SVG / point-cloud emission

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

constexpr int kW = 800, kH = 500, kMargin = 60;

double map_x(double v, double lo, double hi) {
    return kMargin + (v - lo) / (hi - lo) * (kW - 2 * kMargin);
}
double map_y(double v, double lo, double hi) {
    return kH - kMargin - (v - lo) / (hi - lo) * (kH - 2 * kMargin);
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

void svg_header(std::ofstream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
        << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
}

void svg_axes(std::ofstream& out, const std::string& xlabel, const std::string& ylabel) {
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
        << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15
        << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n"
        << "<text x=\"18\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
        << "transform=\"rotate(-90 18 " << kH / 2 << ")\">" << ylabel << "</text>\n";
}

} // namespace

void write_coverage_svg(const std::vector<std::pair<std::string, CoverageSeries>>& series,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");

    std::int64_t max_eval = 1;
    double max_cov = 0.0;
    for (const auto& [name, s] : series)
        for (const auto& p : s.points()) {
            max_eval = std::max(max_eval, p.evaluations);
            max_cov = std::max(max_cov, p.coverage());
        }
    if (max_cov <= 0.0) max_cov = 1.0;

    svg_header(out);
    svg_axes(out, "evaluations", "coverage");
    int idx = 0;
    for (const auto& [name, s] : series) {
        const char* color = kPalette[idx % 8];
        if (!s.points().empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            double last_y = 0.0;
            bool first = true;
            for (const auto& p : s.points()) {
                const double x = map_x(static_cast<double>(p.evaluations), 0, double(max_eval));
                const double y = map_y(p.coverage(), 0, max_cov);
                if (!first) out << " " << fmt(x) << "," << fmt(last_y); // step curve
                out << (first ? "" : " ") << fmt(x) << "," << fmt(y);
                last_y = y;
                first = false;
            }
            out << "\"/>\n";
        }
        out << "<text x=\"" << kW - kMargin + 5 << "\" y=\"" << kMargin + 16 * idx
            << "\" font-size=\"12\" fill=\"" << color << "\">" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    if (!out) throw IoError(path + ": write failed");
}

void write_heatmap_points(const HeatmapResult& heatmap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "# x y z quality\n";
    for (std::size_t i = 0; i < heatmap.points.size(); ++i) {
        const Vec3& p = heatmap.points[i];
        out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << ' '
            << fmt(heatmap.quality[i]) << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

void write_heatmap_svg(const HeatmapResult& heatmap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    svg_header(out);
    svg_axes(out, "x", "z");

    Aabb box;
    for (const Vec3& p : heatmap.points) box.expand(p);
    const double lo_x = box.lo.x(), hi_x = std::max(box.hi.x(), box.lo.x() + 1e-9);
    const double lo_z = box.lo.z(), hi_z = std::max(box.hi.z(), box.lo.z() + 1e-9);

    for (std::size_t i = 0; i < heatmap.points.size(); ++i) {
        const int heat = static_cast<int>(std::lround(heatmap.quality[i] * 255.0));
        out << "<circle cx=\"" << fmt(map_x(heatmap.points[i].x(), lo_x, hi_x)) << "\" cy=\""
            << fmt(map_y(heatmap.points[i].z(), lo_z, hi_z))
            << "\" r=\"2.5\" fill=\"rgb(" << heat << ",0," << 255 - heat << ")\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError(path + ": write failed");
}

void write_histogram_csv(const PerturbationHistogram& histogram, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.precision(17);
    out << "bin_lo,bin_hi,count,exemplar_cell,exemplar_sigma\n";
    for (std::size_t b = 0; b < histogram.counts.size(); ++b)
        out << histogram.edges[b] << ',' << histogram.edges[b + 1] << ',' << histogram.counts[b]
            << ',' << histogram.exemplar_cell[b] << ',' << histogram.exemplar_sigma[b] << "\n";
    if (!out) throw IoError(path + ": write failed");
}

void write_histogram_svg(const PerturbationHistogram& histogram, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    svg_header(out);
    svg_axes(out, "log10 pose variance after perturbation", "count");

    std::int64_t max_count = 1;
    for (std::int64_t c : histogram.counts) max_count = std::max(max_count, c);
    const int n = static_cast<int>(histogram.counts.size());
    const double bar_w = static_cast<double>(kW - 2 * kMargin) / n;
    for (int b = 0; b < n; ++b) {
        const double h =
            static_cast<double>(histogram.counts[b]) / static_cast<double>(max_count) *
            (kH - 2 * kMargin);
        out << "<rect x=\"" << fmt(kMargin + b * bar_w) << "\" y=\"" << fmt(kH - kMargin - h)
            << "\" width=\"" << fmt(bar_w * 0.9) << "\" height=\"" << fmt(h)
            << "\" fill=\"#1f77b4\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError(path + ": write failed");
}

} // namespace placegen
