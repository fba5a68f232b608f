#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "placegen/genome.hpp"
#include "placegen/pose.hpp"
#include "placegen/sim.hpp"

namespace placegen {

/// Feature descriptor: the settled pose of the object in the support frame.
using FeatureDescriptor = Pose;

/// Grid discretization of the feature space: position bins over a bounding
/// box, intrinsic-XYZ Euler bins for orientation (roll and yaw wrap).
struct ArchiveSpec {
    Vec3 box_lo = Vec3::Zero();
    Vec3 box_hi = Vec3::Zero();
    int nx = 10, ny = 10, nz = 5;
    int nr = 8, np = 8, nyaw = 8;

    std::int64_t total_cells() const {
        return std::int64_t(nx) * ny * nz * nr * np * nyaw;
    }
    bool valid() const {
        return nx >= 1 && ny >= 1 && nz >= 1 && nr >= 1 && np >= 1 && nyaw >= 1 &&
               (box_hi.array() > box_lo.array()).all();
    }
    bool operator==(const ArchiveSpec& o) const {
        return box_lo == o.box_lo && box_hi == o.box_hi && nx == o.nx && ny == o.ny &&
               nz == o.nz && nr == o.nr && np == o.np && nyaw == o.nyaw;
    }
};

/// Flat cell index, or nullopt when the position leaves the feature box.
std::optional<std::int64_t> cell_index(const FeatureDescriptor& phi, const ArchiveSpec& spec);
/// The six per-axis bin coordinates behind cell_index.
std::optional<std::array<int, 6>> cell_coords(const FeatureDescriptor& phi,
                                              const ArchiveSpec& spec);
/// Orientation-only sub-index (roll, pitch, yaw bins flattened).
std::int64_t orientation_bin(const Quat& q, const ArchiveSpec& spec);

struct Elite {
    Genome genome;
    Pose initial_pose;
    double fitness = 0.0;
    FeatureDescriptor feature;
    RejectReason reason = RejectReason::none;
    std::optional<bool> robust;      // unset until the DR pass
    std::vector<double> dr_sigmas;   // per-trial variances from the DR pass
};

enum class OfferStatus {
    inserted_new,
    replaced,
    threshold_accepted, // annealed archives: passed the threshold, incumbent kept
    rejected,
    out_of_bounds,
};

const char* to_string(OfferStatus s);

struct OfferOutcome {
    OfferStatus status = OfferStatus::rejected;
    double delta = 0.0;          // improvement vs incumbent / acceptance threshold
    std::int64_t cell = -1;
    bool accepted() const {
        return status == OfferStatus::inserted_new || status == OfferStatus::replaced ||
               status == OfferStatus::threshold_accepted;
    }
};

/// Elite grid with best-fitness replacement. In annealed mode (CMA-MAE) the
/// acceptance test runs against a per-cell threshold t_e initialized at f_min
/// and updated as t_e <- (1-alpha) t_e + alpha f on every acceptance; the
/// stored elite still only ever improves in fitness.
class Archive {
public:
    explicit Archive(ArchiveSpec spec) : spec_(std::move(spec)) {}
    static Archive annealed(ArchiveSpec spec, double alpha, double f_min) {
        Archive a(std::move(spec));
        a.annealed_ = true;
        a.alpha_ = alpha;
        a.f_min_ = f_min;
        return a;
    }

    OfferOutcome offer(const Elite& candidate);

    const ArchiveSpec& spec() const { return spec_; }
    bool is_annealed() const { return annealed_; }
    double alpha() const { return alpha_; }
    double f_min() const { return f_min_; }
    std::size_t filled_cells() const { return cells_.size(); }
    std::int64_t out_of_bounds_count() const { return out_of_bounds_; }
    double threshold(std::int64_t cell) const;
    const std::map<std::int64_t, Elite>& cells() const { return cells_; }
    std::map<std::int64_t, Elite>& cells_mutable() { return cells_; }
    double coverage() const {
        return static_cast<double>(cells_.size()) / static_cast<double>(spec_.total_cells());
    }

private:
    ArchiveSpec spec_;
    bool annealed_ = false;
    double alpha_ = 0.0;
    double f_min_ = 0.0;
    std::map<std::int64_t, Elite> cells_;
    std::map<std::int64_t, double> thresholds_; // absent entries sit at f_min
    std::int64_t out_of_bounds_ = 0;
};

/// Step curve of distinct valid-occupied cells against evaluations spent.
class CoverageSeries {
public:
    struct Point {
        std::int64_t evaluations;
        std::int64_t filled;
        std::int64_t total_cells;
        double coverage() const {
            return static_cast<double>(filled) / static_cast<double>(total_cells);
        }
    };

    void record(std::int64_t evaluations, std::int64_t filled, std::int64_t total);
    const std::vector<Point>& points() const { return points_; }
    /// Step-function value at `evaluations` (last point at or before it).
    double coverage_at(std::int64_t evaluations) const;

    void save_csv(const std::string& path) const;
    static CoverageSeries load_csv(const std::string& path);

private:
    std::vector<Point> points_;
};

struct ArchiveFileMeta {
    std::string scenario_name;
    std::string scenario_hash;
    std::string method;
    std::string space;
    std::uint64_t seed = 0;
    nlohmann::json params; // free-form run parameters
};

constexpr int kArchiveSchemaVersion = 1;

void save_archive(const Archive& archive, const ArchiveFileMeta& meta, const std::string& path);
std::pair<Archive, ArchiveFileMeta> load_archive(const std::string& path);

} // namespace placegen
