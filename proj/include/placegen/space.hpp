#pragma once

#include <string>
#include <vector>

#include "placegen/archive.hpp"
#include "placegen/genome.hpp"
#include "placegen/sim.hpp"

namespace placegen {

/// Axis-aligned box bounding decoded initial COM positions (support frame).
struct PlacementVolume {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    Vec3 center() const { return 0.5 * (lo + hi); }
};

struct ContactSpaceParams {
    double cone_half_angle = 0.5235987755982988; // 30 deg
    double standoff_min = 0.0;
    double standoff_max = 0.0; // <= 0 resolves to the object bbox diagonal
};

/// One placement task: a prepared object body, a static support with its SDF,
/// the initial-pose volume, simulator constants and the archive resolution.
struct Scenario {
    std::string name;
    Body object;
    TriMesh support;
    SdfGrid support_sdf;
    PlacementVolume volume;
    SimConfig sim;
    ArchiveSpec archive_spec;
    ContactSpaceParams contact;
    bool table_top = false;     // heatmaps need a planar top face
    double support_top_z = 0.0;
    std::vector<double> support_area_cdf; // prefix sums of triangle areas
    std::vector<double> object_area_cdf;
    std::string config_hash;    // provenance for run manifests

    double standoff_max() const {
        return contact.standoff_max > 0.0 ? contact.standoff_max : object.bbox_diagonal;
    }
};

/// Fills the area CDF and defaults the archive feature box to the placement
/// volume inflated by one object bbox diagonal. Call once after the fields
/// above are populated.
void finalize_scenario(Scenario& sc);

Pose decode_naive(const Genome& genome, const Scenario& sc);
Pose decode_contact(const Genome& genome, const Scenario& sc);
Pose decode(const Genome& genome, const Scenario& sc);

/// Area-weighted triangle pick from a prefix-sum table; u in [0, 1].
std::size_t pick_triangle(const std::vector<double>& area_cdf, double u);
std::vector<double> build_area_cdf(const TriMesh& mesh);

} // namespace placegen
