#include "placegen/pack.hpp"

#include <filesystem>

#include "placegen/primitives.hpp"

namespace placegen {

const std::vector<PackEntry>& scenario_pack() {
    static const std::vector<PackEntry> pack = {
        {"box_on_plane", "box_on_plane.json", "box_object.stl", "plane_slab.stl"},
        {"cylinder_on_plane", "cylinder_on_plane.json", "cylinder_object.stl", "plane_slab.stl"},
        {"peg_in_hole", "peg_in_hole.json", "peg.stl", "slotted_block.stl"},
        {"bowl_stack", "bowl_stack.json", "bowl_object.stl", "bowl_support.stl"},
        {"hook_hang", "hook_hang.json", "ring.stl", "rod.stl"},
    };
    return pack;
}

void write_pack_meshes(const std::string& mesh_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(mesh_dir);
    const fs::path dir(mesh_dir);
    const double density = 1000.0; // placeholder; scenarios set their own

    write_stl_binary(primitives::box(0.06, 0.06, 0.06, density),
                     (dir / "box_object.stl").string());
    write_stl_binary(primitives::box(0.40, 0.40, 0.04, density, Vec3(0, 0, -0.02)),
                     (dir / "plane_slab.stl").string());
    write_stl_binary(primitives::cylinder(0.025, 0.10, 32, density),
                     (dir / "cylinder_object.stl").string());
    write_stl_binary(primitives::cylinder(0.015, 0.10, 24, density),
                     (dir / "peg.stl").string());
    write_stl_binary(primitives::slotted_block(0.12, 0.12, 0.05, 0.02, 0.035, 24, density),
                     (dir / "slotted_block.stl").string());
    write_stl_binary(primitives::bowl(0.035, 0.060, 0.030, 0.005, 36, density),
                     (dir / "bowl_support.stl").string());
    write_stl_binary(primitives::bowl(0.035, 0.060, 0.030, 0.005, 36, density),
                     (dir / "bowl_object.stl").string());

    // rod: capped cylinder turned to lie along +x
    TriMesh rod = primitives::cylinder(0.008, 0.16, 24, density);
    const Quat turn(Eigen::AngleAxisd(1.5707963267948966, Vec3::UnitY()));
    for (Vec3& v : rod.vertices) v = turn * v;
    rod.finalize(density);
    write_stl_binary(rod, (dir / "rod.stl").string());

    write_stl_binary(primitives::torus(0.035, 0.007, 32, 16, density),
                     (dir / "ring.stl").string());
}

} // namespace placegen
