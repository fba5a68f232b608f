#pragma once

#include <string>
#include <vector>

namespace placegen {

struct PackEntry {
    std::string name;
    std::string config_file;
    std::string object_mesh;
    std::string support_mesh;
};

/// The bundled desk-scale scenarios.
const std::vector<PackEntry>& scenario_pack();

/// Regenerates the pack's primitive meshes (binary STL) into mesh_dir.
void write_pack_meshes(const std::string& mesh_dir);

} // namespace placegen
