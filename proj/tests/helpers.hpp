#pragma once

#include "placegen/primitives.hpp"
#include "placegen/space.hpp"

namespace placegen::testing {

// Desk-scale box-on-plane scenario mirroring the shipped config, built
// in-memory so unit tests do not depend on asset files.
inline Scenario make_box_plane_scenario() {
    Scenario sc;
    sc.name = "box_on_plane_test";
    sc.object = make_body(primitives::box(0.06, 0.06, 0.06, 500.0), 256, 7);
    sc.support = primitives::box(0.40, 0.40, 0.04, 1000.0, Vec3(0, 0, -0.02));
    sc.support_sdf = build_sdf(sc.support, 0.004, 0.04);
    sc.volume.lo = Vec3(-0.14, -0.14, 0.04);
    sc.volume.hi = Vec3(0.14, 0.14, 0.16);
    sc.sim.contact_stiffness = 50.0;
    sc.sim.contact_damping = 0.5;
    sc.table_top = true;
    sc.support_top_z = 0.0;
    finalize_scenario(sc);
    return sc;
}

// Shared instance: the SDF build is the expensive part.
inline const Scenario& box_plane_scenario() {
    static const Scenario sc = make_box_plane_scenario();
    return sc;
}

inline Scenario make_peg_hole_scenario() {
    Scenario sc;
    sc.name = "peg_in_hole_test";
    sc.object = make_body(primitives::cylinder(0.015, 0.10, 24, 600.0), 256, 7);
    sc.support = primitives::slotted_block(0.12, 0.12, 0.05, 0.02, 0.035, 24, 1000.0);
    sc.support_sdf = build_sdf(sc.support, 0.002, 0.03);
    sc.volume.lo = Vec3(-0.05, -0.05, 0.10);
    sc.volume.hi = Vec3(0.05, 0.05, 0.22);
    sc.sim.contact_stiffness = 100.0;
    sc.sim.contact_damping = 0.5;
    sc.table_top = true;
    sc.support_top_z = 0.05;
    finalize_scenario(sc);
    return sc;
}

inline const Scenario& peg_hole_scenario() {
    static const Scenario sc = make_peg_hole_scenario();
    return sc;
}

} // namespace placegen::testing
