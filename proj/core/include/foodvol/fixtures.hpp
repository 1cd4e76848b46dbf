#pragma once

#include "foodvol/mesh.hpp"

namespace foodvol {

// Watertight test meshes, already canonical (centroid x = y = 0, min z = 0).
// Dimensions in cm.

TriangleMesh make_cube(double edge_cm);

TriangleMesh make_box(double sx_cm, double sy_cm, double sz_cm);

// Subdivided icosahedron with vertices on the sphere. 20 * 4^level faces.
TriangleMesh make_icosphere(double radius_cm, int subdivisions);

TriangleMesh make_torus(double major_radius_cm, double minor_radius_cm,
                        int major_segments = 48, int minor_segments = 24);

// Fixture by name ("cube", "box", "icosphere", "torus") at default food-like
// sizes; throws InvalidArgument for unknown names.
TriangleMesh make_fixture(const std::string& name);

}  // namespace foodvol
