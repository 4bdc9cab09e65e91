#pragma once

#include "specembed/geometry.hpp"

#include <cstdint>

namespace specembed::shapes {

/// Icosahedron subdivided `level` times with vertices projected to the
/// sphere: 10*4^level + 2 vertices, 20*4^level faces.
TriangleMesh icosphere(int level, double radius = 1.0);

TriangleMesh octahedron();

/// Regular tetrahedron with unit circumradius.
TriangleMesh tetrahedron();

/// Icosphere deformed into an ellipsoid with smooth bumps; generic (simple)
/// spectrum and no symmetries.
TriangleMesh lumpy_sphere(int level, std::uint64_t seed = 7);

/// Tangential jitter of an icosphere; points stay on the unit sphere.
TriangleMesh jittered_sphere(int level, double amount, std::uint64_t seed = 11);

/// Torus of revolution with `nu` x `nv` quads split into triangles.
TriangleMesh torus(double major_radius, double minor_radius, int nu, int nv);

/// Uniformly random rotation (seeded).
Eigen::Matrix3d random_rotation(std::uint64_t seed);

} // namespace specembed::shapes
