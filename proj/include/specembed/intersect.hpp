#pragma once

#include "specembed/geometry.hpp"

#include <utility>
#include <vector>

namespace specembed {

using FacePair = std::pair<Index, Index>;

/// Sign of det[b-a, c-a, d-a]; exact (floating filter, rational fallback).
int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c, const Eigen::Vector3d& d);
/// Sign of det[b-a, c-a]; exact.
int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// Closed-triangle intersection, exact on the double inputs. Touching counts.
bool triangles_intersect(const std::array<Eigen::Vector3d, 3>& t, const std::array<Eigen::Vector3d, 3>& u);

/// Intersecting face pairs (i < j) among faces that share no vertex,
/// accelerated by an axis-aligned bounding-box hierarchy. Sorted.
std::vector<FacePair> self_intersections(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces);

/// Reference O(F^2) scan with the same semantics.
std::vector<FacePair> self_intersections_brute_force(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces);

} // namespace specembed
