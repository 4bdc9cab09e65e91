#pragma once

#include "specembed/eigensolver.hpp"
#include "specembed/geometry.hpp"
#include "specembed/laplacian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace support {

using specembed::Index;

/// Weighted graph Laplacian with an explicit (not necessarily normalised) mass.
inline specembed::LaplacianPair graph_pair(Index n, const std::vector<std::array<Index, 2>>& edges,
                                           const Eigen::VectorXd& mass, double weight = 1.0)
{
    std::vector<Eigen::Triplet<double>> t;
    for (const auto& [i, j] : edges) {
        t.emplace_back(i, j, -weight);
        t.emplace_back(j, i, -weight);
        t.emplace_back(i, i, weight);
        t.emplace_back(j, j, weight);
    }
    specembed::LaplacianPair lap;
    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(t.begin(), t.end());
    lap.mass = mass;
    lap.kind = specembed::LaplacianKind::gaussian_graph;
    return lap;
}

inline specembed::LaplacianPair cycle(Index n, const Eigen::VectorXd& mass)
{
    std::vector<std::array<Index, 2>> e;
    for (Index i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return graph_pair(n, e, mass);
}

inline specembed::LaplacianPair path(Index n, const Eigen::VectorXd& mass)
{
    std::vector<std::array<Index, 2>> e;
    for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return graph_pair(n, e, mass);
}

/// Points on a unit circle, optionally jittered in angle.
inline Eigen::MatrixXd circle_points(Index n, double jitter = 0.0)
{
    Eigen::MatrixXd p(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * (i + jitter * std::sin(7.0 * i)) / n;
        p(i, 0) = std::cos(a);
        p(i, 1) = std::sin(a);
    }
    return p;
}

/// Sine of the largest principal angle between two column spans, each
/// orthonormal in the mass inner product.
inline double subspace_sine(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::VectorXd& mass)
{
    const Eigen::VectorXd root = mass.cwiseSqrt();
    const Eigen::MatrixXd x = root.asDiagonal() * X;
    const Eigen::MatrixXd y = root.asDiagonal() * Y;
    const Eigen::MatrixXd rest = y - x * (x.transpose() * y);
    return Eigen::JacobiSVD<Eigen::MatrixXd>(rest).singularValues()[0];
}

} // namespace support
