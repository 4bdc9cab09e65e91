#pragma once

#include "specembed/intersect.hpp"
#include "specembed/pairs.hpp"
#include "specembed/spectral_maps.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace specembed {

struct InjectivityResult
{
    bool pass = true;
    /// min image distance over far pairs (+inf when there are none)
    double min_distance = 0.0;
    /// min image distance / graph distance over far pairs
    double min_ratio = 0.0;
    Index far_pairs = 0;
    /// far pairs whose image distance is <= tau
    Index collisions = 0;
    bool vacuous = false;
    bool exhaustive = true;
};

/// Checks |Phi(x) - Phi(y)| > tau for sampled pairs with d(x, y) >= delta.
InjectivityResult injectivity_scan(const Eigen::MatrixXd& coords, const GraphDistances& gd, double delta, double tau,
                                   const PairSampling& sampling = {});

/// Far pairs (d >= delta) whose images are bit-identical. Complete for
/// tau = 0 without a quadratic scan: rows are sorted and only equal rows
/// are compared.
Index exact_collisions(const Eigen::MatrixXd& coords, const GraphDistances& gd, double delta);

/// Neighbour star of every vertex: neighbour indices and their offsets from
/// the centre in the original (pre-embedding) geometry.
struct LocalStars
{
    std::vector<std::vector<Index>> neighbors;
    std::vector<Eigen::MatrixXd> offsets; // one row per neighbour

    Index size() const { return static_cast<Index>(neighbors.size()); }
};

LocalStars mesh_stars(const TriangleMesh& mesh);
LocalStars cloud_stars(const PointCloud& cloud, int k = 8);

struct RankResult
{
    bool pass = true;
    /// min over vertices of sigma_n / sigma_1 of the fitted differential
    double min_ratio = 0.0;
    Index worst_vertex = -1;
    /// vertices whose star cannot determine an n-dimensional differential
    Index underdetermined = 0;
};

/// Least-squares differential of the map on each star, expressed in the
/// top-n principal directions of the star offsets. Passes when
/// sigma_n / sigma_1 >= rank_tol at every vertex.
RankResult immersion_rank(const Eigen::MatrixXd& coords, const LocalStars& stars, int n, double rank_tol);

/// Intersecting face pairs of the mesh connectivity drawn with coords3 (m = 3).
std::vector<FacePair> self_intersection_check(const TriangleMesh& mesh, const Eigen::MatrixXd& coords3);

struct EmbedThresholds
{
    /// geodesic separation for far pairs; default 3 x mean star edge length
    std::optional<double> delta;
    /// image distance floor; default tau_factor x mean image edge length
    std::optional<double> tau;
    double tau_factor = 1.0;
    double rank_tol = 1e-3;
    PairSampling sampling;
};

struct EmbedDimStep
{
    int m = 0;
    double tau = 0.0;
    InjectivityResult injectivity;
    RankResult rank;
    std::optional<Index> intersections; // meshes at m = 3 only
    bool pass = false;
};

struct EmbedDimReport
{
    std::optional<int> m_star;
    std::vector<EmbedDimStep> steps;
    double delta = 0.0;
    double rank_tol = 0.0;
    int intrinsic_dim = 0;
};

/// Supplies the N x m image for a given m.
using CoordsProvider = std::function<Eigen::MatrixXd(int m)>;

/// Tries m = n..m_max and stops at the first m passing every check.
EmbedDimReport embedding_dimension(const CoordsProvider& coords, const GraphDistances& gd, const LocalStars& stars,
                                   int n, int m_max, const EmbedThresholds& thresholds = {},
                                   const TriangleMesh* mesh = nullptr);

/// Mesh pipeline: eigenmap coordinates of the spectrum, n = 2.
EmbedDimReport embedding_dimension(const Spectrum& spectrum, const TriangleMesh& mesh, const GraphDistances& gd,
                                   int m_max, const EmbedThresholds& thresholds = {});

/// Mean |Phi(x) - Phi(y)| over star edges.
double mean_image_edge(const Eigen::MatrixXd& coords, const LocalStars& stars);

void write_report(std::ostream& out, const EmbedDimReport& report);

} // namespace specembed
