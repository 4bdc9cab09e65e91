#pragma once

#include "specembed/geometry.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specembed {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LaplacianKind { cotangent, gaussian_graph };

///
/// Generalised eigenproblem  stiffness * phi = lambda * mass * phi.
///
/// `mass` holds the diagonal of the lumped mass operator and is normalised
/// to sum to one, so the discrete surface has unit volume and the constant
/// eigenvector is identically 1.
///
struct LaplacianPair
{
    SparseMatrix stiffness;
    Eigen::VectorXd mass;
    LaplacianKind kind = LaplacianKind::cotangent;
    /// Total mass before normalisation (surface area for meshes, degree sum
    /// for graphs).
    double volume = 1.0;
    /// Gaussian bandwidth actually used (graphs only).
    double bandwidth = 0.0;
    std::vector<std::string> warnings;

    Index size() const { return mass.size(); }
};

/// Cotangent weights (cot a + cot b)/2 with barycentric lumped mass.
LaplacianPair cotangent_laplacian(const TriangleMesh& mesh);

/// Gaussian weights exp(-|xi-xj|^2 / sigma^2) on the symmetrised k-NN graph,
/// stiffness D - W and mass D / sum(D). An empty bandwidth selects the
/// median k-NN distance; +infinity gives unit weights.
LaplacianPair gaussian_graph_laplacian(const PointCloud& cloud, std::optional<double> bandwidth, int k = 8);
/// Same on raw rows, without the sample-size floor of PointCloud.
LaplacianPair gaussian_graph_laplacian(const Eigen::MatrixXd& points, std::optional<double> bandwidth, int k = 8);

/// Median distance to the k nearest neighbours over all points.
double auto_bandwidth(const Eigen::MatrixXd& points, int k);

/// Checks symmetry, zero row sums and mass normalisation; throws on failure.
void validate(const LaplacianPair& lap);

/// "row col value" lines, 0-based, 17 significant digits.
void write_triplets(std::ostream& out, const SparseMatrix& matrix);
SparseMatrix read_triplets(std::istream& in, Index rows, Index cols);

} // namespace specembed
