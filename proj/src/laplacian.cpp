#include "specembed/laplacian.hpp"

#include "specembed/error.hpp"

#include <Eigen/Geometry>
#include "specembed/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace specembed {

namespace {

constexpr double min_angle = 1e-6;
constexpr double cot_clamp = 1e6;

using Triplet = Eigen::Triplet<double>;

} // namespace

LaplacianPair cotangent_laplacian(const TriangleMesh& mesh)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.faces();
    const Index n = mesh.num_vertices();

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(F.rows()) * 12);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    Index clamped = 0;

    for (Index f = 0; f < F.rows(); ++f) {
        const Index idx[3] = {F(f, 0), F(f, 1), F(f, 2)};
        const Eigen::Vector3d p[3] = {V.row(idx[0]), V.row(idx[1]), V.row(idx[2])};
        const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
        for (int c = 0; c < 3; ++c) mass[idx[c]] += area / 3.0;

        for (int k = 0; k < 3; ++k) {
            // corner k is opposite edge (i, j)
            const int i = (k + 1) % 3;
            const int j = (k + 2) % 3;
            const Eigen::Vector3d e1 = p[i] - p[k];
            const Eigen::Vector3d e2 = p[j] - p[k];
            const double dot = e1.dot(e2);
            const double cross = e1.cross(e2).norm();
            const double angle = std::atan2(cross, dot);
            double cot = 0.0;
            if (!(angle >= min_angle && angle <= std::numbers::pi - min_angle)) {
                ++clamped;
                cot = cross > 0.0 ? std::clamp(dot / cross, -cot_clamp, cot_clamp) : std::copysign(cot_clamp, dot);
            } else {
                cot = dot / cross;
            }
            const double w = 0.5 * cot;
            triplets.emplace_back(idx[i], idx[j], -w);
            triplets.emplace_back(idx[j], idx[i], -w);
            triplets.emplace_back(idx[i], idx[i], w);
            triplets.emplace_back(idx[j], idx[j], w);
        }
    }

    LaplacianPair lap;
    lap.kind = LaplacianKind::cotangent;
    if (clamped > 0) {
        lap.warnings.push_back(std::to_string(clamped) + " triangle corner(s) with angle below 1e-6 rad; cotangent "
                                                         "weights clamped to +/-1e6");
        std::clog << "warning: " << lap.warnings.back() << '\n';
    }

    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    lap.stiffness.makeCompressed();

    for (Index v = 0; v < n; ++v) {
        if (lap.stiffness.coeff(v, v) < 0.0)
            throw GeometryError("cotangent assembly: vertex " + std::to_string(v) + " has negative total weight");
        if (!(mass[v] > 0.0)) throw GeometryError("vertex " + std::to_string(v) + " has zero lumped area");
    }

    lap.volume = mass.sum();
    // Cotangent stiffness is scale invariant on surfaces, so only the mass is
    // rescaled; eigenvalues become those of the unit-area surface.
    lap.mass = mass / lap.volume;
    return lap;
}

double auto_bandwidth(const Eigen::MatrixXd& points, int k)
{
    const Index n = points.rows();
    if (k < 1 || k > n - 1) throw ParameterError("k must lie in [1, N-1]");
    const KdTree tree(points);
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * k));
    for (Index i = 0; i < n; ++i)
        for (const auto& [j, d2] : tree.k_nearest(points.row(i), k, i)) dists.push_back(std::sqrt(d2));
    const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    if (dists.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(dists.begin(), mid);
    return 0.5 * (lower + upper);
}

LaplacianPair gaussian_graph_laplacian(const PointCloud& cloud, std::optional<double> bandwidth, int k)
{
    return gaussian_graph_laplacian(cloud.points(), bandwidth, k);
}

LaplacianPair gaussian_graph_laplacian(const Eigen::MatrixXd& points, std::optional<double> bandwidth, int k)
{
    const Index n = points.rows();
    if (k < 1 || k > n - 1)
        throw ParameterError("k = " + std::to_string(k) + " must lie in [1, N-1] with N = " + std::to_string(n));
    const double sigma = bandwidth ? *bandwidth : auto_bandwidth(points, k);
    if (!(sigma > 0.0)) throw ParameterError("bandwidth must be positive");

    const auto edges = knn_edges(points, k);
    std::vector<Triplet> triplets;
    triplets.reserve(edges.size() * 2 + static_cast<std::size_t>(n));
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    std::vector<Edge> live;
    std::vector<double> unit;
    for (const auto& [i, j] : edges) {
        const double d2 = (points.row(i) - points.row(j)).squaredNorm();
        const double w = std::isinf(sigma) ? 1.0 : std::exp(-d2 / (sigma * sigma));
        if (w <= 0.0) continue;
        triplets.emplace_back(i, j, -w);
        triplets.emplace_back(j, i, -w);
        degree[i] += w;
        degree[j] += w;
        live.push_back({i, j});
        unit.push_back(1.0);
    }
    for (Index v = 0; v < n; ++v) {
        if (!(degree[v] > 0.0))
            throw ConnectivityError("vertex " + std::to_string(v) + " has zero degree (bandwidth too small?)");
        triplets.emplace_back(v, v, degree[v]);
    }
    const auto sizes = WeightedGraph(n, live, unit).component_sizes();
    if (sizes.size() > 1) {
        std::string list;
        for (auto s : sizes) list += (list.empty() ? "" : ", ") + std::to_string(s);
        throw ConnectivityError("k-NN graph is disconnected: component sizes " + list, sizes);
    }

    LaplacianPair lap;
    lap.kind = LaplacianKind::gaussian_graph;
    lap.bandwidth = sigma;
    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    lap.stiffness.makeCompressed();
    lap.volume = degree.sum();
    lap.mass = degree / lap.volume;
    return lap;
}

void validate(const LaplacianPair& lap)
{
    const Index n = lap.size();
    if (lap.stiffness.rows() != n || lap.stiffness.cols() != n) throw Error("stiffness/mass size mismatch");
    double scale = 0.0;
    for (Index v = 0; v < n; ++v) scale = std::max(scale, std::abs(lap.stiffness.coeff(v, v)));
    const SparseMatrix transpose = lap.stiffness.transpose();
    const SparseMatrix diff = lap.stiffness - transpose;
    double asym = 0.0;
    for (Index col = 0; col < diff.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(diff, col); it; ++it) asym = std::max(asym, std::abs(it.value()));
    if (asym > 1e-12 * scale) throw Error("stiffness is not symmetric");
    const Eigen::VectorXd rows = lap.stiffness * Eigen::VectorXd::Ones(n);
    if (rows.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) throw Error("stiffness rows do not sum to zero");
    if ((lap.mass.array() <= 0.0).any()) throw Error("mass has non-positive entries");
    if (std::abs(lap.mass.sum() - 1.0) > 1e-12) throw Error("mass does not sum to one");
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix)
{
    for (Index col = 0; col < matrix.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(matrix, col); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
}

SparseMatrix read_triplets(std::istream& in, Index rows, Index cols)
{
    std::vector<Triplet> triplets;
    Index r = 0, c = 0;
    double v = 0.0;
    while (in >> r >> c >> v) {
        if (r < 0 || r >= rows || c < 0 || c >= cols) throw Error("triplet index out of range");
        triplets.emplace_back(r, c, v);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

} // namespace specembed
