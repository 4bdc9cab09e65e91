#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specembed {

using Index = Eigen::Index;
using Edge = std::array<Index, 2>;

///
/// Closed triangle surface. Construction validates face indices, rejects
/// faces with a repeated vertex and rejects meshes with more than one
/// connected component (unreferenced vertices count as components).
///
class TriangleMesh
{
public:
    TriangleMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces,
                 std::optional<int> declared_genus = std::nullopt);

    const Eigen::MatrixX3d& vertices() const { return m_vertices; }
    const Eigen::MatrixX3i& faces() const { return m_faces; }
    /// Undirected edges, each stored once with e[0] < e[1], sorted.
    const std::vector<Edge>& edges() const { return m_edges; }

    Index num_vertices() const { return m_vertices.rows(); }
    Index num_faces() const { return m_faces.rows(); }
    Index num_edges() const { return static_cast<Index>(m_edges.size()); }

    int euler_characteristic() const;
    std::optional<int> declared_genus() const { return m_genus; }

    /// True when every directed half-edge occurs at most once, i.e. adjacent
    /// faces traverse their shared edge in opposite directions.
    bool consistently_oriented() const;

    double mean_edge_length() const;
    double surface_area() const;

    /// Same connectivity with new positions.
    TriangleMesh with_vertices(Eigen::MatrixX3d vertices) const;

private:
    Eigen::MatrixX3d m_vertices;
    Eigen::MatrixX3i m_faces;
    std::vector<Edge> m_edges;
    std::optional<int> m_genus;
};

/// Sample of an n-dimensional manifold in R^D, one point per row.
class PointCloud
{
public:
    static constexpr double duplicate_tolerance = 1e-12;

    PointCloud(Eigen::MatrixXd points, int intrinsic_dim);

    const Eigen::MatrixXd& points() const { return m_points; }
    Index size() const { return m_points.rows(); }
    Index ambient_dim() const { return m_points.cols(); }
    int intrinsic_dim() const { return m_intrinsic_dim; }

private:
    Eigen::MatrixXd m_points;
    int m_intrinsic_dim;
};

/// Compressed adjacency with positive edge lengths.
class WeightedGraph
{
public:
    WeightedGraph(Index num_vertices, std::span<const Edge> edges, std::span<const double> lengths);

    Index num_vertices() const { return static_cast<Index>(m_offsets.size()) - 1; }
    Index num_edges() const { return static_cast<Index>(m_targets.size()) / 2; }

    std::span<const Index> neighbors(Index v) const
    {
        return {m_targets.data() + m_offsets[v], m_targets.data() + m_offsets[v + 1]};
    }
    std::span<const double> lengths(Index v) const
    {
        return {m_lengths.data() + m_offsets[v], m_lengths.data() + m_offsets[v + 1]};
    }

    /// Sizes of connected components, largest first.
    std::vector<std::size_t> component_sizes() const;

private:
    std::vector<Index> m_offsets;
    std::vector<Index> m_targets;
    std::vector<double> m_lengths;
};

WeightedGraph mesh_graph(const TriangleMesh& mesh);

/// Union of directed k-nearest-neighbour edges, Euclidean lengths.
std::vector<Edge> knn_edges(const Eigen::MatrixXd& points, int k);
WeightedGraph knn_graph(const PointCloud& cloud, int k = 8);

///
/// Shortest-path distances from a set of sources, or an exact metric
/// supplied as a callable (used for analytic models where the geodesic
/// distance is known in closed form).
///
class GraphDistances
{
public:
    using Metric = std::function<double(Index, Index)>;

    static GraphDistances dijkstra(const WeightedGraph& graph, std::span<const Index> sources);
    static GraphDistances all_pairs(const WeightedGraph& graph);
    static GraphDistances from_metric(Index num_points, Metric metric);

    Index num_points() const { return m_num_points; }
    const std::vector<Index>& sources() const { return m_sources; }
    bool covers_all() const { return m_metric || static_cast<Index>(m_sources.size()) == m_num_points; }
    bool is_source(Index v) const { return m_metric || m_slot[v] >= 0; }

    /// d(i, j). At least one of i, j must be a source. When both are, the
    /// smaller of the two Dijkstra values is returned so d(i,j) == d(j,i)
    /// holds bit for bit.
    double operator()(Index i, Index j) const;

private:
    GraphDistances() = default;

    Index m_num_points = 0;
    std::vector<Index> m_sources;
    std::vector<Index> m_slot;
    std::vector<double> m_table;
    Metric m_metric;
};

GraphDistances graph_distance(const TriangleMesh& mesh, std::span<const Index> sources);
GraphDistances graph_distance(const PointCloud& cloud, std::span<const Index> sources, int k = 8);
/// Every vertex as a source.
GraphDistances graph_distance(const TriangleMesh& mesh);
GraphDistances graph_distance(const PointCloud& cloud, int k = 8);

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

enum class MeshFormat { off, ply };

/// Reads OFF or ASCII PLY (format picked from the extension when not given).
TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format = std::nullopt);
TriangleMesh parse_mesh(std::istream& in, MeshFormat format, const std::string& name = "<stream>");

void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
               std::optional<MeshFormat> format = std::nullopt);
/// Writes raw vertex/face arrays without validation (spectral images may
/// self-intersect or collapse).
void write_off(std::ostream& out, const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
               std::optional<int> genus = std::nullopt);
void write_ply(std::ostream& out, const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
               std::optional<int> genus = std::nullopt);

/// CSV with optional header row (detected when the first row is not numeric).
PointCloud load_point_cloud(const std::filesystem::path& path, int intrinsic_dim);
PointCloud parse_point_cloud(std::istream& in, int intrinsic_dim, const std::string& name = "<stream>");

void write_csv(std::ostream& out, const Eigen::MatrixXd& rows, const std::vector<std::string>& header = {});

/// Shortest round-trip representation is not needed; 17 significant digits
/// reproduce every double exactly.
std::string format_double(double value);

/// 64-bit FNV-1a over raw bytes; used for spectrum fingerprints and manifests.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 14695981039346656037ull);

} // namespace specembed
