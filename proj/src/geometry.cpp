#include "specembed/geometry.hpp"

#include "specembed/error.hpp"

#include <Eigen/Geometry>
#include "specembed/kdtree.hpp"
#include "specembed/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace specembed {

namespace {

struct DisjointSets
{
    std::vector<Index> parent;
    explicit DisjointSets(Index n)
        : parent(static_cast<std::size_t>(n))
    {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index v)
    {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(Index a, Index b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> sizes()
    {
        std::map<Index, std::size_t> count;
        for (Index v = 0; v < static_cast<Index>(parent.size()); ++v) ++count[find(v)];
        std::vector<std::size_t> out;
        for (const auto& [root, c] : count) out.push_back(c);
        std::sort(out.rbegin(), out.rend());
        return out;
    }
};

std::string join_sizes(const std::vector<std::size_t>& sizes)
{
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(sizes[i]);
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// TriangleMesh
// ---------------------------------------------------------------------------

TriangleMesh::TriangleMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces, std::optional<int> declared_genus)
    : m_vertices(std::move(vertices))
    , m_faces(std::move(faces))
    , m_genus(declared_genus)
{
    const Index nv = m_vertices.rows();
    if (nv == 0 || m_faces.rows() == 0) throw GeometryError("mesh has no vertices or no faces");
    if (!m_vertices.allFinite()) throw GeometryError("mesh has non-finite vertex coordinates");

    DisjointSets sets(nv);
    std::set<Edge> edges;
    for (Index f = 0; f < m_faces.rows(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const Index v = m_faces(f, c);
            if (v < 0 || v >= nv)
                throw GeometryError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                                    " but the mesh has " + std::to_string(nv) + " vertices");
        }
        const Index a = m_faces(f, 0), b = m_faces(f, 1), c = m_faces(f, 2);
        if (a == b || b == c || a == c)
            throw GeometryError("face " + std::to_string(f) + " is degenerate (repeated vertex index)");
        for (int k = 0; k < 3; ++k) {
            const Index u = m_faces(f, k), w = m_faces(f, (k + 1) % 3);
            edges.insert({std::min(u, w), std::max(u, w)});
            sets.unite(u, w);
        }
    }
    m_edges.assign(edges.begin(), edges.end());

    const auto sizes = sets.sizes();
    if (sizes.size() > 1)
        throw ConnectivityError("mesh is disconnected: " + std::to_string(sizes.size()) +
                                    " components of sizes " + join_sizes(sizes),
                                sizes);

    if (m_genus && euler_characteristic() != 2 - 2 * *m_genus)
        throw GeometryError("Euler characteristic " + std::to_string(euler_characteristic()) +
                            " contradicts declared genus " + std::to_string(*m_genus));
}

int TriangleMesh::euler_characteristic() const
{
    return static_cast<int>(num_vertices() - num_edges() + num_faces());
}

bool TriangleMesh::consistently_oriented() const
{
    std::set<Edge> directed;
    for (Index f = 0; f < m_faces.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            if (!directed.insert({m_faces(f, k), m_faces(f, (k + 1) % 3)}).second) return false;
        }
    }
    return true;
}

double TriangleMesh::mean_edge_length() const
{
    double total = 0.0;
    for (const auto& e : m_edges) total += (m_vertices.row(e[0]) - m_vertices.row(e[1])).norm();
    return total / static_cast<double>(m_edges.size());
}

double TriangleMesh::surface_area() const
{
    double area = 0.0;
    for (Index f = 0; f < m_faces.rows(); ++f) {
        const Eigen::Vector3d a = m_vertices.row(m_faces(f, 0));
        const Eigen::Vector3d b = m_vertices.row(m_faces(f, 1));
        const Eigen::Vector3d c = m_vertices.row(m_faces(f, 2));
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

TriangleMesh TriangleMesh::with_vertices(Eigen::MatrixX3d vertices) const
{
    if (vertices.rows() != m_vertices.rows()) throw GeometryError("vertex count mismatch");
    TriangleMesh copy = *this;
    copy.m_vertices = std::move(vertices);
    if (!copy.m_vertices.allFinite()) throw GeometryError("mesh has non-finite vertex coordinates");
    return copy;
}

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

PointCloud::PointCloud(Eigen::MatrixXd points, int intrinsic_dim)
    : m_points(std::move(points))
    , m_intrinsic_dim(intrinsic_dim)
{
    if (m_points.rows() == 0) throw GeometryError("point cloud is empty");
    if (intrinsic_dim < 1) throw ParameterError("intrinsic dimension must be positive");
    if (m_points.rows() < intrinsic_dim + 2)
        throw GeometryError("point cloud needs at least " + std::to_string(intrinsic_dim + 2) + " points, got " +
                            std::to_string(m_points.rows()));
    if (!m_points.allFinite()) throw GeometryError("point cloud has non-finite coordinates");

    const KdTree tree(m_points);
    std::set<std::pair<Index, Index>> dups;
    for (Index i = 0; i < m_points.rows(); ++i) {
        const auto nn = tree.k_nearest(m_points.row(i), 1, i);
        if (!nn.empty() && std::sqrt(nn.front().second) <= duplicate_tolerance)
            dups.insert({std::min(i, nn.front().first), std::max(i, nn.front().first)});
    }
    if (!dups.empty()) {
        std::string list;
        for (const auto& [a, b] : dups) {
            if (!list.empty()) list += ", ";
            list += "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
        }
        throw GeometryError("duplicate points within 1e-12: " + list);
    }
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

WeightedGraph::WeightedGraph(Index num_vertices, std::span<const Edge> edges, std::span<const double> lengths)
{
    if (edges.size() != lengths.size()) throw ParameterError("edge and length counts differ");
    std::vector<Index> degree(static_cast<std::size_t>(num_vertices), 0);
    for (const auto& e : edges) {
        if (e[0] < 0 || e[1] < 0 || e[0] >= num_vertices || e[1] >= num_vertices || e[0] == e[1])
            throw ParameterError("invalid graph edge");
        ++degree[e[0]];
        ++degree[e[1]];
    }
    m_offsets.assign(static_cast<std::size_t>(num_vertices) + 1, 0);
    for (Index v = 0; v < num_vertices; ++v) m_offsets[v + 1] = m_offsets[v] + degree[v];
    m_targets.resize(static_cast<std::size_t>(m_offsets.back()));
    m_lengths.resize(m_targets.size());
    std::vector<Index> fill(m_offsets.begin(), m_offsets.end() - 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [a, b] = edges[k];
        if (!(lengths[k] >= 0.0) || !std::isfinite(lengths[k])) throw ParameterError("invalid edge length");
        m_targets[fill[a]] = b;
        m_lengths[fill[a]++] = lengths[k];
        m_targets[fill[b]] = a;
        m_lengths[fill[b]++] = lengths[k];
    }
}

std::vector<std::size_t> WeightedGraph::component_sizes() const
{
    DisjointSets sets(num_vertices());
    for (Index v = 0; v < num_vertices(); ++v)
        for (Index w : neighbors(v)) sets.unite(v, w);
    return sets.sizes();
}

WeightedGraph mesh_graph(const TriangleMesh& mesh)
{
    std::vector<double> lengths;
    lengths.reserve(mesh.edges().size());
    for (const auto& e : mesh.edges())
        lengths.push_back((mesh.vertices().row(e[0]) - mesh.vertices().row(e[1])).norm());
    return WeightedGraph(mesh.num_vertices(), mesh.edges(), lengths);
}

std::vector<Edge> knn_edges(const Eigen::MatrixXd& points, int k)
{
    const Index n = points.rows();
    if (k < 1 || k > n - 1)
        throw ParameterError("k = " + std::to_string(k) + " must lie in [1, N-1] with N = " + std::to_string(n));
    const KdTree tree(points);
    std::set<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        for (const auto& [j, d2] : tree.k_nearest(points.row(i), k, i)) edges.insert({std::min(i, j), std::max(i, j)});
    }
    return {edges.begin(), edges.end()};
}

WeightedGraph knn_graph(const PointCloud& cloud, int k)
{
    const auto edges = knn_edges(cloud.points(), k);
    std::vector<double> lengths;
    lengths.reserve(edges.size());
    for (const auto& e : edges) lengths.push_back((cloud.points().row(e[0]) - cloud.points().row(e[1])).norm());
    return WeightedGraph(cloud.size(), edges, lengths);
}

// ---------------------------------------------------------------------------
// GraphDistances
// ---------------------------------------------------------------------------

namespace {

void dijkstra_row(const WeightedGraph& graph, Index source, double* out)
{
    const Index n = graph.num_vertices();
    std::fill(out, out + n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    out[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > out[v]) continue;
        const auto nbrs = graph.neighbors(v);
        const auto lens = graph.lengths(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double nd = d + lens[k];
            if (nd < out[nbrs[k]]) {
                out[nbrs[k]] = nd;
                queue.push({nd, nbrs[k]});
            }
        }
    }
}

} // namespace

GraphDistances GraphDistances::dijkstra(const WeightedGraph& graph, std::span<const Index> sources)
{
    GraphDistances gd;
    gd.m_num_points = graph.num_vertices();
    gd.m_slot.assign(static_cast<std::size_t>(gd.m_num_points), -1);
    for (Index s : sources) {
        if (s < 0 || s >= gd.m_num_points) throw ParameterError("source index out of range");
        if (gd.m_slot[s] >= 0) continue;
        gd.m_slot[s] = static_cast<Index>(gd.m_sources.size());
        gd.m_sources.push_back(s);
    }
    const Index n = gd.m_num_points;
    gd.m_table.resize(gd.m_sources.size() * static_cast<std::size_t>(n));
    parallel_for(static_cast<std::ptrdiff_t>(gd.m_sources.size()),
                 [&](std::ptrdiff_t r) { dijkstra_row(graph, gd.m_sources[r], gd.m_table.data() + r * n); });

    for (std::size_t r = 0; r < gd.m_sources.size(); ++r) {
        for (Index v = 0; v < n; ++v) {
            if (!std::isfinite(gd.m_table[r * n + v]))
                throw ConnectivityError("vertex " + std::to_string(v) + " is unreachable from source " +
                                            std::to_string(gd.m_sources[r]),
                                        graph.component_sizes());
        }
    }
    return gd;
}

GraphDistances GraphDistances::all_pairs(const WeightedGraph& graph)
{
    std::vector<Index> all(static_cast<std::size_t>(graph.num_vertices()));
    std::iota(all.begin(), all.end(), Index{0});
    return dijkstra(graph, all);
}

GraphDistances GraphDistances::from_metric(Index num_points, Metric metric)
{
    GraphDistances gd;
    gd.m_num_points = num_points;
    gd.m_metric = std::move(metric);
    return gd;
}

double GraphDistances::operator()(Index i, Index j) const
{
    if (m_metric) return m_metric(i, j);
    const Index si = m_slot[i];
    const Index sj = m_slot[j];
    const auto n = static_cast<std::size_t>(m_num_points);
    if (si >= 0 && sj >= 0) return std::min(m_table[si * n + j], m_table[sj * n + i]);
    if (si >= 0) return m_table[si * n + j];
    if (sj >= 0) return m_table[sj * n + i];
    throw ParameterError("neither vertex " + std::to_string(i) + " nor " + std::to_string(j) +
                         " is a distance source");
}

GraphDistances graph_distance(const TriangleMesh& mesh, std::span<const Index> sources)
{
    return GraphDistances::dijkstra(mesh_graph(mesh), sources);
}

GraphDistances graph_distance(const PointCloud& cloud, std::span<const Index> sources, int k)
{
    return GraphDistances::dijkstra(knn_graph(cloud, k), sources);
}

GraphDistances graph_distance(const TriangleMesh& mesh)
{
    return GraphDistances::all_pairs(mesh_graph(mesh));
}

GraphDistances graph_distance(const PointCloud& cloud, int k)
{
    return GraphDistances::all_pairs(knn_graph(cloud, k));
}

// ---------------------------------------------------------------------------
// Text I/O
// ---------------------------------------------------------------------------

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed)
{
    auto h = seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

/// Line reader that strips comments and tracks 1-based line numbers.
class LineReader
{
public:
    LineReader(std::istream& in, std::string name, char comment)
        : m_in(in)
        , m_name(std::move(name))
        , m_comment(comment)
    {}

    /// Next non-empty line split into tokens; false at end of input.
    bool next(std::vector<std::string>& tokens)
    {
        std::string line;
        while (std::getline(m_in, line)) {
            ++m_line;
            if (m_comment) {
                const auto pos = line.find(m_comment);
                if (pos != std::string::npos) {
                    comments.push_back(line.substr(pos + 1));
                    line.erase(pos);
                }
            }
            tokens.clear();
            std::istringstream ss(line);
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(m_name, m_line, what); }

    double number(const std::string& token) const
    {
        double v = 0.0;
        const auto* end = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("expected a number, got '" + token + "'");
        return v;
    }

    long integer(const std::string& token) const
    {
        long v = 0;
        const auto* end = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("expected an integer, got '" + token + "'");
        return v;
    }

    std::size_t line() const { return m_line; }
    const std::string& name() const { return m_name; }

    std::vector<std::string> comments;

private:
    std::istream& m_in;
    std::string m_name;
    char m_comment;
    std::size_t m_line = 0;
};

std::optional<int> genus_from_comments(const std::vector<std::string>& comments)
{
    for (const auto& c : comments) {
        std::istringstream ss(c);
        std::string key;
        int g = 0;
        if (ss >> key && (key == "genus" || key == "genus:") && ss >> g) return g;
    }
    return std::nullopt;
}

TriangleMesh build_mesh(LineReader& reader, Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces,
                        std::optional<int> genus)
{
    try {
        return TriangleMesh(std::move(vertices), std::move(faces), genus);
    } catch (const ConnectivityError& e) {
        throw ConnectivityError(reader.name() + ": " + e.what(), e.component_sizes());
    } catch (const GeometryError& e) {
        throw GeometryError(reader.name() + ": " + e.what());
    }
}

void read_face(LineReader& reader, const std::vector<std::string>& t, std::size_t first, Index nv,
               Eigen::MatrixX3i& faces, Index f)
{
    if (t.size() < first + 1) reader.fail("empty face record");
    const long count = reader.integer(t[first]);
    if (count != 3) reader.fail("only triangle faces are supported, got a " + std::to_string(count) + "-gon");
    if (t.size() < first + 4) reader.fail("face record has fewer than 3 indices");
    for (int c = 0; c < 3; ++c) {
        const long v = reader.integer(t[first + 1 + c]);
        if (v < 0 || v >= nv)
            reader.fail("face index " + std::to_string(v) + " out of range for " + std::to_string(nv) + " vertices");
        faces(f, c) = static_cast<int>(v);
    }
}

TriangleMesh parse_off(std::istream& in, const std::string& name)
{
    LineReader reader(in, name, '#');
    std::vector<std::string> t;
    if (!reader.next(t)) reader.fail("empty file");
    std::size_t pos = 0;
    if (t[0] != "OFF") reader.fail("missing OFF header");
    pos = 1;
    if (t.size() == 1) {
        if (!reader.next(t)) reader.fail("missing element counts");
        pos = 0;
    }
    if (t.size() < pos + 2) reader.fail("expected vertex and face counts");
    const long nv = reader.integer(t[pos]);
    const long nf = reader.integer(t[pos + 1]);
    if (nv <= 0 || nf <= 0) reader.fail("vertex and face counts must be positive");

    Eigen::MatrixX3d vertices(nv, 3);
    for (long v = 0; v < nv; ++v) {
        if (!reader.next(t)) reader.fail("unexpected end of file in vertex list");
        if (t.size() < 3) reader.fail("vertex record needs 3 coordinates");
        for (int c = 0; c < 3; ++c) vertices(v, c) = reader.number(t[c]);
    }
    Eigen::MatrixX3i faces(nf, 3);
    for (long f = 0; f < nf; ++f) {
        if (!reader.next(t)) reader.fail("unexpected end of file in face list");
        read_face(reader, t, 0, nv, faces, f);
    }
    // pick up trailing comments too
    while (reader.next(t)) reader.fail("unexpected data after face list");
    return build_mesh(reader, std::move(vertices), std::move(faces), genus_from_comments(reader.comments));
}

TriangleMesh parse_ply(std::istream& in, const std::string& name)
{
    LineReader reader(in, name, 0);
    std::vector<std::string> t;
    if (!reader.next(t) || t[0] != "ply") reader.fail("missing ply magic");

    long nv = -1, nf = -1;
    std::vector<std::string> vertex_props;
    std::string current;
    std::optional<int> genus;
    bool face_list = false;
    for (;;) {
        if (!reader.next(t)) reader.fail("unterminated header");
        if (t[0] == "end_header") break;
        if (t[0] == "format") {
            if (t.size() < 2 || t[1] != "ascii") reader.fail("only ASCII PLY is supported");
        } else if (t[0] == "comment") {
            if (t.size() >= 3 && t[1] == "genus") genus = static_cast<int>(reader.integer(t[2]));
        } else if (t[0] == "element") {
            if (t.size() < 3) reader.fail("malformed element line");
            current = t[1];
            if (current == "vertex") nv = reader.integer(t[2]);
            else if (current == "face") nf = reader.integer(t[2]);
            else reader.fail("unsupported element '" + current + "'");
        } else if (t[0] == "property") {
            if (current == "vertex") {
                if (t.size() < 3) reader.fail("malformed property line");
                vertex_props.push_back(t.back());
            } else if (current == "face") {
                if (t.size() < 5 || t[1] != "list") reader.fail("face property must be a list");
                face_list = true;
            }
        } else if (t[0] != "obj_info") {
            reader.fail("unknown header keyword '" + t[0] + "'");
        }
    }
    if (nv <= 0 || nf <= 0) reader.fail("vertex and face counts must be positive");
    if (!face_list) reader.fail("face element lacks a vertex index list");
    int xyz[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < vertex_props.size(); ++p) {
        if (vertex_props[p] == "x") xyz[0] = static_cast<int>(p);
        if (vertex_props[p] == "y") xyz[1] = static_cast<int>(p);
        if (vertex_props[p] == "z") xyz[2] = static_cast<int>(p);
    }
    if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) reader.fail("vertex element lacks x, y, z");

    Eigen::MatrixX3d vertices(nv, 3);
    for (long v = 0; v < nv; ++v) {
        if (!reader.next(t)) reader.fail("unexpected end of file in vertex list");
        if (t.size() < vertex_props.size()) reader.fail("vertex record has too few values");
        for (int c = 0; c < 3; ++c) vertices(v, c) = reader.number(t[xyz[c]]);
    }
    Eigen::MatrixX3i faces(nf, 3);
    for (long f = 0; f < nf; ++f) {
        if (!reader.next(t)) reader.fail("unexpected end of file in face list");
        read_face(reader, t, 0, nv, faces, f);
    }
    return build_mesh(reader, std::move(vertices), std::move(faces), genus);
}

MeshFormat format_from_path(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::off;
    if (ext == ".ply") return MeshFormat::ply;
    throw ParameterError("cannot infer mesh format from extension '" + ext + "'");
}

} // namespace

TriangleMesh parse_mesh(std::istream& in, MeshFormat format, const std::string& name)
{
    return format == MeshFormat::off ? parse_off(in, name) : parse_ply(in, name);
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_mesh(in, format.value_or(format_from_path(path)), path.string());
}

void write_off(std::ostream& out, const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
               std::optional<int> genus)
{
    out << "OFF\n";
    if (genus) out << "# genus " << *genus << '\n';
    out << vertices.rows() << ' ' << faces.rows() << " 0\n";
    for (Index v = 0; v < vertices.rows(); ++v)
        out << format_double(vertices(v, 0)) << ' ' << format_double(vertices(v, 1)) << ' '
            << format_double(vertices(v, 2)) << '\n';
    for (Index f = 0; f < faces.rows(); ++f)
        out << "3 " << faces(f, 0) << ' ' << faces(f, 1) << ' ' << faces(f, 2) << '\n';
}

void write_ply(std::ostream& out, const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
               std::optional<int> genus)
{
    out << "ply\nformat ascii 1.0\n";
    if (genus) out << "comment genus " << *genus << '\n';
    out << "element vertex " << vertices.rows() << "\nproperty double x\nproperty double y\nproperty double z\n"
        << "element face " << faces.rows() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (Index v = 0; v < vertices.rows(); ++v)
        out << format_double(vertices(v, 0)) << ' ' << format_double(vertices(v, 1)) << ' '
            << format_double(vertices(v, 2)) << '\n';
    for (Index f = 0; f < faces.rows(); ++f)
        out << "3 " << faces(f, 0) << ' ' << faces(f, 1) << ' ' << faces(f, 2) << '\n';
}

void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh, std::optional<MeshFormat> format)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    if (format.value_or(format_from_path(path)) == MeshFormat::off)
        write_off(out, mesh.vertices(), mesh.faces(), mesh.declared_genus());
    else
        write_ply(out, mesh.vertices(), mesh.faces(), mesh.declared_genus());
}

PointCloud parse_point_cloud(std::istream& in, int intrinsic_dim, const std::string& name)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) {
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
        }
        std::vector<double> values;
        bool numeric = true;
        for (const auto& f : fields) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
                numeric = false;
                break;
            }
            values.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue; // header row
            }
            throw ParseError(name, lineno, "non-numeric field in data row");
        }
        first = false;
        if (!rows.empty() && values.size() != rows.front().size())
            throw ParseError(name, lineno,
                             "ragged row: expected " + std::to_string(rows.front().size()) + " columns, got " +
                                 std::to_string(values.size()));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError(name, lineno, "empty input: no data rows");

    Eigen::MatrixXd points(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) points(r, c) = rows[r][c];
    return PointCloud(std::move(points), intrinsic_dim);
}

PointCloud load_point_cloud(const std::filesystem::path& path, int intrinsic_dim)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_point_cloud(in, intrinsic_dim, path.string());
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& rows, const std::vector<std::string>& header)
{
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    if (!header.empty()) out << '\n';
    for (Index r = 0; r < rows.rows(); ++r) {
        for (Index c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << format_double(rows(r, c));
        out << '\n';
    }
}

} // namespace specembed
