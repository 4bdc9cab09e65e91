#include "specembed/shapes.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace specembed::shapes {

namespace {

TriangleMesh make(const std::vector<Eigen::Vector3d>& verts, const std::vector<std::array<int, 3>>& faces,
                  std::optional<int> genus)
{
    Eigen::MatrixX3d V(static_cast<Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Index>(i)) = verts[i].transpose();
    Eigen::MatrixX3i F(static_cast<Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i)
        F.row(static_cast<Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
    return TriangleMesh(std::move(V), std::move(F), genus);
}

} // namespace

TriangleMesh icosphere(int level, double radius)
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    for (auto& v : verts) v *= radius;
    return make(verts, faces, 0);
}

TriangleMesh octahedron()
{
    const std::vector<Eigen::Vector3d> verts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const std::vector<std::array<int, 3>> faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                                   {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return make(verts, faces, 0);
}

TriangleMesh tetrahedron()
{
    const double s = 1.0 / std::sqrt(3.0);
    const std::vector<Eigen::Vector3d> verts = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    const std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return make(verts, faces, 0);
}

TriangleMesh lumpy_sphere(int level, std::uint64_t seed)
{
    const TriangleMesh base = icosphere(level);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    struct Bump
    {
        Eigen::Vector3d dir;
        double phase;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
        bumps.push_back({1.7 * d.normalized(), phase(rng)});
    }
    Eigen::MatrixX3d V = base.vertices();
    for (Index i = 0; i < V.rows(); ++i) {
        const Eigen::Vector3d p = V.row(i);
        double r = 1.0;
        for (const auto& b : bumps) r += 0.07 * std::sin(b.dir.dot(p) + b.phase);
        V.row(i) = (r * p).cwiseProduct(Eigen::Vector3d(1.25, 1.0, 0.8)).transpose();
    }
    return base.with_vertices(std::move(V));
}

TriangleMesh jittered_sphere(int level, double amount, std::uint64_t seed)
{
    const TriangleMesh base = icosphere(level);
    const double h = base.mean_edge_length();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixX3d V = base.vertices();
    for (Index i = 0; i < V.rows(); ++i) {
        const Eigen::Vector3d p = V.row(i);
        const Eigen::Vector3d d(uni(rng), uni(rng), uni(rng));
        const Eigen::Vector3d tangential = d - d.dot(p) * p;
        V.row(i) = (p + amount * h * tangential).normalized().transpose();
    }
    return base.with_vertices(std::move(V));
}

TriangleMesh torus(double major_radius, double minor_radius, int nu, int nv)
{
    std::vector<Eigen::Vector3d> verts;
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * std::numbers::pi * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * std::numbers::pi * j / nv;
            verts.emplace_back((major_radius + minor_radius * std::cos(v)) * std::cos(u),
                               (major_radius + minor_radius * std::cos(v)) * std::sin(u), minor_radius * std::sin(v));
        }
    }
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const int a = i * nv + j;
            const int b = ((i + 1) % nu) * nv + j;
            const int c = ((i + 1) % nu) * nv + (j + 1) % nv;
            const int d = i * nv + (j + 1) % nv;
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    }
    return make(verts, faces, 1);
}

Eigen::Matrix3d random_rotation(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    return q.normalized().toRotationMatrix();
}

} // namespace specembed::shapes
