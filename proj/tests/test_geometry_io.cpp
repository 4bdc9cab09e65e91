#include "specembed/error.hpp"
#include "specembed/geometry.hpp"
#include "specembed/shapes.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace specembed;

namespace {

const char* tetra_off = R"(OFF
# regular tetrahedron
# genus 0
4 4 0
1 1 1
1 -1 -1
-1 1 -1
-1 -1 1
3 0 1 2
3 0 3 1
3 0 2 3
3 1 3 2
)";

std::string off_text(const TriangleMesh& mesh)
{
    std::ostringstream s;
    write_off(s, mesh.vertices(), mesh.faces(), mesh.declared_genus());
    return s.str();
}

} // namespace

TEST_SUITE("geometry_io")
{
    TEST_CASE("tetrahedron OFF has six edges")
    {
        std::istringstream in(tetra_off);
        const auto mesh = parse_mesh(in, MeshFormat::off);
        CHECK(mesh.num_vertices() == 4);
        CHECK(mesh.num_faces() == 4);
        CHECK(mesh.num_edges() == 6);
        CHECK(mesh.euler_characteristic() == 2);
        CHECK(mesh.declared_genus() == 0);
        CHECK(mesh.consistently_oriented());
    }

    TEST_CASE("level-4 icosphere has 2562 vertices and 5120 faces")
    {
        const auto mesh = shapes::icosphere(4);
        CHECK(mesh.num_vertices() == 2562);
        CHECK(mesh.num_faces() == 20 * 256);
        CHECK(mesh.euler_characteristic() == 2);
        // reparse through the file format
        std::istringstream in(off_text(mesh));
        const auto again = parse_mesh(in, MeshFormat::off);
        CHECK(again.num_faces() == 5120);
    }

    TEST_CASE("face index out of range is a parse error with its line")
    {
        std::ostringstream s;
        s << "OFF\n10 1 0\n";
        for (int i = 0; i < 10; ++i) s << i << " 0 0\n";
        s << "3 0 1 99\n";
        std::istringstream in(s.str());
        try {
            parse_mesh(in, MeshFormat::off, "bad.off");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 13);
            CHECK(std::string(e.what()).find("bad.off:13") != std::string::npos);
        }
    }

    TEST_CASE("malformed numbers report the line")
    {
        std::istringstream in("OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n");
        CHECK_THROWS_AS(parse_mesh(in, MeshFormat::off), ParseError);
    }

    TEST_CASE("disconnected mesh names its component sizes")
    {
        Eigen::MatrixX3d V(6, 3);
        V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 0, 0, 6, 0, 0, 5, 1, 0;
        Eigen::MatrixX3i F(2, 3);
        F << 0, 1, 2, 3, 4, 5;
        try {
            TriangleMesh mesh(V, F);
            FAIL("expected a connectivity error");
        } catch (const ConnectivityError& e) {
            CHECK(e.component_sizes() == std::vector<std::size_t>{3, 3});
        }
    }

    TEST_CASE("degenerate face is rejected")
    {
        Eigen::MatrixX3d V(3, 3);
        V << 0, 0, 0, 1, 0, 0, 0, 1, 0;
        Eigen::MatrixX3i F(1, 3);
        F << 0, 1, 1;
        CHECK_THROWS_AS(TriangleMesh(V, F), GeometryError);
    }

    TEST_CASE("declared genus must match the Euler characteristic")
    {
        const auto torus = shapes::torus(2.0, 0.5, 12, 8);
        CHECK(torus.euler_characteristic() == 0);
        CHECK(torus.declared_genus() == 1);
        std::string text = off_text(torus);
        std::istringstream ok(text);
        CHECK(parse_mesh(ok, MeshFormat::off).declared_genus() == 1);
        text.replace(text.find("# genus 1"), 9, "# genus 2");
        std::istringstream bad(text);
        CHECK_THROWS_AS(parse_mesh(bad, MeshFormat::off), GeometryError);
    }

    TEST_CASE("OFF and PLY round trip bit for bit")
    {
        const auto mesh = shapes::lumpy_sphere(2);
        const std::string first = off_text(mesh);
        std::istringstream in(first);
        CHECK(off_text(parse_mesh(in, MeshFormat::off)) == first);

        std::ostringstream ply;
        write_ply(ply, mesh.vertices(), mesh.faces(), 0);
        std::istringstream pin(ply.str());
        const auto back = parse_mesh(pin, MeshFormat::ply);
        CHECK(back.vertices() == mesh.vertices());
        CHECK(back.faces() == mesh.faces());
        CHECK(back.declared_genus() == 0);
    }

    TEST_CASE("CSV with 100 rows gives 100 points in R^3")
    {
        std::ostringstream s;
        s << "x,y,z\n";
        for (int i = 0; i < 100; ++i) s << i << ',' << i * i << ',' << std::sin(i) << '\n';
        std::istringstream in(s.str());
        const auto cloud = parse_point_cloud(in, 1);
        CHECK(cloud.size() == 100);
        CHECK(cloud.ambient_dim() == 3);
        CHECK(cloud.points()(7, 1) == 49.0);
    }

    TEST_CASE("CSV without header is read from the first row")
    {
        std::istringstream in("0,0\n1,0\n0,1\n1,1\n");
        CHECK(parse_point_cloud(in, 1).size() == 4);
    }

    TEST_CASE("duplicate CSV rows are rejected with their indices")
    {
        std::istringstream in("0,0\n1,0\n0,1\n1,0\n2,2\n");
        try {
            parse_point_cloud(in, 1);
            FAIL("expected a duplicate error");
        } catch (const GeometryError& e) {
            CHECK(std::string(e.what()).find("1") != std::string::npos);
            CHECK(std::string(e.what()).find("3") != std::string::npos);
        }
    }

    TEST_CASE("empty and ragged CSV inputs fail")
    {
        std::istringstream empty("");
        CHECK_THROWS_AS(parse_point_cloud(empty, 1), ParseError);
        std::istringstream header_only("x,y\n");
        CHECK_THROWS_AS(parse_point_cloud(header_only, 1), ParseError);
        std::istringstream ragged("0,0\n1,0,3\n0,1\n");
        CHECK_THROWS_AS(parse_point_cloud(ragged, 1), ParseError);
    }

    TEST_CASE("point cloud needs n + 2 points")
    {
        CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd::Random(3, 3), 2), GeometryError);
        CHECK_NOTHROW(PointCloud(Eigen::MatrixXd::Random(4, 3), 2));
    }

    TEST_CASE("unit path graph distances from vertex 0")
    {
        const std::vector<Edge> edges{{0, 1}, {1, 2}};
        const std::vector<double> lengths{1.0, 1.0};
        const WeightedGraph g(3, edges, lengths);
        const std::vector<Index> src{0};
        const auto gd = GraphDistances::dijkstra(g, src);
        CHECK(gd(0, 0) == 0.0);
        CHECK(gd(0, 1) == 1.0);
        CHECK(gd(0, 2) == 2.0);
        CHECK(gd(2, 0) == 2.0);
    }

    TEST_CASE("unreachable vertex is an error")
    {
        const std::vector<Edge> edges{{0, 1}};
        const std::vector<double> lengths{1.0};
        const WeightedGraph g(3, edges, lengths);
        const std::vector<Index> src{0};
        CHECK_THROWS_AS(GraphDistances::dijkstra(g, src), ConnectivityError);
    }

    TEST_CASE("icosphere antipodal graph distance brackets pi")
    {
        const auto mesh = shapes::icosphere(4);
        // the icosahedron's vertex 0 and its antipode are both mesh vertices
        const Eigen::RowVector3d p = mesh.vertices().row(0);
        Index anti = 0;
        (mesh.vertices().rowwise() + p).rowwise().norm().minCoeff(&anti);
        const std::vector<Index> src{0};
        const double d = graph_distance(mesh, src)(0, anti);
        CHECK(d >= 0.98 * std::numbers::pi);
        CHECK(d <= 1.10 * std::numbers::pi);
    }

    TEST_CASE("all-source distances are exactly symmetric and metric")
    {
        const auto mesh = shapes::jittered_sphere(2, 0.2);
        const auto gd = graph_distance(mesh);
        CHECK(gd.covers_all());
        const Index n = mesh.num_vertices();
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) REQUIRE(gd(i, j) == gd(j, i));
        std::mt19937_64 rng(1);
        std::uniform_int_distribution<Index> pick(0, n - 1);
        for (int s = 0; s < 20000; ++s) {
            const Index a = pick(rng), b = pick(rng), c = pick(rng);
            REQUIRE(gd(a, c) <= gd(a, b) + gd(b, c) + 1e-12);
        }
    }

    TEST_CASE("point cloud k-NN distances")
    {
        Eigen::MatrixXd pts(5, 1);
        pts << 0, 1, 2, 3, 4;
        const PointCloud cloud(pts, 1);
        const std::vector<Index> src{0};
        const auto gd = graph_distance(cloud, src, 1);
        CHECK(gd(0, 4) == doctest::Approx(4.0));
    }

    TEST_CASE("format_double round trips")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng) * std::pow(10.0, i % 40 - 20);
            REQUIRE(std::stod(format_double(v)) == v);
        }
    }
}
