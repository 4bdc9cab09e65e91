#include "specembed/analytic.hpp"
#include "specembed/embed_dim.hpp"
#include "specembed/error.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/shapes.hpp"

#include <doctest.h>
#include <json.hpp>

#include <limits>
#include <sstream>

using namespace specembed;

namespace {

struct SphereCase
{
    TriangleMesh mesh = shapes::icosphere(3);
    Spectrum spectrum = smallest_eigenpairs(cotangent_laplacian(mesh), 6);
    GraphDistances gd = graph_distance(mesh);
};

const SphereCase& sphere()
{
    static const SphereCase c;
    return c;
}

} // namespace

TEST_SUITE("embed_dim")
{
    TEST_CASE("icosphere embeds in R^3")
    {
        const auto& c = sphere();
        const auto report = embedding_dimension(c.spectrum, c.mesh, c.gd, 6);
        REQUIRE(report.m_star);
        CHECK(*report.m_star == 3);
        CHECK(report.intrinsic_dim == 2);
        REQUIRE(report.steps.size() == 2);
        CHECK_FALSE(report.steps[0].pass);
        CHECK(report.steps[1].pass);
        CHECK(report.steps[1].rank.min_ratio > 0.1);
        REQUIRE(report.steps[1].intersections);
        CHECK(*report.steps[1].intersections == 0);
        CHECK(report.delta == doctest::Approx(3.0 * c.mesh.mean_edge_length()).epsilon(0.05));
    }

    TEST_CASE("m_max below the intrinsic dimension gives no answer")
    {
        const auto& c = sphere();
        const auto report = embedding_dimension(c.spectrum, c.mesh, c.gd, 1);
        CHECK_FALSE(report.m_star);
        REQUIRE(report.steps.size() == 1);
        CHECK_FALSE(report.steps[0].rank.pass);
    }

    TEST_CASE("one coordinate cannot immerse a surface")
    {
        const auto& c = sphere();
        const auto stars = mesh_stars(c.mesh);
        const auto r = immersion_rank(eigenmap(c.spectrum, 1).coords, stars, 2, 1e-3);
        CHECK_FALSE(r.pass);
        CHECK(r.min_ratio == 0.0);
        const auto r3 = immersion_rank(eigenmap(c.spectrum, 3).coords, stars, 2, 1e-3);
        CHECK(r3.pass);
        CHECK(r3.min_ratio > 0.1);
    }

    TEST_CASE("all-zero coordinates fail injectivity")
    {
        const auto& c = sphere();
        const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(c.mesh.num_vertices(), 3);
        const auto r = injectivity_scan(zeros, c.gd, 0.5, 0.0);
        CHECK_FALSE(r.pass);
        CHECK(r.min_ratio == 0.0);
        CHECK(r.collisions == r.far_pairs);
        CHECK(exact_collisions(zeros, c.gd, 0.5) == r.far_pairs);
    }

    TEST_CASE("no far pairs is a vacuous pass")
    {
        const auto& c = sphere();
        const auto r = injectivity_scan(eigenmap(c.spectrum, 3).coords, c.gd, 100.0, 0.0);
        CHECK(r.pass);
        CHECK(r.vacuous);
        CHECK(r.far_pairs == 0);
    }

    TEST_CASE("adding coordinates never shrinks far-pair image distances")
    {
        const auto& c = sphere();
        double prev = 0.0;
        for (int m = 1; m <= 6; ++m) {
            const auto r = injectivity_scan(eigenmap(c.spectrum, m).coords, c.gd, 0.4, 0.0);
            CHECK(r.min_distance >= prev);
            prev = r.min_distance;
        }
    }

    TEST_CASE("Clifford torus coordinates are an immersion")
    {
        const TorusGrid grid(1.0, 2.5, 2, {16, 40});
        const auto r = immersion_rank(torus_grid_clifford(grid), torus_grid_stars(grid), 2, 1e-3);
        CHECK(r.pass);
        CHECK(r.min_ratio > 0.3);
        CHECK(r.underdetermined == 0);
    }

    TEST_CASE("underdetermined stars are flagged")
    {
        LocalStars stars;
        stars.neighbors = {{1}, {0}};
        stars.offsets = {Eigen::MatrixXd::Constant(1, 2, 1.0), Eigen::MatrixXd::Constant(1, 2, -1.0)};
        const auto r = immersion_rank(Eigen::MatrixXd::Identity(2, 2), stars, 2, 1e-3);
        CHECK_FALSE(r.pass);
        CHECK(r.underdetermined == 2);
    }

    TEST_CASE("torus proof basis needs six coordinates")
    {
        const double a = 1.0, b = 2.5;
        const TorusGrid grid(a, b, 2, {32, 80});
        const auto gd = torus_grid_distances(grid);
        const auto stars = torus_grid_stars(grid);
        EmbedThresholds th;
        th.delta = 0.1;
        th.tau = 0.0;
        th.sampling.exhaustive_limit = 4000;
        const auto provider = [&](int m) { return torus_proof_basis_coords(a, b, 2, grid, m).coords; };
        const auto report = embedding_dimension(provider, gd, stars, 2, 8, th);
        REQUIRE(report.m_star);
        CHECK(*report.m_star == 6);
        const auto& five = report.steps[report.steps.size() - 2];
        CHECK(five.m == 5);
        CHECK(five.injectivity.collisions > 0);
        // the exact collision count agrees with the full scan at tau = 0
        CHECK(exact_collisions(provider(5), gd, 0.1) == five.injectivity.collisions);
        CHECK(exact_collisions(provider(6), gd, 0.1) == 0);
    }

    TEST_CASE("self-intersection check")
    {
        const auto& c = sphere();
        const auto phi = eigenmap(c.spectrum, 3).coords;
        CHECK(self_intersection_check(c.mesh, phi).empty());
        CHECK(self_intersection_check(c.mesh, phi) == self_intersections_brute_force(phi, c.mesh.faces()));

        // a crossing image: the upper cap dropped through the lower half
        Eigen::MatrixXd folded = c.mesh.vertices();
        for (Index i = 0; i < folded.rows(); ++i)
            if (folded(i, 2) > 0.3) folded(i, 2) = -0.5 * folded(i, 2) - 0.3;
        const auto hits = self_intersection_check(c.mesh, folded);
        CHECK_FALSE(hits.empty());
        CHECK(hits == self_intersections_brute_force(folded, c.mesh.faces()));

        CHECK_THROWS_AS(self_intersection_check(c.mesh, eigenmap(c.spectrum, 4).coords), ParameterError);
    }

    TEST_CASE("answer is invariant under rigid motion and repeatable")
    {
        const auto& c = sphere();
        const auto base = embedding_dimension(c.spectrum, c.mesh, c.gd, 5);
        const auto again = embedding_dimension(c.spectrum, c.mesh, c.gd, 5);
        CHECK(base.m_star == again.m_star);
        CHECK(base.steps.back().injectivity.min_distance == again.steps.back().injectivity.min_distance);

        const Eigen::Matrix3d R = shapes::random_rotation(99);
        const auto moved = c.mesh.with_vertices(c.mesh.vertices() * R.transpose());
        const auto spec = smallest_eigenpairs(cotangent_laplacian(moved), 6);
        CHECK((spec.eigenvalues - c.spectrum.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9);
        const auto turned = embedding_dimension(spec, moved, graph_distance(moved), 5);
        CHECK(turned.m_star == base.m_star);
    }

    TEST_CASE("report is valid JSON")
    {
        const auto& c = sphere();
        const auto report = embedding_dimension(c.spectrum, c.mesh, c.gd, 4);
        std::stringstream out;
        write_report(out, report);
        const auto j = nlohmann::json::parse(out.str());
        CHECK(j.at("m_star").get<int>() == 3);
        CHECK(j.at("steps").size() == report.steps.size());
    }
}
