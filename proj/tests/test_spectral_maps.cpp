#include "specembed/eigensolver.hpp"
#include "specembed/error.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/shapes.hpp"
#include "specembed/spectral_maps.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace specembed;

namespace {

Spectrum sphere_spectrum(int level, int count)
{
    return smallest_eigenpairs(cotangent_laplacian(shapes::icosphere(level)), count);
}

} // namespace

TEST_SUITE("spectral_maps")
{
    TEST_CASE("eigenmap of C8 with m = 1 is the first nontrivial mode")
    {
        const auto lap = support::cycle(8, Eigen::VectorXd::Constant(8, 1.0 / 8.0));
        const auto d = dense_oracle(lap, 7);
        const auto e = eigenmap(d, 1);
        REQUIRE(e.dim() == 1);
        CHECK((e.coords.col(0) - d.eigenvectors.col(1)).cwiseAbs().maxCoeff() == 0.0);
        // the mode lies in the span of cos and sin at frequency 1
        Eigen::MatrixXd basis(8, 2);
        for (int i = 0; i < 8; ++i) {
            basis(i, 0) = std::sqrt(2.0) * std::cos(2.0 * std::numbers::pi * i / 8.0);
            basis(i, 1) = std::sqrt(2.0) * std::sin(2.0 * std::numbers::pi * i / 8.0);
        }
        CHECK(support::subspace_sine(basis, e.coords, lap.mass) <= 1e-10);
        CHECK(e.kind == MapKind::eigenmap);
        CHECK(e.fingerprint == d.fingerprint);
    }

    TEST_CASE("icosphere eigenmap image has constant norm")
    {
        const auto s = sphere_spectrum(3, 8);
        for (const auto& coords : {eigenmap(s, 3), gps_map(s, 3)}) {
            const Eigen::VectorXd r = coords.coords.rowwise().norm();
            CHECK(r.maxCoeff() <= 1.05 * r.minCoeff());
        }
    }

    TEST_CASE("m outside the computed range is rejected")
    {
        const auto s = sphere_spectrum(2, 5);
        CHECK_THROWS_AS(eigenmap(s, 0), ParameterError);
        CHECK_THROWS_AS(eigenmap(s, 6), ParameterError);
        CHECK_NOTHROW(eigenmap(s, 5));
        CHECK_THROWS_AS(diffusion_map(s, 3, 0.0), ParameterError);
        CHECK_THROWS_AS(diffusion_map(s, 3, -1.0), ParameterError);
    }

    TEST_CASE("diffusion map with tiny t reproduces the eigenmap")
    {
        const auto s = sphere_spectrum(2, 6);
        const auto e = eigenmap(s, 6);
        const auto d = diffusion_map(s, 6, 1e-15);
        CHECK((e.coords - d.coords).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(d.t == 1e-15);
    }

    TEST_CASE("diagonal rescaling identities")
    {
        Spectrum s;
        s.eigenvalues = Eigen::Vector3d(0.0, 2.0, 4.0);
        s.eigenvectors = Eigen::MatrixXd::Ones(4, 3);
        s.eigenvectors.col(1) << 1, -1, 1, -1;
        s.eigenvectors.col(2) << 1, 1, -1, -1;
        const auto d = diffusion_map(s, 2, 1.0);
        CHECK(d.coords(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        const auto g = gps_map(s, 2);
        CHECK(g.coords(0, 1) == 0.5);

        for (const auto& spec : {sphere_spectrum(2, 10), smallest_eigenpairs(cotangent_laplacian(shapes::lumpy_sphere(2)), 10)}) {
            const auto e = eigenmap(spec, 10);
            const double t = default_diffusion_time(spec);
            CHECK(t == 1.0 / spec.eigenvalues[1]);
            const Eigen::ArrayXd lam = spec.eigenvalues.segment(1, 10).array();
            const Eigen::MatrixXd dexp = e.coords * (-lam * t / 2.0).exp().matrix().asDiagonal();
            const Eigen::MatrixXd gexp = e.coords * lam.rsqrt().matrix().asDiagonal();
            CHECK((diffusion_map(spec, 10, t).coords - dexp).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((gps_map(spec, 10).coords - gexp).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    TEST_CASE("gps requires a positive first eigenvalue")
    {
        Spectrum s;
        s.eigenvalues = Eigen::Vector2d(0.0, 0.0);
        s.eigenvectors = Eigen::MatrixXd::Ones(3, 2);
        CHECK_THROWS_AS(gps_map(s, 1), ParameterError);
    }

    TEST_CASE("the three maps collapse the same vertex pairs")
    {
        // Phi^1 on the lumpy sphere folds the surface, so equal rows appear
        // only where the eigenmap rows coincide.
        Spectrum s;
        s.eigenvalues = Eigen::Vector3d(0.0, 1.5, 3.0);
        s.eigenvectors = Eigen::MatrixXd::Ones(5, 3);
        s.eigenvectors.col(1) << 0.3, 0.3, -0.7, 0.1, 0.3;
        s.eigenvectors.col(2) << 1.0, 1.0, 0.0, -1.0, 2.0;
        const auto e = eigenmap(s, 2).coords;
        const auto d = diffusion_map(s, 2, 0.7).coords;
        const auto g = gps_map(s, 2).coords;
        for (Index i = 0; i < 5; ++i)
            for (Index j = i + 1; j < 5; ++j) {
                const bool ee = e.row(i) == e.row(j);
                CHECK(ee == (d.row(i) == d.row(j)));
                CHECK(ee == (g.row(i) == g.row(j)));
            }
        CHECK(e.row(0) == e.row(1));
    }

    TEST_CASE("local distortion brackets")
    {
        const auto mesh = shapes::icosphere(3);
        const auto s = smallest_eigenpairs(cotangent_laplacian(mesh), 8);
        const auto gd = graph_distance(mesh);
        const auto e = eigenmap(s, 3);
        const auto b = local_distortion(e, gd, 0.3);
        CHECK(b.exhaustive);
        CHECK(b.pairs > 0);
        CHECK(b.upper / b.lower < 3.0);

        CHECK_THROWS_AS(local_distortion(e, gd, 1e-6), ParameterError);
        CHECK_THROWS_AS(local_distortion(e, gd, 0.0), ParameterError);

        // growing radius widens the bracket; past the diameter every pair counts
        double lower = b.lower, upper = b.upper;
        for (double r : {0.5, 1.0, 2.0, 4.0}) {
            const auto c = local_distortion(e, gd, r);
            CHECK(c.lower <= lower);
            CHECK(c.upper >= upper);
            lower = c.lower;
            upper = c.upper;
            if (r == 4.0) CHECK(c.pairs == mesh.num_vertices() * (mesh.num_vertices() - 1) / 2);
        }
    }

    TEST_CASE("isometric copies give the same bracket")
    {
        const auto mesh = shapes::lumpy_sphere(2);
        const Eigen::Matrix3d R = shapes::random_rotation(5);
        const Eigen::MatrixX3d moved = (mesh.vertices() * R.transpose()).rowwise() + Eigen::RowVector3d(1, -2, 0.5);
        const auto copy = mesh.with_vertices(moved);
        const auto a = local_distortion(eigenmap(smallest_eigenpairs(cotangent_laplacian(mesh), 6), 3),
                                        graph_distance(mesh), 0.4);
        const auto b = local_distortion(eigenmap(smallest_eigenpairs(cotangent_laplacian(copy), 6), 3),
                                        graph_distance(copy), 0.4);
        CHECK(a.pairs == b.pairs);
        CHECK(std::abs(a.lower - b.lower) <= 1e-10);
        CHECK(std::abs(a.upper - b.upper) <= 1e-10);
    }

    TEST_CASE("map kind names")
    {
        CHECK(to_string(MapKind::eigenmap) == "eigen");
        CHECK(to_string(MapKind::diffusion) == "diffusion");
        CHECK(to_string(MapKind::gps) == "gps");
    }
}
