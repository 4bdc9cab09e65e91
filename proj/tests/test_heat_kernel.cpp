#include "specembed/eigensolver.hpp"
#include "specembed/error.hpp"
#include "specembed/heat_kernel.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/shapes.hpp"
#include "specembed/spectral_maps.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

using namespace specembed;

namespace {

const Spectrum& sphere162()
{
    static const Spectrum s = dense_oracle(cotangent_laplacian(shapes::icosphere(2)), 161);
    return s;
}

} // namespace

TEST_SUITE("heat_kernel")
{
    TEST_CASE("order zero is exactly one and long times converge to one")
    {
        const auto& s = sphere162();
        for (double t : {1e-3, 0.1, 5.0})
            for (Index i : {0, 17, 100}) CHECK(partial_heat_kernel(s, 0, t, i, 42) == 1.0);
        CHECK(partial_heat_kernel(s, 30, 1e3, 3, 77) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("diagonal is nonnegative and nondecreasing in k")
    {
        const auto& s = sphere162();
        for (Index i : {0, 5, 161}) {
            double prev = 0.0;
            for (int k = 0; k <= 161; ++k) {
                const double v = partial_heat_kernel(s, k, 0.01, i, i);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }

    TEST_CASE("kernel is symmetric bit for bit")
    {
        const auto s = smallest_eigenpairs(cotangent_laplacian(shapes::lumpy_sphere(3)), 20);
        for (Index i = 0; i < s.num_vertices(); i += 37)
            for (Index j = 1; j < s.num_vertices(); j += 53)
                CHECK(partial_heat_kernel(s, 20, 0.02, i, j) == partial_heat_kernel(s, 20, 0.02, j, i));
    }

    TEST_CASE("parameter errors")
    {
        const auto& s = sphere162();
        CHECK_THROWS_AS(partial_heat_kernel(s, 3, 0.0, 0, 1), ParameterError);
        CHECK_THROWS_AS(partial_heat_kernel(s, 162, 1.0, 0, 1), ParameterError);
        CHECK_THROWS_AS(partial_heat_kernel(s, 3, 1.0, 0, 162), ParameterError);
        CHECK_THROWS_AS(empirical_remainder(s, 163, 1.0), ParameterError);
        CHECK_THROWS_AS(empirical_remainder(s, 3, -1.0), ParameterError);
    }

    TEST_CASE("empirical remainder")
    {
        const auto& full = sphere162();
        const int K = static_cast<int>(full.eigenvalues.size());
        CHECK(empirical_remainder(full, K, 0.5) == 0.0);

        const double a = empirical_remainder(full, 3, 0.01);
        const double b = empirical_remainder(full, 3, 0.02);
        CHECK(b < a);

        // a truncated spectrum underestimates the remainder of the full one
        const auto part = dense_oracle(cotangent_laplacian(shapes::icosphere(2)), 40);
        const double partial = empirical_remainder(part, 10, 0.5);
        const double complete = empirical_remainder(full, 10, 0.5);
        CHECK(partial <= complete);
        // with every mode present the remainder is the diagonal heat kernel minus p^{k-1}
        double direct = 0.0;
        for (Index x = 0; x < full.num_vertices(); ++x) {
            double v = 0.0;
            for (int j = 10; j < K; ++j) v += std::exp(-full.eigenvalues[j] * 0.5) * full.eigenvectors(x, j) * full.eigenvectors(x, j);
            direct = std::max(direct, v);
        }
        CHECK(complete == doctest::Approx(direct).epsilon(1e-12));
    }

    TEST_CASE("default time grid")
    {
        const auto& s = sphere162();
        const auto grid = default_time_grid(s, 5);
        REQUIRE(grid.size() == 16);
        CHECK(grid.front() == doctest::Approx(1.0 / (10.0 * s.eigenvalues[5])).epsilon(1e-12));
        CHECK(grid.back() == doctest::Approx(10.0 / s.eigenvalues[1]).epsilon(1e-12));
        for (std::size_t i = 1; i < grid.size(); ++i)
            CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-10));
    }

    TEST_CASE("identical eigenfunction rows cannot be separated")
    {
        Spectrum s;
        s.eigenvalues = Eigen::Vector3d(0.0, 1.0, 2.0);
        s.eigenvectors.resize(4, 3);
        s.eigenvectors << 1, 0.5, -1, 1, 0.5, -1, 1, -1.2, 0.3, 1, 0.2, 1.4;
        const auto gd = GraphDistances::from_metric(4, [](Index i, Index j) {
            return i == j ? 0.0 : ((i < 2) == (j < 2) ? 0.1 : 1.0) + (i + j == 1 ? 10.0 : 0.0);
        });
        const auto cert = separation_certificate(s, gd, 5.0, 2, {0.1, 1.0, 10.0});
        CHECK_FALSE(cert.pass);
        CHECK(cert.margin <= 0.0);
        CHECK(cert.pairs_tested == 1);
    }

    TEST_CASE("icosphere far pairs are certified by d <= 3")
    {
        const auto mesh = shapes::icosphere(3);
        const auto s = smallest_eigenpairs(cotangent_laplacian(mesh), 10);
        const auto gd = graph_distance(mesh);
        const auto grid = default_time_grid(s, 10);
        const auto cert = separation_certificate(s, gd, 1.0, 10, grid);
        REQUIRE(cert.pass);
        CHECK(cert.d <= 3);
        CHECK(cert.margin > 0.0);
        CHECK(cert.exhaustive);
        CHECK(cert.pairs_tested > 0);

        // soundness: the certified eigenmap separates every tested pair
        const auto phi = eigenmap(s, cert.d).coords;
        double closest = std::numeric_limits<double>::infinity();
        for (Index x = 0; x < mesh.num_vertices(); ++x)
            for (Index y = x + 1; y < mesh.num_vertices(); ++y)
                if (gd(x, y) >= 1.0) closest = std::min(closest, (phi.row(x) - phi.row(y)).norm());
        CHECK(closest > 0.0);

        // a finer grid containing the certified time keeps the certificate
        std::vector<double> finer{cert.T};
        for (double t : grid) finer.push_back(t * 1.1);
        const auto again = separation_certificate(s, gd, 1.0, cert.d, finer);
        CHECK(again.pass);
        CHECK(again.d <= cert.d);
        CHECK(again.margin >= cert.margin);
    }

    TEST_CASE("epsilon beyond the diameter passes vacuously")
    {
        const auto mesh = shapes::icosphere(2);
        const auto& s = sphere162();
        const auto cert = separation_certificate(s, graph_distance(mesh), 100.0, 4, default_time_grid(s, 4));
        CHECK(cert.pass);
        CHECK(cert.d == 1);
        CHECK(cert.pairs_tested == 0);
        CHECK(std::isinf(cert.margin));

        std::stringstream out;
        write_certificate(out, cert);
        const auto j = nlohmann::json::parse(out.str());
        CHECK(j.at("pass").get<bool>());
        CHECK(j.at("d").get<int>() == 1);
        CHECK(j.at("margin").is_null());
    }

    TEST_CASE("certificate parameter errors")
    {
        const auto mesh = shapes::icosphere(2);
        const auto& s = sphere162();
        const auto gd = graph_distance(mesh);
        CHECK_THROWS_AS(separation_certificate(s, gd, 0.0, 3, {1.0}), ParameterError);
        CHECK_THROWS_AS(separation_certificate(s, gd, 1.0, 3, {}), ParameterError);
        CHECK_THROWS_AS(separation_certificate(s, gd, 1.0, 0, {1.0}), ParameterError);
    }
}
