#include "specembed/error.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/registration.hpp"
#include "specembed/shapes.hpp"
#include "specembed/spectral_maps.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace specembed;

namespace {

std::vector<Index> shuffled(Index n, std::uint64_t seed)
{
    std::vector<Index> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Index{0});
    std::shuffle(p.begin(), p.end(), std::mt19937_64(seed));
    return p;
}

Spectrum synthetic(const std::vector<double>& eigenvalues, Index n, std::uint64_t seed)
{
    Spectrum s;
    s.eigenvalues = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), static_cast<Index>(eigenvalues.size()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    s.eigenvectors.resize(n, s.eigenvalues.size());
    for (Index i = 0; i < s.eigenvectors.size(); ++i) s.eigenvectors.data()[i] = g(rng);
    s.eigenvectors.col(0).setOnes();
    return s;
}

} // namespace

TEST_SUITE("registration")
{
    TEST_CASE("closest-point matching")
    {
        const auto s = smallest_eigenpairs(cotangent_laplacian(shapes::icosphere(2)), 6);
        const Eigen::MatrixXd A = eigenmap(s, 3).coords;

        const auto same = match_closest(A, A);
        for (Index i = 0; i < A.rows(); ++i) CHECK(same.map[static_cast<std::size_t>(i)] == i);
        CHECK(same.cost == 0.0);

        // B row pi(x) holds A row x
        const auto pi = shuffled(A.rows(), 4);
        Eigen::MatrixXd B(A.rows(), 3);
        for (Index i = 0; i < A.rows(); ++i) B.row(pi[static_cast<std::size_t>(i)]) = A.row(i);
        const auto perm = match_closest(A, B);
        CHECK(perm.map == pi);
        CHECK(perm.cost == 0.0);

        // the icosphere is centrally symmetric, so a global flip is only a
        // relabeling there; a generic shape pays for it
        const auto lumpy = smallest_eigenpairs(cotangent_laplacian(shapes::lumpy_sphere(2)), 6);
        const Eigen::MatrixXd L = eigenmap(lumpy, 3).coords;
        CHECK(match_closest(A, -A).cost <= 1e-12);
        CHECK(match_closest(L, -L).cost > 0.01 * L.rows());

        CHECK_THROWS_AS(match_closest(A, eigenmap(s, 4).coords), ParameterError);
    }

    TEST_CASE("a negated column is recovered by exhaustive search")
    {
        const auto s = smallest_eigenpairs(cotangent_laplacian(shapes::lumpy_sphere(2)), 6);
        const Eigen::MatrixXd A = eigenmap(s, 4).coords;
        Eigen::MatrixXd B = A;
        B.col(1) *= -1.0;
        const auto c = sign_search(A, B);
        CHECK(c.signs == std::vector<int>{1, -1, 1, 1});
        CHECK(c.cost == 0.0);
        CHECK(c.candidates == 16);
        for (Index i = 0; i < A.rows(); ++i) CHECK(c.map[static_cast<std::size_t>(i)] == i);
        CHECK_THROWS_AS(sign_search(Eigen::MatrixXd::Ones(20, 15), Eigen::MatrixXd::Ones(20, 15)), ParameterError);
    }

    TEST_CASE("exhaustive never loses to greedy and flips cancel")
    {
        std::mt19937_64 rng(8);
        std::normal_distribution<double> g;
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::MatrixXd A(60, 5), B(60, 5);
            for (Index i = 0; i < A.size(); ++i) {
                A.data()[i] = g(rng);
                B.data()[i] = g(rng);
            }
            const auto ex = sign_search(A, B);
            const auto gr = sign_search(A, B, SignSearchOptions{SignMode::greedy, 17});
            CHECK(ex.cost <= gr.cost);

            Eigen::VectorXd flip = Eigen::VectorXd::Ones(5);
            flip[trial % 5] = -1.0;
            CHECK(match_closest(A * flip.asDiagonal(), B * flip.asDiagonal()).cost ==
                  doctest::Approx(match_closest(A, B).cost).epsilon(1e-12));
        }
    }

    TEST_CASE("identical spectra align with identity blocks")
    {
        const auto s = smallest_eigenpairs(cotangent_laplacian(shapes::icosphere(2)), 9);
        const auto g = align_degenerate_groups(s, s, 8);
        CHECK((g.Q - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
        REQUIRE(g.groups.size() == 2);
        CHECK(g.groups[0].size == 3);
        CHECK(g.groups[1].size == 5);
    }

    TEST_CASE("group size mismatch is an alignment error")
    {
        const auto A = synthetic({0, 1, 1, 1, 5}, 30, 1);
        const auto B = synthetic({0, 1, 1, 2, 5}, 30, 2);
        CHECK_THROWS_AS(align_degenerate_groups(A, B, 3), AlignmentError);
    }

    TEST_CASE("sphere eigengroup block matches the applied rotation")
    {
        const auto mesh = shapes::icosphere(3);
        const Eigen::Matrix3d R = shapes::random_rotation(21);
        const auto moved = mesh.with_vertices(mesh.vertices() * R.transpose());
        const auto sa = smallest_eigenpairs(cotangent_laplacian(mesh), 6);
        const auto sb = smallest_eigenpairs(cotangent_laplacian(moved), 6);

        std::vector<Index> identity(static_cast<std::size_t>(mesh.num_vertices()));
        std::iota(identity.begin(), identity.end(), Index{0});
        AlignOptions opts;
        opts.seed = identity;
        const auto g = align_degenerate_groups(sa, sb, 3, opts);

        // Phi_A ~ X C_A and Phi_B ~ X R^T C_B with X the vertex positions
        const Eigen::MatrixXd X = mesh.vertices();
        const Eigen::MatrixXd CA = X.colPivHouseholderQr().solve(eigenmap(sa, 3).coords);
        const Eigen::MatrixXd XB = moved.vertices();
        const Eigen::MatrixXd CB = XB.colPivHouseholderQr().solve(eigenmap(sb, 3).coords);
        const Eigen::MatrixXd truth = CB.inverse() * R * CA;
        CHECK((g.Q - truth).cwiseAbs().maxCoeff() <= 1e-3);

        const auto reg = register_shapes(sa, sb, 3);
        Index hits = 0;
        for (Index i = 0; i < mesh.num_vertices(); ++i) hits += reg.map[static_cast<std::size_t>(i)] == i;
        CHECK(hits >= 0.99 * mesh.num_vertices());
    }

    TEST_CASE("isometric copy is recovered exactly")
    {
        const auto mesh = shapes::lumpy_sphere(3);
        const auto pi = shuffled(mesh.num_vertices(), 77);
        // B vertex pi(x) is the moved A vertex x
        const Eigen::Matrix3d R = shapes::random_rotation(3);
        Eigen::MatrixX3d VB(mesh.num_vertices(), 3);
        for (Index i = 0; i < mesh.num_vertices(); ++i)
            VB.row(pi[static_cast<std::size_t>(i)]) = mesh.vertices().row(i) * R.transpose() + Eigen::RowVector3d(3, 1, -2);
        Eigen::MatrixX3i FB = mesh.faces();
        for (Index i = 0; i < FB.size(); ++i) FB.data()[i] = static_cast<int>(pi[static_cast<std::size_t>(FB.data()[i])]);
        const TriangleMesh copy(VB, FB);

        const auto sa = smallest_eigenpairs(cotangent_laplacian(mesh), 8);
        const auto sb = smallest_eigenpairs(cotangent_laplacian(copy), 8);
        const auto reg = register_shapes(sa, sb, 6);
        CHECK(reg.map == pi);
        CHECK(reg.cost <= 1e-12);
    }

    TEST_CASE("stability probe")
    {
        const auto mesh = shapes::lumpy_sphere(2);
        const auto samples = stability_probe(mesh, {0.2, 0.1, 0.05, 0.01, 0.0}, 6);
        REQUIRE(samples.size() == 5);
        std::vector<double> disp;
        for (const auto& s : samples) {
            CHECK(s.valid);
            disp.push_back(s.displacement);
        }
        CHECK(samples.back().displacement <= 1e-9);
        CHECK(samples.back().mismatched == 0);
        CHECK(monotone_trend(disp));
        CHECK(disp.front() > disp[3]);
        CHECK_THROWS_AS(stability_probe(mesh, {0.5}, 6), ParameterError);
    }

    TEST_CASE("stability probe rejects m inside a degenerate group")
    {
        // icosphere eigenvalue groups: 1..3 and 4..8
        const auto mesh = shapes::icosphere(2);
        CHECK_THROWS_AS(stability_probe(mesh, {0.01}, 6), ParameterError);
        CHECK_NOTHROW(stability_probe(mesh, {0.01}, 3));
        CHECK_NOTHROW(stability_probe(mesh, {0.01}, 8));
    }

    TEST_CASE("smooth field and trend helper")
    {
        const auto mesh = shapes::icosphere(2);
        const auto f = smooth_field(mesh.vertices(), 5);
        CHECK(f.rowwise().norm().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((smooth_field(mesh.vertices(), 5) - f).cwiseAbs().maxCoeff() == 0.0);

        CHECK(monotone_trend({4, 3, 2, 1}));
        CHECK(monotone_trend({4, 3, 3.2, 1})); // one inversion within 10 percent
        CHECK_FALSE(monotone_trend({4, 3, 3.5, 1}));
        CHECK_FALSE(monotone_trend({4, 4.2, 3, 3.1}));
    }

    TEST_CASE("correspondence csv")
    {
        Correspondence c;
        c.map = {2, 0, 1};
        std::stringstream out;
        write_correspondence(out, c);
        CHECK(out.str() == "source,target\n0,2\n1,0\n2,1\n");
    }
}
