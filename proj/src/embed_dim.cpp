#include "specembed/embed_dim.hpp"

#include "specembed/error.hpp"
#include "specembed/kdtree.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>
#include <algorithm>
#include <ostream>

namespace specembed {

InjectivityResult injectivity_scan(const Eigen::MatrixXd& coords, const GraphDistances& gd, double delta, double tau,
                                   const PairSampling& sampling)
{
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (!(tau >= 0.0)) throw ParameterError("tau must be nonnegative");
    if (coords.rows() != gd.num_points()) throw ParameterError("distance table and coordinates differ in size");
    InjectivityResult out;
    out.min_distance = std::numeric_limits<double>::infinity();
    out.min_ratio = std::numeric_limits<double>::infinity();
    const double tau2 = tau * tau;
    double min2 = std::numeric_limits<double>::infinity();
    out.exhaustive = for_each_pair(gd, sampling, [&](Index i, Index j) {
        const double d = gd(i, j);
        if (d < delta) return;
        ++out.far_pairs;
        const double img2 = (coords.row(i) - coords.row(j)).squaredNorm();
        if (img2 <= tau2) ++out.collisions;
        if (img2 < min2) min2 = img2;
        const double ratio = std::sqrt(img2) / d;
        if (ratio < out.min_ratio) out.min_ratio = ratio;
    });
    out.min_distance = std::sqrt(min2);
    out.vacuous = out.far_pairs == 0;
    out.pass = out.collisions == 0;
    return out;
}

Index exact_collisions(const Eigen::MatrixXd& coords, const GraphDistances& gd, double delta)
{
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (coords.rows() != gd.num_points()) throw ParameterError("distance table and coordinates differ in size");
    if (!gd.covers_all()) throw ParameterError("exact collision scan needs distances between all points");
    std::vector<Index> order(static_cast<std::size_t>(coords.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    const auto row_less = [&](Index i, Index j) {
        for (Index c = 0; c < coords.cols(); ++c) {
            if (coords(i, c) < coords(j, c)) return true;
            if (coords(j, c) < coords(i, c)) return false;
        }
        return i < j;
    };
    const auto row_equal = [&](Index i, Index j) { return (coords.row(i).array() == coords.row(j).array()).all(); };
    std::sort(order.begin(), order.end(), row_less);
    Index count = 0;
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() && row_equal(order[start], order[end])) ++end;
        for (std::size_t p = start; p < end; ++p)
            for (std::size_t q = p + 1; q < end; ++q)
                if (gd(order[p], order[q]) >= delta) ++count;
        start = end;
    }
    return count;
}

LocalStars mesh_stars(const TriangleMesh& mesh)
{
    const Index n = mesh.num_vertices();
    LocalStars stars;
    stars.neighbors.resize(static_cast<std::size_t>(n));
    for (const auto& [i, j] : mesh.edges()) {
        stars.neighbors[static_cast<std::size_t>(i)].push_back(j);
        stars.neighbors[static_cast<std::size_t>(j)].push_back(i);
    }
    stars.offsets.resize(static_cast<std::size_t>(n));
    const auto& V = mesh.vertices();
    for (Index v = 0; v < n; ++v) {
        const auto& nb = stars.neighbors[static_cast<std::size_t>(v)];
        Eigen::MatrixXd off(static_cast<Index>(nb.size()), 3);
        for (std::size_t r = 0; r < nb.size(); ++r) off.row(static_cast<Index>(r)) = V.row(nb[r]) - V.row(v);
        stars.offsets[static_cast<std::size_t>(v)] = std::move(off);
    }
    return stars;
}

LocalStars cloud_stars(const PointCloud& cloud, int k)
{
    const Index n = cloud.size();
    if (k < 1 || k > n - 1) throw ParameterError("k must lie in [1, N-1]");
    const auto& P = cloud.points();
    const KdTree tree(P);
    LocalStars stars;
    stars.neighbors.resize(static_cast<std::size_t>(n));
    stars.offsets.resize(static_cast<std::size_t>(n));
    for (Index v = 0; v < n; ++v) {
        const auto nearest = tree.k_nearest(P.row(v), k, v);
        auto& nb = stars.neighbors[static_cast<std::size_t>(v)];
        Eigen::MatrixXd off(static_cast<Index>(nearest.size()), P.cols());
        for (std::size_t r = 0; r < nearest.size(); ++r) {
            nb.push_back(nearest[r].first);
            off.row(static_cast<Index>(r)) = P.row(nearest[r].first) - P.row(v);
        }
        stars.offsets[static_cast<std::size_t>(v)] = std::move(off);
    }
    return stars;
}

RankResult immersion_rank(const Eigen::MatrixXd& coords, const LocalStars& stars, int n, double rank_tol)
{
    if (n < 1) throw ParameterError("intrinsic dimension must be positive");
    if (!(rank_tol > 0.0)) throw ParameterError("rank_tol must be positive");
    if (coords.rows() != stars.size()) throw ParameterError("stars and coordinates differ in size");
    RankResult out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    for (Index v = 0; v < stars.size(); ++v) {
        const auto& nb = stars.neighbors[static_cast<std::size_t>(v)];
        const Eigen::MatrixXd& U = stars.offsets[static_cast<std::size_t>(v)];
        double ratio = 0.0;
        const auto k = static_cast<Index>(nb.size());
        if (k < n + 1 || U.cols() < n) {
            ++out.underdetermined;
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> frame(U, Eigen::ComputeThinV);
            const auto& su = frame.singularValues();
            if (!(su[n - 1] > 1e-12 * su[0])) {
                ++out.underdetermined;
            } else {
                const Eigen::MatrixXd P = U * frame.matrixV().leftCols(n); // k x n local parameters
                Eigen::MatrixXd Y(k, coords.cols());
                for (Index r = 0; r < k; ++r) Y.row(r) = coords.row(nb[static_cast<std::size_t>(r)]) - coords.row(v);
                const Eigen::MatrixXd J = P.colPivHouseholderQr().solve(Y); // n x m
                if (J.cols() >= n) {
                    const Eigen::VectorXd sj = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
                    ratio = sj[0] > 0.0 ? sj[n - 1] / sj[0] : 0.0;
                }
            }
        }
        if (ratio < out.min_ratio) {
            out.min_ratio = ratio;
            out.worst_vertex = v;
        }
    }
    if (stars.size() == 0) out.min_ratio = 0.0;
    out.pass = out.min_ratio >= rank_tol && out.underdetermined == 0;
    return out;
}

std::vector<FacePair> self_intersection_check(const TriangleMesh& mesh, const Eigen::MatrixXd& coords3)
{
    if (coords3.cols() != 3) throw ParameterError("self-intersection check needs a 3-dimensional image");
    if (coords3.rows() != mesh.num_vertices()) throw ParameterError("mesh and coordinates differ in size");
    const Eigen::MatrixX3d V = coords3;
    return self_intersections(V, mesh.faces());
}

double mean_image_edge(const Eigen::MatrixXd& coords, const LocalStars& stars)
{
    double sum = 0.0;
    Index count = 0;
    for (Index v = 0; v < stars.size(); ++v)
        for (Index w : stars.neighbors[static_cast<std::size_t>(v)]) {
            sum += (coords.row(v) - coords.row(w)).norm();
            ++count;
        }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

namespace {

double mean_star_edge(const LocalStars& stars)
{
    double sum = 0.0;
    Index count = 0;
    for (const auto& off : stars.offsets) {
        sum += off.rowwise().norm().sum();
        count += off.rows();
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

} // namespace

EmbedDimReport embedding_dimension(const CoordsProvider& coords, const GraphDistances& gd, const LocalStars& stars,
                                   int n, int m_max, const EmbedThresholds& thresholds, const TriangleMesh* mesh)
{
    if (n < 1) throw ParameterError("intrinsic dimension must be positive");
    if (m_max < 1) throw ParameterError("m_max must be positive");
    EmbedDimReport report;
    report.intrinsic_dim = n;
    report.rank_tol = thresholds.rank_tol;
    report.delta = thresholds.delta ? *thresholds.delta : 3.0 * mean_star_edge(stars);
    // fewer coordinates than the intrinsic dimension can never immerse
    for (int m = std::max(1, std::min(n, m_max)); m <= m_max; ++m) {
        const Eigen::MatrixXd image = coords(m);
        EmbedDimStep step;
        step.m = m;
        step.tau = thresholds.tau ? *thresholds.tau : thresholds.tau_factor * mean_image_edge(image, stars);
        step.injectivity = injectivity_scan(image, gd, report.delta, step.tau, thresholds.sampling);
        step.rank = immersion_rank(image, stars, n, thresholds.rank_tol);
        step.pass = step.injectivity.pass && step.rank.pass;
        if (mesh && m == 3) {
            step.intersections = static_cast<Index>(self_intersection_check(*mesh, image).size());
            step.pass = step.pass && *step.intersections == 0;
        }
        report.steps.push_back(step);
        if (step.pass) {
            report.m_star = m;
            break;
        }
    }
    return report;
}

EmbedDimReport embedding_dimension(const Spectrum& spectrum, const TriangleMesh& mesh, const GraphDistances& gd,
                                   int m_max, const EmbedThresholds& thresholds)
{
    if (m_max > spectrum.count())
        throw ParameterError("m_max = " + std::to_string(m_max) + " exceeds the " + std::to_string(spectrum.count()) +
                             " computed eigenpairs");
    const LocalStars stars = mesh_stars(mesh);
    return embedding_dimension([&](int m) { return eigenmap(spectrum, m).coords; }, gd, stars, 2, m_max,
                               thresholds, &mesh);
}

void write_report(std::ostream& out, const EmbedDimReport& report)
{
    const auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    out << "{\n  \"m_star\": " << (report.m_star ? std::to_string(*report.m_star) : std::string("null")) << ",\n"
        << "  \"intrinsic_dim\": " << report.intrinsic_dim << ",\n"
        << "  \"delta\": " << num(report.delta) << ",\n"
        << "  \"rank_tol\": " << num(report.rank_tol) << ",\n"
        << "  \"steps\": [";
    for (std::size_t s = 0; s < report.steps.size(); ++s) {
        const auto& st = report.steps[s];
        out << (s ? "," : "") << "\n    {\"m\": " << st.m << ", \"tau\": " << num(st.tau)
            << ", \"min_image_distance\": " << num(st.injectivity.min_distance)
            << ", \"min_ratio\": " << num(st.injectivity.min_ratio) << ", \"far_pairs\": " << st.injectivity.far_pairs
            << ", \"collisions\": " << st.injectivity.collisions
            << ", \"vacuous\": " << (st.injectivity.vacuous ? "true" : "false")
            << ", \"sampling\": \"" << (st.injectivity.exhaustive ? "exhaustive" : "random") << "\""
            << ", \"min_rank_ratio\": " << num(st.rank.min_ratio)
            << ", \"underdetermined\": " << st.rank.underdetermined << ", \"intersections\": "
            << (st.intersections ? std::to_string(*st.intersections) : std::string("null"))
            << ", \"pass\": " << (st.pass ? "true" : "false") << "}";
    }
    out << "\n  ]\n}\n";
}

} // namespace specembed
