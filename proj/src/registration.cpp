#include "specembed/registration.hpp"

#include "specembed/error.hpp"
#include "specembed/heat_kernel.hpp"
#include "specembed/kdtree.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/spectral_maps.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace specembed {

namespace {

/// Matches rows of A against a prebuilt tree on B.
Correspondence match_with(const KdTree& tree, const Eigen::MatrixXd& coordsA)
{
    Correspondence out;
    out.map.resize(static_cast<std::size_t>(coordsA.rows()));
    for (Index i = 0; i < coordsA.rows(); ++i) {
        const auto [j, d2] = tree.nearest(coordsA.row(i));
        out.map[static_cast<std::size_t>(i)] = j;
        out.cost += d2;
    }
    return out;
}

void check_dims(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
    if (A.cols() != B.cols())
        throw ParameterError("coordinate dimensions differ: " + std::to_string(A.cols()) + " vs " +
                             std::to_string(B.cols()));
    if (B.rows() == 0) throw ParameterError("target shape has no vertices");
}

Eigen::MatrixXd sign_matrix(const std::vector<int>& signs)
{
    Eigen::VectorXd d(static_cast<Index>(signs.size()));
    for (std::size_t i = 0; i < signs.size(); ++i) d[static_cast<Index>(i)] = signs[i];
    return d.asDiagonal();
}

/// Orthogonal Q minimising |Y Q - X|_F.
Eigen::MatrixXd procrustes(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y.transpose() * X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

std::string group_sizes(const std::vector<EigenGroup>& groups)
{
    std::string s = "{";
    for (std::size_t i = 0; i < groups.size(); ++i) s += (i ? "," : "") + std::to_string(groups[i].size);
    return s + "}";
}

void check_groups(const std::vector<EigenGroup>& groups, int m)
{
    int next = 1;
    for (const auto& g : groups) {
        if (g.first != next || g.size < 1) throw ParameterError("groups must partition eigen indices 1..m in order");
        next += g.size;
    }
    if (next != m + 1) throw ParameterError("groups must partition eigen indices 1..m in order");
}

/// Block-diagonal alignment from per-group Procrustes on the pairing seed.
Eigen::MatrixXd group_procrustes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const std::vector<Index>& seed,
                                 const std::vector<EigenGroup>& groups, bool singletons)
{
    const Index m = A.cols();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m);
    for (const auto& g : groups) {
        if (g.size == 1 && !singletons) continue;
        const Index c = g.first - 1;
        Eigen::MatrixXd Y(A.rows(), g.size);
        for (Index i = 0; i < A.rows(); ++i) Y.row(i) = B.row(seed[static_cast<std::size_t>(i)]).segment(c, g.size);
        Q.block(c, c, g.size, g.size) = procrustes(Y, A.middleCols(c, g.size));
    }
    return Q;
}

} // namespace

Correspondence match_closest(const Eigen::MatrixXd& coordsA, const Eigen::MatrixXd& coordsB)
{
    check_dims(coordsA, coordsB);
    const KdTree tree(coordsB);
    auto out = match_with(tree, coordsA);
    out.signs.assign(static_cast<std::size_t>(coordsA.cols()), 1);
    out.Q = Eigen::MatrixXd::Identity(coordsA.cols(), coordsA.cols());
    return out;
}

Correspondence sign_search(const Eigen::MatrixXd& coordsA, const Eigen::MatrixXd& coordsB,
                           const SignSearchOptions& options)
{
    check_dims(coordsA, coordsB);
    const int m = static_cast<int>(coordsA.cols());
    if (options.mode == SignMode::exhaustive && m > max_exhaustive_signs)
        throw ParameterError("exhaustive sign search is limited to m <= " + std::to_string(max_exhaustive_signs));

    // |B diag(s) - A| = |B - A diag(s)|, so one tree on B serves every candidate
    const KdTree tree(coordsB);
    Index evaluated = 0;
    const auto evaluate = [&](const std::vector<int>& s) {
        ++evaluated;
        return match_with(tree, coordsA * sign_matrix(s));
    };

    std::vector<int> best_signs(static_cast<std::size_t>(m), 1);
    Correspondence best;
    best.cost = std::numeric_limits<double>::infinity();

    if (options.mode == SignMode::exhaustive) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            std::vector<int> s(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) s[static_cast<std::size_t>(j)] = (mask >> j) & 1 ? -1 : 1;
            auto c = evaluate(s);
            if (c.cost < best.cost) {
                best = std::move(c);
                best_signs = s;
            }
        }
    } else {
        std::mt19937_64 rng(options.seed);
        std::bernoulli_distribution coin(0.5);
        for (int run = 0; run <= greedy_restarts; ++run) {
            std::vector<int> s(static_cast<std::size_t>(m), 1);
            if (run > 0)
                for (auto& v : s) v = coin(rng) ? -1 : 1;
            auto current = evaluate(s);
            for (;;) {
                int flip = -1;
                Correspondence improved;
                improved.cost = current.cost;
                for (int j = 0; j < m; ++j) {
                    s[static_cast<std::size_t>(j)] *= -1;
                    auto c = evaluate(s);
                    s[static_cast<std::size_t>(j)] *= -1;
                    if (c.cost < improved.cost) {
                        improved = std::move(c);
                        flip = j;
                    }
                }
                if (flip < 0) break;
                s[static_cast<std::size_t>(flip)] *= -1;
                current = std::move(improved);
            }
            if (current.cost < best.cost) {
                best = std::move(current);
                best_signs = s;
            }
        }
    }
    best.signs = best_signs;
    best.Q = sign_matrix(best_signs);
    best.candidates = evaluated;
    return best;
}

Correspondence sign_search(const Spectrum& specA, const Spectrum& specB, int m, const SignSearchOptions& options)
{
    return sign_search(eigenmap(specA, m).coords, eigenmap(specB, m).coords, options);
}

std::vector<Index> heat_signature_prematch(const Spectrum& specA, const Spectrum& specB, int m)
{
    const int modes = std::min(specA.count(), specB.count());
    if (m < 1 || m > modes) throw ParameterError("heat signature order outside computed spectra");
    const auto times = default_time_grid(specA, m, 4);
    const auto signature = [&](const Spectrum& s) {
        Eigen::MatrixXd h(s.num_vertices(), static_cast<Index>(times.size()));
        const Eigen::MatrixXd sq = s.eigenvectors.leftCols(modes + 1).array().square();
        for (std::size_t t = 0; t < times.size(); ++t) {
            const Eigen::VectorXd w = (-times[t] * s.eigenvalues.head(modes + 1).array()).exp();
            h.col(static_cast<Index>(t)) = sq * w;
        }
        return h;
    };
    Eigen::MatrixXd hA = signature(specA);
    Eigen::MatrixXd hB = signature(specB);
    const Eigen::RowVectorXd mean = hA.colwise().mean();
    Eigen::RowVectorXd scale = ((hA.rowwise() - mean).array().square().colwise().mean()).sqrt();
    for (Index c = 0; c < scale.size(); ++c)
        if (!(scale[c] > 0.0)) scale[c] = 1.0;
    hA = (hA.rowwise() - mean).array().rowwise() / scale.array();
    hB = (hB.rowwise() - mean).array().rowwise() / scale.array();
    return match_closest(hA, hB).map;
}

GroupAlignment align_degenerate_groups(const Spectrum& specA, const Spectrum& specB, int m,
                                       const AlignOptions& options)
{
    if (m < 1 || m > specA.count() || m > specB.count()) throw ParameterError("m exceeds the computed eigenpairs");
    GroupAlignment out;
    if (options.groups) {
        check_groups(*options.groups, m);
        out.groups = *options.groups;
    } else {
        const auto gA = degenerate_groups(specA.eigenvalues, 1, m, options.degeneracy_tol);
        const auto gB = degenerate_groups(specB.eigenvalues, 1, m, options.degeneracy_tol);
        bool same = gA.size() == gB.size();
        for (std::size_t i = 0; same && i < gA.size(); ++i) same = gA[i].size == gB[i].size;
        if (!same)
            throw AlignmentError("eigenvalue group sizes differ: " + group_sizes(gA) + " vs " + group_sizes(gB));
        out.groups = gA;
    }
    const Eigen::MatrixXd A = eigenmap(specA, m).coords;
    const Eigen::MatrixXd B = eigenmap(specB, m).coords;
    std::vector<Index> seed;
    if (options.seed) {
        seed = *options.seed;
        if (static_cast<Index>(seed.size()) != A.rows()) throw ParameterError("seed map must cover every vertex of A");
        for (Index j : seed)
            if (j < 0 || j >= B.rows()) throw ParameterError("seed map target out of range");
    } else {
        seed = heat_signature_prematch(specA, specB, m);
    }
    out.Q = group_procrustes(A, B, seed, out.groups, options.align_singletons);
    return out;
}

Correspondence register_shapes(const Spectrum& specA, const Spectrum& specB, int m, const RegisterOptions& options)
{
    if (m < 1 || m > specA.count() || m > specB.count()) throw ParameterError("m exceeds the computed eigenpairs");
    const Eigen::MatrixXd A = eigenmap(specA, m).coords;
    const Eigen::MatrixXd B = eigenmap(specB, m).coords;

    AlignOptions align;
    align.degeneracy_tol = options.degeneracy_tol;
    const auto seeded = align_degenerate_groups(specA, specB, m, align);
    const auto& groups = seeded.groups;

    std::vector<Eigen::MatrixXd> starts{Eigen::MatrixXd::Identity(m, m)};
    const bool degenerate = std::any_of(groups.begin(), groups.end(), [](const EigenGroup& g) { return g.size > 1; });
    if (degenerate) starts.push_back(seeded.Q);

    Correspondence best;
    best.cost = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        auto corr = sign_search(A, B * start, options.signs);
        Eigen::MatrixXd T = start * corr.Q;
        const Index candidates = corr.candidates;
        const auto signs = corr.signs;
        for (int it = 0; it < options.refine_iterations; ++it) {
            // re-fit every block (signs included) on the current pairing
            const Eigen::MatrixXd Tn = group_procrustes(A, B, corr.map, groups, true);
            auto next = match_closest(A, B * Tn);
            if (!(next.cost < corr.cost)) break;
            corr = std::move(next);
            T = Tn;
        }
        corr.Q = T;
        corr.signs = signs;
        corr.candidates = candidates;
        corr.groups = groups;
        if (corr.cost < best.cost) best = std::move(corr);
    }
    return best;
}

Eigen::MatrixX3d smooth_field(const Eigen::MatrixX3d& vertices, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const Eigen::RowVector3d centre = vertices.colwise().mean();
    const double extent = std::max((vertices.rowwise() - centre).rowwise().norm().maxCoeff(), 1e-300);
    Eigen::MatrixX3d field = Eigen::MatrixX3d::Zero(vertices.rows(), 3);
    for (int c = 0; c < 3; ++c)
        for (int term = 0; term < 3; ++term) {
            Eigen::Vector3d dir(normal(rng), normal(rng), normal(rng));
            dir.normalize();
            const double freq = (1.0 + 2.0 * uniform(rng)) / extent;
            const double phase = 2.0 * std::numbers::pi * uniform(rng);
            const double amp = 0.5 + uniform(rng);
            for (Index v = 0; v < vertices.rows(); ++v)
                field(v, c) += amp * std::sin(freq * vertices.row(v).dot(dir) + phase);
        }
    const double peak = field.rowwise().norm().maxCoeff();
    if (peak > 0.0) field /= peak;
    return field;
}

namespace {

/// Empty when the perturbed mesh keeps positive areas and face orientations.
std::string validity_problem(const TriangleMesh& before, const Eigen::MatrixX3d& after)
{
    const auto& F = before.faces();
    const auto& V = before.vertices();
    for (Index f = 0; f < F.rows(); ++f) {
        const auto normal = [&](const Eigen::MatrixX3d& P) {
            const Eigen::Vector3d a = P.row(F(f, 0));
            const Eigen::Vector3d b = P.row(F(f, 1));
            const Eigen::Vector3d c = P.row(F(f, 2));
            return Eigen::Vector3d((b - a).cross(c - a));
        };
        const Eigen::Vector3d n0 = normal(V);
        const Eigen::Vector3d n1 = normal(after);
        if (!(n1.norm() > 0.0)) return "face " + std::to_string(f) + " collapsed";
        if (!(n0.dot(n1) > 0.0)) return "face " + std::to_string(f) + " flipped";
    }
    return {};
}

} // namespace

std::vector<StabilitySample> stability_probe(const TriangleMesh& mesh, const std::vector<double>& epsilons, int m,
                                             const StabilityOptions& options)
{
    for (double e : epsilons)
        if (!(e >= 0.0 && e <= 0.3)) throw ParameterError("stability epsilon values must lie in [0, 0.3]");
    // one extra pair to see whether index m ends its eigenvalue group
    const Spectrum reference = smallest_eigenpairs(cotangent_laplacian(mesh), m + 1);
    for (const auto& g : degenerate_groups(reference.eigenvalues, 1, m + 1, options.degeneracy_tol))
        if (g.first <= m && m < g.first + g.size - 1)
            throw ParameterError("m = " + std::to_string(m) + " splits the degenerate eigenvalue group " +
                                 std::to_string(g.first) + ".." + std::to_string(g.first + g.size - 1) +
                                 "; use m = " + std::to_string(g.first - 1) + " or at least " +
                                 std::to_string(g.first + g.size - 1));
    const Eigen::MatrixXd A = eigenmap(reference, m).coords;
    const auto groups = degenerate_groups(reference.eigenvalues, 1, m, options.degeneracy_tol);
    const Eigen::MatrixX3d field = smooth_field(mesh.vertices(), options.seed);
    const double scale = mesh.mean_edge_length();

    std::vector<Index> identity(static_cast<std::size_t>(mesh.num_vertices()));
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<Index>(i);

    std::vector<StabilitySample> out;
    for (double eps : epsilons) {
        StabilitySample sample;
        sample.epsilon = eps;
        const Eigen::MatrixX3d moved = mesh.vertices() + eps * scale * field;
        if (auto problem = validity_problem(mesh, moved); !problem.empty()) {
            sample.valid = false;
            sample.note = "perturbation breaks the mesh: " + problem;
            out.push_back(sample);
            continue;
        }
        try {
            const Spectrum perturbed = smallest_eigenpairs(cotangent_laplacian(mesh.with_vertices(moved)), m);
            AlignOptions align;
            align.seed = identity;
            align.groups = groups;
            align.align_singletons = true;
            const auto alignment = align_degenerate_groups(reference, perturbed, m, align);
            const Eigen::MatrixXd B = eigenmap(perturbed, m).coords * alignment.Q;
            const auto corr = match_closest(A, B);
            double sup = 0.0;
            for (Index x = 0; x < B.rows(); ++x) {
                const Index y = corr.map[static_cast<std::size_t>(x)];
                sup = std::max(sup, (B.row(y) - A.row(x)).norm());
                if (y != x) ++sample.mismatched;
            }
            sample.displacement = sup;
        } catch (const Error& e) {
            sample.valid = false;
            sample.note = e.what();
        }
        out.push_back(sample);
    }
    return out;
}

bool monotone_trend(const std::vector<double>& values, double slack)
{
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1] <= values[i]) continue;
        ++inversions;
        if (inversions > 1 || values[i + 1] > (1.0 + slack) * values[i]) return false;
    }
    return true;
}

void write_correspondence(std::ostream& out, const Correspondence& corr)
{
    out << "source,target\n";
    for (std::size_t i = 0; i < corr.map.size(); ++i) out << i << ',' << corr.map[i] << '\n';
}

} // namespace specembed
