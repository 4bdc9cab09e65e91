#include "specembed/eigensolver.hpp"

#include "specembed/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

namespace specembed {

namespace {

/// Post-processing shared by the Lanczos path and the dense oracle: takes
/// orthonormal eigenvectors `Y` of the symmetrised operator and produces the
/// normalised Spectrum.
Spectrum finalize(const LaplacianPair& lap, Eigen::MatrixXd Y, Eigen::VectorXd lambda, double tol)
{
    const Eigen::ArrayXd inv_sqrt_m = lap.mass.array().rsqrt();
    const Index n = Y.rows();
    const int want = static_cast<int>(Y.cols());

    // Deterministic basis inside numerically exact clusters (eigenspaces forced
    // by symmetry): diagonalise a fixed vertex weighting restricted to the
    // cluster, so identical operators yield identical bases.
    Eigen::VectorXd weights(n);
    for (Index i = 0; i < n; ++i) weights[i] = 0.5 + std::fmod(0.6180339887498949 * static_cast<double>(i), 1.0);
    std::vector<std::pair<int, int>> clusters;
    for (int first = 0; first < want;) {
        int last = first;
        while (last + 1 < want &&
               std::abs(lambda[last + 1] - lambda[last]) <= 0.1 * tol * std::max(1.0, std::abs(lambda[last + 1])))
            ++last;
        const int size = last - first + 1;
        if (size > 1) {
            const Eigen::MatrixXd block = Y.middleCols(first, size);
            const Eigen::MatrixXd C = block.transpose() * weights.asDiagonal() * block;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
            Y.middleCols(first, size) = block * es.eigenvectors();
            clusters.emplace_back(first, size);
        }
        first = last + 1;
    }

    Spectrum spec;
    spec.eigenvalues.resize(want);
    spec.eigenvectors.resize(n, want);
    spec.residuals.resize(want);
    for (int j = 0; j < want; ++j) {
        Eigen::VectorXd phi = inv_sqrt_m.matrix().cwiseProduct(Y.col(j));
        // Rayleigh quotient in the mass inner product
        const double quotient = phi.dot(lap.stiffness * phi) / phi.dot(lap.mass.cwiseProduct(phi));
        double l = quotient;
        if (j == 0 && l < 0.0) l = 0.0; // roundoff around the exact zero mode
        if (j == 0) {
            // both Laplacians annihilate constants exactly; snap the zero mode
            const double total = lap.mass.sum();
            const double c = std::abs(total - 1.0) <= 1e-12 ? 1.0 : 1.0 / std::sqrt(total);
            if ((phi.array().abs() - c).abs().maxCoeff() <= 1e-6 * c) {
                phi.setConstant(c);
                l = 0.0;
            }
        }
        Index arg = 0;
        phi.cwiseAbs().maxCoeff(&arg);
        if (phi[arg] < 0.0) phi = -phi;
        spec.eigenvalues[j] = l;
        spec.eigenvectors.col(j) = phi;
    }
    // one value per cluster: Rayleigh quotients of the rotated basis differ
    // in the last bits and would otherwise break the ascending order
    for (const auto& [first, size] : clusters) {
        if (first == 0) continue;
        spec.eigenvalues.segment(first, size).setConstant(spec.eigenvalues.segment(first, size).mean());
    }
    for (int j = 0; j < want; ++j)
        spec.residuals[j] = eigen_residual(lap, spec.eigenvectors.col(j), spec.eigenvalues[j]) /
                            std::max(1.0, std::abs(spec.eigenvalues[j]));
    spec.fingerprint = fingerprint(lap);
    return spec;
}

/// Orthonormalises the columns of `block` against the first `k` columns of
/// `basis` and against each other. Columns that collapse are replaced with
/// fresh random directions. Returns the number of usable columns.
Index orthonormalize_block(const Eigen::MatrixXd& basis, Index k, Eigen::MatrixXd& block, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Index n = block.rows();
    const Index cols = std::min<Index>(block.cols(), n - k);
    Index accepted = 0;
    for (Index c = 0; c < cols; ++c) {
        Eigen::VectorXd v = block.col(c);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double original = v.norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (k > 0) v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
                for (Index p = 0; p < accepted; ++p) v -= block.col(p).dot(v) * block.col(p);
            }
            const double norm = v.norm();
            if (norm > 1e-8 * original && norm > 0.0) {
                block.col(accepted++) = v / norm;
                break;
            }
            for (Index i = 0; i < n; ++i) v[i] = uni(rng);
        }
    }
    block.conservativeResize(Eigen::NoChange, accepted);
    return accepted;
}

} // namespace

std::uint64_t fingerprint(const LaplacianPair& lap)
{
    std::uint64_t h = fnv1a(lap.mass.data(), sizeof(double) * static_cast<std::size_t>(lap.mass.size()));
    SparseMatrix s = lap.stiffness;
    s.makeCompressed();
    h = fnv1a(s.valuePtr(), sizeof(double) * static_cast<std::size_t>(s.nonZeros()), h);
    h = fnv1a(s.innerIndexPtr(), sizeof(SparseMatrix::StorageIndex) * static_cast<std::size_t>(s.nonZeros()), h);
    return h;
}

double eigen_residual(const LaplacianPair& lap, const Eigen::VectorXd& phi, double lambda)
{
    return (lap.stiffness * phi - lambda * lap.mass.cwiseProduct(phi)).norm();
}

Spectrum smallest_eigenpairs(const LaplacianPair& lap, int count, const EigenOptions& options)
{
    const Index n = lap.size();
    if (count < 0 || count > n - 1)
        throw ParameterError("eigenpair count " + std::to_string(count) + " must lie in [0, N-1] with N = " +
                             std::to_string(n));
    if (!(options.tol > 0.0)) throw ParameterError("tolerance must be positive");
    const Index want = count + 1;

    const Eigen::VectorXd sqrt_m = lap.mass.cwiseSqrt();
    const Eigen::VectorXd inv_sqrt_m = lap.mass.cwiseSqrt().cwiseInverse();

    // Shift of the order of the first nonzero eigenvalue: trace(A)/N^2.
    double trace = 0.0;
    for (Index v = 0; v < n; ++v) trace += lap.stiffness.coeff(v, v) / lap.mass[v];
    const double shift = trace > 0.0 ? trace / (static_cast<double>(n) * static_cast<double>(n)) : 1.0;

    SparseMatrix shifted = lap.stiffness;
    for (Index v = 0; v < n; ++v) shifted.coeffRef(v, v) += shift * lap.mass[v];
    Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success) throw Error("factorisation of the shifted stiffness failed");

    const auto apply = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
        const Eigen::MatrixXd rhs = sqrt_m.asDiagonal() * X;
        return sqrt_m.asDiagonal() * factor.solve(rhs);
    };
    const auto apply_A = [&](const Eigen::MatrixXd& Y) -> Eigen::MatrixXd {
        return inv_sqrt_m.asDiagonal() * (lap.stiffness * (inv_sqrt_m.asDiagonal() * Y));
    };

    const Index block = std::max<Index>(1, std::min<Index>(options.block_size, n));
    const Index cap = options.max_basis > 0 ? std::min(options.max_basis, n)
                                            : std::min<Index>(n, std::max<Index>(400, 20 * want));
    if (cap < want) throw ParameterError("Krylov basis cap smaller than the requested count");

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd start(n, block);
    for (Index c = 0; c < block; ++c)
        for (Index i = 0; i < n; ++i) start(i, c) = (c == 0 ? 1.0 + 0.1 * uni(rng) : uni(rng));
    // start in the symmetrised coordinates of the all-ones direction
    start.col(0) = sqrt_m.cwiseProduct(start.col(0));

    Eigen::MatrixXd V(n, cap);
    Eigen::MatrixXd W(n, cap);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(cap, cap);
    Index k = 0;
    Index added = orthonormalize_block(V, 0, start, rng);
    V.middleCols(0, added) = start;

    Eigen::MatrixXd ritz;
    Eigen::VectorXd theta;
    std::vector<double> best(static_cast<std::size_t>(want), std::numeric_limits<double>::infinity());
    double tighten = 1.0;

    const auto final_pairs = [&](const Eigen::MatrixXd& Y) {
        Eigen::MatrixXd H = Y.transpose() * apply_A(Y);
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        return std::make_pair(Eigen::MatrixXd(Y * es.eigenvectors()), Eigen::VectorXd(es.eigenvalues()));
    };

    for (;;) {
        const Index k0 = k;
        const Index k1 = k + added;
        W.middleCols(k0, added) = apply(V.middleCols(k0, added));
        const Eigen::MatrixXd cross = V.leftCols(k1).transpose() * W.middleCols(k0, added);
        T.block(0, k0, k1, added) = cross;
        T.block(k0, 0, added, k1) = cross.transpose();
        T.block(k0, k0, added, added) = 0.5 * (cross.bottomRows(added) + cross.bottomRows(added).transpose());
        k = k1;

        bool check = k >= want;
        if (check) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(k, k));
            // largest transformed eigenvalues are the smallest original ones
            const Eigen::MatrixXd S = es.eigenvectors().rightCols(want).rowwise().reverse();
            theta = es.eigenvalues().tail(want).reverse();
            ritz = V.leftCols(k) * S;
            const Eigen::MatrixXd R = W.leftCols(k) * S - ritz * theta.asDiagonal();
            bool transformed_ok = true;
            for (Index j = 0; j < want; ++j)
                if (R.col(j).norm() > tighten * options.tol * std::abs(theta[j])) transformed_ok = false;

            if (transformed_ok || k == n || k + 1 > cap) {
                auto [Y, lambda] = final_pairs(ritz);
                bool ok = true;
                for (Index j = 0; j < want; ++j) {
                    const double r = (apply_A(Y.col(j)) - lambda[j] * Y.col(j)).norm();
                    const double l = std::max(1.0, std::abs(lambda[j]));
                    best[j] = std::min(best[j], r / l);
                    if (r > options.tol * l) ok = false;
                }
                if (ok) return finalize(lap, std::move(Y), std::move(lambda), options.tol);
                if (k == n || k + 1 > cap) {
                    throw ConvergenceError("eigensolver did not reach tolerance within a basis of " +
                                               std::to_string(k) + " vectors",
                                           best);
                }
                tighten *= 0.1;
            }
        }

        // next block: residual of the last block, fully reorthogonalised
        Eigen::MatrixXd next = W.middleCols(k0, added) - V.leftCols(k) * T.block(0, k0, k, added);
        next.conservativeResize(Eigen::NoChange, std::min<Index>(added, cap - k));
        if (next.cols() == 0) throw ConvergenceError("Krylov basis exhausted", best);
        added = orthonormalize_block(V, k, next, rng);
        if (added == 0) throw ConvergenceError("Krylov basis exhausted", best);
        V.middleCols(k, added) = next;
    }
}

Spectrum dense_oracle(const LaplacianPair& lap, int count)
{
    const Index n = lap.size();
    if (n > dense_oracle_limit)
        throw ParameterError("dense oracle limited to N <= " + std::to_string(dense_oracle_limit) + ", got " +
                             std::to_string(n));
    if (count < 0 || count > n - 1) throw ParameterError("eigenpair count must lie in [0, N-1]");
    const Eigen::VectorXd inv_sqrt_m = lap.mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd A = inv_sqrt_m.asDiagonal() * Eigen::MatrixXd(lap.stiffness) * inv_sqrt_m.asDiagonal();
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
    return finalize(lap, es.eigenvectors().leftCols(count + 1), es.eigenvalues().head(count + 1), 1e-9);
}

std::vector<EigenGroup> degenerate_groups(const Eigen::VectorXd& eigenvalues, int first, int last, double tol)
{
    if (first < 0 || last >= eigenvalues.size() || first > last) throw ParameterError("invalid eigenvalue range");
    std::vector<EigenGroup> groups;
    EigenGroup current{first, 1};
    for (int j = first + 1; j <= last; ++j) {
        const double hi = std::max(std::abs(eigenvalues[j]), std::abs(eigenvalues[j - 1]));
        if (std::abs(eigenvalues[j] - eigenvalues[j - 1]) <= tol * hi) {
            ++current.size;
        } else {
            groups.push_back(current);
            current = {j, 1};
        }
    }
    groups.push_back(current);
    return groups;
}

void write_spectrum(std::ostream& out, const Spectrum& spectrum)
{
    out << spectrum.num_vertices() << ' ' << spectrum.count() << '\n';
    for (Index j = 0; j < spectrum.eigenvalues.size(); ++j)
        out << (j ? " " : "") << format_double(spectrum.eigenvalues[j]);
    out << '\n';
    for (Index i = 0; i < spectrum.num_vertices(); ++i) {
        for (Index j = 0; j < spectrum.eigenvectors.cols(); ++j)
            out << (j ? " " : "") << format_double(spectrum.eigenvectors(i, j));
        out << '\n';
    }
}

Spectrum read_spectrum(std::istream& in)
{
    Index n = 0;
    int m = 0;
    if (!(in >> n >> m) || n <= 0 || m < 0) throw Error("malformed spectrum header");
    Spectrum spec;
    spec.eigenvalues.resize(m + 1);
    spec.eigenvectors.resize(n, m + 1);
    spec.residuals = Eigen::VectorXd::Zero(m + 1);
    for (int j = 0; j <= m; ++j)
        if (!(in >> spec.eigenvalues[j])) throw Error("malformed spectrum eigenvalues");
    for (Index i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j)
            if (!(in >> spec.eigenvectors(i, j))) throw Error("malformed spectrum eigenvector rows");
    return spec;
}

} // namespace specembed
