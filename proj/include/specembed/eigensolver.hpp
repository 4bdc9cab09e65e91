#pragma once

#include "specembed/laplacian.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace specembed {

/// Relative gap below which neighbouring eigenvalues are treated as one
/// eigenspace by registration and analytic comparisons.
inline constexpr double default_degeneracy_tol = 1e-3;

///
/// The smallest generalised eigenpairs of a LaplacianPair, ascending.
/// Column 0 is the constant mode (identically 1 under unit volume).
/// Eigenvectors are mass-orthonormal and sign-normalised so that the entry
/// of largest magnitude is positive.
///
struct Spectrum
{
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    /// |L phi - lambda M phi| / max(1, lambda) per pair.
    Eigen::VectorXd residuals;
    std::uint64_t fingerprint = 0;

    Index num_vertices() const { return eigenvectors.rows(); }
    /// Number of non-constant pairs held (index of the last eigenvalue).
    int count() const { return static_cast<int>(eigenvalues.size()) - 1; }
};

struct EigenOptions
{
    double tol = 1e-9;
    int block_size = 8;
    /// Krylov basis cap; 0 picks min(N, max(400, 20 * (count + 1))).
    Index max_basis = 0;
    std::uint64_t seed = 0x5eedf00dull;
};

///
/// Block Lanczos with full reorthogonalisation on the shift-inverted
/// symmetrised operator M^{1/2} (L + sM)^{-1} M^{1/2}, followed by a
/// Rayleigh-Ritz pass on M^{-1/2} L M^{-1/2}. Deterministic: the starting
/// block is the all-ones vector plus a fixed-seed perturbation.
///
Spectrum smallest_eigenpairs(const LaplacianPair& lap, int count, const EigenOptions& options = {});

/// Dense symmetric eigendecomposition with the same normalisation (N <= 2000).
Spectrum dense_oracle(const LaplacianPair& lap, int count);
inline constexpr Index dense_oracle_limit = 2000;

struct EigenGroup
{
    int first = 0;
    int size = 1;
};

/// Maximal runs among eigenvalue indices [first, last] whose neighbours
/// differ by at most tol * the larger value.
std::vector<EigenGroup> degenerate_groups(const Eigen::VectorXd& eigenvalues, int first, int last,
                                          double tol = default_degeneracy_tol);

std::uint64_t fingerprint(const LaplacianPair& lap);

/// |L phi - lambda M phi|_2.
double eigen_residual(const LaplacianPair& lap, const Eigen::VectorXd& phi, double lambda);

/// Header line "N m", then the eigenvalue line, then one row per vertex.
void write_spectrum(std::ostream& out, const Spectrum& spectrum);
Spectrum read_spectrum(std::istream& in);

} // namespace specembed
