#pragma once

#include "specembed/eigensolver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specembed {

/// Per-vertex map from shape A to shape B.
struct Correspondence
{
    std::vector<Index> map;
    /// sum_x |Phi_B(map(x)) - Phi_A(x)|^2 under the recorded alignment
    double cost = 0.0;
    /// signs chosen by the sign search (already folded into Q)
    std::vector<int> signs;
    /// aligned B coordinates are Phi_B * Q
    Eigen::MatrixXd Q;
    std::vector<EigenGroup> groups;
    /// number of sign vectors evaluated by the search
    Index candidates = 0;
};

/// Exact nearest neighbour in B for every row of A (ties to the lowest index).
Correspondence match_closest(const Eigen::MatrixXd& coordsA, const Eigen::MatrixXd& coordsB);

enum class SignMode { exhaustive, greedy };

inline constexpr int max_exhaustive_signs = 14;
inline constexpr int greedy_restarts = 8;

struct SignSearchOptions
{
    SignMode mode = SignMode::exhaustive;
    std::uint64_t seed = 0x51617e5eedull;
};

/// Best column signs s for B * diag(s). Exhaustive enumerates all 2^m
/// vectors; greedy takes best single flips from all-positive and from
/// greedy_restarts seeded random starts.
Correspondence sign_search(const Eigen::MatrixXd& coordsA, const Eigen::MatrixXd& coordsB,
                           const SignSearchOptions& options = {});
/// Same on the eigenmaps Phi^m of two spectra.
Correspondence sign_search(const Spectrum& specA, const Spectrum& specB, int m, const SignSearchOptions& options = {});

struct GroupAlignment
{
    std::vector<EigenGroup> groups; // eigen indices, column first - 1 of Phi^m
    Eigen::MatrixXd Q;              // block-diagonal orthogonal m x m
};

struct AlignOptions
{
    double degeneracy_tol = default_degeneracy_tol;
    /// vertex pairing for Procrustes; default is a heat-signature pre-match
    std::optional<std::vector<Index>> seed;
    /// explicit group partition (1-based eigen indices) instead of detection
    std::optional<std::vector<EigenGroup>> groups;
    /// also align groups of size 1 (a sign per column)
    bool align_singletons = false;
};

///
/// Orthogonal Procrustes per eigenvalue group of Phi^m: Q_G minimises
/// |Phi_B[seed, G] Q_G - Phi_A[:, G]|. Groups are found independently in
/// both spectra and must agree in size.
///
GroupAlignment align_degenerate_groups(const Spectrum& specA, const Spectrum& specB, int m,
                                       const AlignOptions& options = {});

/// Nearest match of heat diagonals p(t,x,x) at 4 log-spaced t values,
/// standardised with A's statistics.
std::vector<Index> heat_signature_prematch(const Spectrum& specA, const Spectrum& specB, int m);

struct RegisterOptions
{
    SignSearchOptions signs;
    double degeneracy_tol = default_degeneracy_tol;
    int refine_iterations = 30;
};

///
/// Full pipeline: group alignment (identity and heat-signature seeded
/// candidates), sign search, then alternating match / Procrustes refinement.
/// The candidate of least cost is returned.
///
Correspondence register_shapes(const Spectrum& specA, const Spectrum& specB, int m,
                               const RegisterOptions& options = {});

struct StabilitySample
{
    double epsilon = 0.0;
    bool valid = true;
    /// sup_x |Phi_B(alpha(x)) - Phi_A(x)| with Phi_B aligned to Phi_A
    double displacement = 0.0;
    /// vertices matched to a vertex other than themselves
    Index mismatched = 0;
    std::string note;
};

struct StabilityOptions
{
    std::uint64_t seed = 0x57ab1eull;
    double degeneracy_tol = default_degeneracy_tol;
};

///
/// Perturbs vertex positions by a smooth seeded field of peak magnitude
/// epsilon x mean edge length, recomputes the spectrum, aligns it to the
/// unperturbed one and reports the matched displacement per epsilon.
/// Throws ParameterError when m cuts through a degenerate eigenvalue group,
/// since the truncated eigenspace has no stable basis.
///
std::vector<StabilitySample> stability_probe(const TriangleMesh& mesh, const std::vector<double>& epsilons, int m,
                                             const StabilityOptions& options = {});

/// Smooth displacement field with unit peak vertex norm.
Eigen::MatrixX3d smooth_field(const Eigen::MatrixX3d& vertices, std::uint64_t seed);

/// Nonincreasing toward the end of the list, allowing one inversion of at
/// most `slack` relative size.
bool monotone_trend(const std::vector<double>& values, double slack = 0.1);

/// Correspondence as "source,target" CSV rows.
void write_correspondence(std::ostream& out, const Correspondence& corr);

} // namespace specembed
