#pragma once

#include "specembed/embed_dim.hpp"
#include "specembed/spectral_maps.hpp"

#include <cstdint>
#include <vector>

namespace specembed {

// ---------------------------------------------------------------------------
// Flat torus [0,a]^{n-1} x [0,b] with periodic gluing
// ---------------------------------------------------------------------------

/// Eigenfunction prod_i f_{k_i}(m_i x^i / period_i), f_1 = cos(2 pi .),
/// f_2 = sin(2 pi .). k_i = 1 whenever m_i = 0.
struct TorusMode
{
    std::vector<int> m;
    std::vector<int> k;
    double eigenvalue = 0.0;
};

struct TorusSpec
{
    double a = 1.0;
    double b = 1.0;
    int n = 2;
    /// ascending; equal eigenvalues listed lower axis first, cos before sin
    std::vector<TorusMode> modes;

    double period(int axis) const { return axis == n - 1 ? b : a; }
};

/// (2 pi)^2 (sum_{i<n} m_i^2 / a^2 + m_n^2 / b^2)
double torus_eigenvalue(double a, double b, const std::vector<int>& m);

/// The `count` smallest non-constant eigenpairs counted with multiplicity.
TorusSpec torus_spectrum(double a, double b, int n, int count);

/// Value at a point of the rectangle (other points are wrapped).
double torus_eigenfunction(const TorusSpec& spec, int mode, const Eigen::VectorXd& point);

/// 2 (ceil(b / a) + n - 2), ceil evaluated exactly on the double inputs.
int torus_embedding_dimension(double a, double b, int n);

/// True when b / a is an integer (exactly, on the double inputs).
bool torus_ratio_is_integer(double a, double b);

/// 2^{1-n} V / inj^n with V = a^{n-1} b and inj = a / 2.
double torus_volume_bound(double a, double b, int n);
/// torus_embedding_dimension(a, b, n) >= torus_volume_bound(a, b, n),
/// compared in exact rational arithmetic.
bool torus_volume_bound_holds(double a, double b, int n);

/// Regular grid of counts[i] points along axis i, x^i = j period_i / counts[i].
struct TorusGrid
{
    double a = 1.0;
    double b = 1.0;
    int n = 2;
    std::vector<int> counts;

    TorusGrid(double a, double b, int n, std::vector<int> counts);

    Index size() const;
    double period(int axis) const { return axis == n - 1 ? b : a; }
    double spacing(int axis) const { return period(axis) / counts[static_cast<std::size_t>(axis)]; }
    /// Per-axis integer position of grid point p (axis 0 varies fastest).
    std::vector<int> position(Index p) const;
    Index index(const std::vector<int>& position) const;
    Eigen::VectorXd point(Index p) const;
};

/// Exact flat-torus geodesic distance between grid points.
GraphDistances torus_grid_distances(const TorusGrid& grid);
/// +/- one step along each axis, periodic.
LocalStars torus_grid_stars(const TorusGrid& grid);
/// Isometric (Clifford) embedding in R^{2n}: each circle of length L drawn
/// with radius L / (2 pi).
Eigen::MatrixXd torus_grid_clifford(const TorusGrid& grid);

/// Mode values on the grid. Phases are reduced with integer arithmetic, so
/// symmetric points get bit-identical values.
Eigen::VectorXd torus_grid_mode_values(const TorusSpec& spec, int mode, const TorusGrid& grid);

///
/// The coordinates used in the torus proof, phase 0: eigenfunctions in
/// spectral order, except that when b / a is an integer p the pair at
/// lambda(p, n) is skipped. Requires m <= torus_embedding_dimension + 2.
///
EmbeddingCoords torus_proof_basis_coords(double a, double b, int n, const TorusGrid& grid, int m);
/// The modes behind torus_proof_basis_coords.
std::vector<TorusMode> torus_proof_basis(double a, double b, int n, int m);

// ---------------------------------------------------------------------------
// Round sphere S^n
// ---------------------------------------------------------------------------

struct SphereDegree
{
    int k = 0;
    double eigenvalue = 0.0; // k (n + k - 1)
    std::uint64_t multiplicity = 0;
};

struct SphereSpec
{
    int n = 2;
    std::vector<SphereDegree> degrees; // k = 0..degree_max
};

/// C(top, k) with C = 0 for k < 0 or top < k.
std::uint64_t binomial(int top, int k);

SphereSpec sphere_spectrum(int n, int degree_max);

/// sqrt(n + 1) x, unit L^2 norm per column under the uniform probability
/// measure. Rows must be unit vectors in R^{n+1}.
EmbeddingCoords sphere_coordinate_eigenmap(int n, const Eigen::MatrixXd& points);

} // namespace specembed
