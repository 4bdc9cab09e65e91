#include "specembed/analytic.hpp"

#include "specembed/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace specembed {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double tie_tol = 1e-12;

void check_torus(double a, double b, int n)
{
    if (!(a > 0.0) || !(a < b)) throw ParameterError("torus side lengths need 0 < a < b");
    if (n < 2) throw ParameterError("torus dimension n must be at least 2");
}

/// cos or sin of 2 pi r for r in [0, 1), evaluated on the half period so
/// that r and 1 - r give values equal up to sign bit for bit.
double folded_trig(int kind, double r, double mirror)
{
    if (kind == 1) return std::cos(two_pi * std::min(r, mirror));
    return r <= mirror ? std::sin(two_pi * r) : -std::sin(two_pi * mirror);
}

/// Tie-break key inside a group of equal eigenvalues: frequency vectors in
/// descending lexicographic order (lower axis first), then cos before sin.
bool tie_before(const TorusMode& x, const TorusMode& y)
{
    if (x.m != y.m) return std::lexicographical_compare(y.m.begin(), y.m.end(), x.m.begin(), x.m.end());
    return std::lexicographical_compare(x.k.begin(), x.k.end(), y.k.begin(), y.k.end());
}

void enumerate(int axis, double a, double b, int n, double limit, std::vector<int>& m, std::vector<TorusMode>& out)
{
    if (axis == n) {
        if (std::all_of(m.begin(), m.end(), [](int v) { return v == 0; })) return;
        const double lambda = torus_eigenvalue(a, b, m);
        if (lambda > limit) return;
        const int free = static_cast<int>(std::count_if(m.begin(), m.end(), [](int v) { return v != 0; }));
        for (int mask = 0; mask < (1 << free); ++mask) {
            TorusMode mode;
            mode.m = m;
            mode.k.assign(static_cast<std::size_t>(n), 1);
            mode.eigenvalue = lambda;
            int bit = 0;
            for (int i = n - 1; i >= 0; --i)
                if (m[static_cast<std::size_t>(i)] != 0) mode.k[static_cast<std::size_t>(i)] = ((mask >> bit++) & 1) + 1;
            out.push_back(std::move(mode));
        }
        return;
    }
    const double period = axis == n - 1 ? b : a;
    const int top = static_cast<int>(std::floor(period * std::sqrt(limit) / two_pi)) + 1;
    for (int v = 0; v <= top; ++v) {
        m[static_cast<std::size_t>(axis)] = v;
        enumerate(axis + 1, a, b, n, limit, m, out);
    }
    m[static_cast<std::size_t>(axis)] = 0;
}

} // namespace

double torus_eigenvalue(double a, double b, const std::vector<int>& m)
{
    const int n = static_cast<int>(m.size());
    double s = 0.0;
    for (int i = 0; i + 1 < n; ++i) s += static_cast<double>(m[static_cast<std::size_t>(i)]) * m[static_cast<std::size_t>(i)] / (a * a);
    const double last = m.back();
    s += last * last / (b * b);
    return two_pi * two_pi * s;
}

TorusSpec torus_spectrum(double a, double b, int n, int count)
{
    check_torus(a, b, n);
    if (count < 0) throw ParameterError("mode count must be nonnegative");
    TorusSpec spec;
    spec.a = a;
    spec.b = b;
    spec.n = n;
    if (count == 0) return spec;

    double limit = torus_eigenvalue(a, b, std::vector<int>(static_cast<std::size_t>(n), 1));
    std::vector<TorusMode> modes;
    for (;;) {
        modes.clear();
        std::vector<int> m(static_cast<std::size_t>(n), 0);
        enumerate(0, a, b, n, limit, m, modes);
        std::sort(modes.begin(), modes.end(),
                  [](const TorusMode& x, const TorusMode& y) { return x.eigenvalue < y.eigenvalue; });
        // complete when the last kept eigenvalue's tie group is fully inside
        if (static_cast<int>(modes.size()) >= count &&
            modes[static_cast<std::size_t>(count - 1)].eigenvalue * (1.0 + 4 * tie_tol) < limit)
            break;
        limit *= 2.0;
    }
    // reorder runs of numerically equal eigenvalues by the tie rule
    std::size_t start = 0;
    while (start < modes.size()) {
        std::size_t end = start + 1;
        while (end < modes.size() && modes[end].eigenvalue - modes[end - 1].eigenvalue <= tie_tol * modes[end].eigenvalue)
            ++end;
        std::sort(modes.begin() + static_cast<std::ptrdiff_t>(start), modes.begin() + static_cast<std::ptrdiff_t>(end),
                  tie_before);
        start = end;
    }
    modes.resize(static_cast<std::size_t>(count));
    spec.modes = std::move(modes);
    return spec;
}

double torus_eigenfunction(const TorusSpec& spec, int mode, const Eigen::VectorXd& point)
{
    if (mode < 0 || mode >= static_cast<int>(spec.modes.size())) throw ParameterError("torus mode index out of range");
    if (point.size() != spec.n) throw ParameterError("point dimension does not match the torus");
    const auto& md = spec.modes[static_cast<std::size_t>(mode)];
    double value = 1.0;
    for (int i = 0; i < spec.n; ++i) {
        const double u = md.m[static_cast<std::size_t>(i)] * point[i] / spec.period(i);
        const double r = u - std::floor(u);
        value *= folded_trig(md.k[static_cast<std::size_t>(i)], r, 1.0 - r);
    }
    return value;
}

bool torus_ratio_is_integer(double a, double b)
{
    const Rational r = Rational(b) / Rational(a);
    return boost::multiprecision::denominator(r) == 1;
}

int torus_embedding_dimension(double a, double b, int n)
{
    check_torus(a, b, n);
    const Rational r = Rational(b) / Rational(a);
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    const BigInt ceil = (num + den - 1) / den;
    return 2 * (static_cast<int>(ceil) + n - 2);
}

double torus_volume_bound(double a, double b, int n)
{
    check_torus(a, b, n);
    return std::pow(2.0, 1 - n) * std::pow(a, n - 1) * b / std::pow(a / 2.0, n);
}

bool torus_volume_bound_holds(double a, double b, int n)
{
    const int d = torus_embedding_dimension(a, b, n);
    const Rational ra(a);
    const Rational rb(b);
    Rational volume = rb;
    Rational inj_n = 1;
    for (int i = 0; i < n - 1; ++i) volume *= ra;
    for (int i = 0; i < n; ++i) inj_n *= ra / 2;
    Rational bound = volume / inj_n;
    for (int i = 0; i < n - 1; ++i) bound /= 2;
    return Rational(d) >= bound;
}

TorusGrid::TorusGrid(double a_, double b_, int n_, std::vector<int> counts_)
    : a(a_)
    , b(b_)
    , n(n_)
    , counts(std::move(counts_))
{
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("torus side lengths must be positive");
    if (n < 1 || static_cast<int>(counts.size()) != n) throw ParameterError("grid needs one count per axis");
    for (int c : counts)
        if (c < 3) throw ParameterError("grid needs at least 3 points per axis");
}

Index TorusGrid::size() const
{
    Index total = 1;
    for (int c : counts) total *= c;
    return total;
}

std::vector<int> TorusGrid::position(Index p) const
{
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        pos[static_cast<std::size_t>(i)] = static_cast<int>(p % counts[static_cast<std::size_t>(i)]);
        p /= counts[static_cast<std::size_t>(i)];
    }
    return pos;
}

Index TorusGrid::index(const std::vector<int>& pos) const
{
    Index p = 0;
    for (int i = n - 1; i >= 0; --i) p = p * counts[static_cast<std::size_t>(i)] + pos[static_cast<std::size_t>(i)];
    return p;
}

Eigen::VectorXd TorusGrid::point(Index p) const
{
    const auto pos = position(p);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = pos[static_cast<std::size_t>(i)] * spacing(i);
    return x;
}

GraphDistances torus_grid_distances(const TorusGrid& grid)
{
    // positions cached so the metric is a few integer operations per call
    const Index total = grid.size();
    Eigen::MatrixXi pos(total, grid.n);
    for (Index p = 0; p < total; ++p) {
        const auto v = grid.position(p);
        for (int i = 0; i < grid.n; ++i) pos(p, i) = v[static_cast<std::size_t>(i)];
    }
    std::vector<double> h(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) h[static_cast<std::size_t>(i)] = grid.spacing(i);
    return GraphDistances::from_metric(total, [pos, h, counts = grid.counts](Index p, Index q) {
        double s = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const int d = std::abs(pos(p, static_cast<Index>(i)) - pos(q, static_cast<Index>(i)));
            const double steps = std::min(d, counts[i] - d) * h[i];
            s += steps * steps;
        }
        return std::sqrt(s);
    });
}

LocalStars torus_grid_stars(const TorusGrid& grid)
{
    const Index total = grid.size();
    LocalStars stars;
    stars.neighbors.resize(static_cast<std::size_t>(total));
    stars.offsets.resize(static_cast<std::size_t>(total));
    for (Index p = 0; p < total; ++p) {
        const auto pos = grid.position(p);
        Eigen::MatrixXd off = Eigen::MatrixXd::Zero(2 * grid.n, grid.n);
        auto& nb = stars.neighbors[static_cast<std::size_t>(p)];
        for (int i = 0; i < grid.n; ++i)
            for (int s : {-1, 1}) {
                auto q = pos;
                const int c = grid.counts[static_cast<std::size_t>(i)];
                q[static_cast<std::size_t>(i)] = (q[static_cast<std::size_t>(i)] + s + c) % c;
                off(static_cast<Index>(nb.size()), i) = s * grid.spacing(i);
                nb.push_back(grid.index(q));
            }
        stars.offsets[static_cast<std::size_t>(p)] = std::move(off);
    }
    return stars;
}

Eigen::MatrixXd torus_grid_clifford(const TorusGrid& grid)
{
    const Index total = grid.size();
    Eigen::MatrixXd out(total, 2 * grid.n);
    for (Index p = 0; p < total; ++p) {
        const auto pos = grid.position(p);
        for (int i = 0; i < grid.n; ++i) {
            const double radius = grid.period(i) / two_pi;
            const double angle = two_pi * pos[static_cast<std::size_t>(i)] / grid.counts[static_cast<std::size_t>(i)];
            out(p, 2 * i) = radius * std::cos(angle);
            out(p, 2 * i + 1) = radius * std::sin(angle);
        }
    }
    return out;
}

Eigen::VectorXd torus_grid_mode_values(const TorusSpec& spec, int mode, const TorusGrid& grid)
{
    if (mode < 0 || mode >= static_cast<int>(spec.modes.size())) throw ParameterError("torus mode index out of range");
    if (grid.n != spec.n || grid.a != spec.a || grid.b != spec.b) throw ParameterError("grid does not match the torus");
    const auto& md = spec.modes[static_cast<std::size_t>(mode)];
    // per-axis factor tables from the exact residue (m j mod N) / N
    std::vector<std::vector<double>> factor(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        const auto c = static_cast<long long>(grid.counts[static_cast<std::size_t>(i)]);
        auto& f = factor[static_cast<std::size_t>(i)];
        f.resize(static_cast<std::size_t>(c));
        for (long long j = 0; j < c; ++j) {
            const long long q = (md.m[static_cast<std::size_t>(i)] * j) % c;
            const double r = static_cast<double>(q) / static_cast<double>(c);
            const double mirror = static_cast<double>(q == 0 ? c : c - q) / static_cast<double>(c);
            f[static_cast<std::size_t>(j)] = folded_trig(md.k[static_cast<std::size_t>(i)], r, q == 0 ? r : mirror);
        }
    }
    const Index total = grid.size();
    Eigen::VectorXd values(total);
    for (Index p = 0; p < total; ++p) {
        const auto pos = grid.position(p);
        double v = 1.0;
        for (int i = 0; i < grid.n; ++i) v *= factor[static_cast<std::size_t>(i)][static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
        values[p] = v;
    }
    return values;
}

std::vector<TorusMode> torus_proof_basis(double a, double b, int n, int m)
{
    check_torus(a, b, n);
    const int d = torus_embedding_dimension(a, b, n);
    if (m < 1 || m > d + 2)
        throw ParameterError("proof basis size m = " + std::to_string(m) + " outside [1, " + std::to_string(d + 2) + "]");
    const bool integer = torus_ratio_is_integer(a, b);
    const auto spec = torus_spectrum(a, b, n, m + 2);
    std::vector<TorusMode> out;
    for (const auto& mode : spec.modes) {
        if (static_cast<int>(out.size()) == m) break;
        if (integer) {
            const bool axis_n_only =
                std::all_of(mode.m.begin(), mode.m.end() - 1, [](int v) { return v == 0; });
            const Rational p = Rational(b) / Rational(a);
            if (axis_n_only && Rational(mode.m.back()) == p) continue;
        }
        out.push_back(mode);
    }
    return out;
}

EmbeddingCoords torus_proof_basis_coords(double a, double b, int n, const TorusGrid& grid, int m)
{
    TorusSpec spec;
    spec.a = a;
    spec.b = b;
    spec.n = n;
    spec.modes = torus_proof_basis(a, b, n, m);
    EmbeddingCoords out;
    out.kind = MapKind::eigenmap;
    out.coords.resize(grid.size(), m);
    for (int j = 0; j < m; ++j) out.coords.col(j) = torus_grid_mode_values(spec, j, grid);
    return out;
}

std::uint64_t binomial(int top, int k)
{
    if (k < 0 || top < 0 || k > top) return 0;
    k = std::min(k, top - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(top - k + i) / static_cast<std::uint64_t>(i);
    return c;
}

SphereSpec sphere_spectrum(int n, int degree_max)
{
    if (n < 1) throw ParameterError("sphere dimension n must be at least 1");
    if (degree_max < 0) throw ParameterError("degree_max must be nonnegative");
    SphereSpec spec;
    spec.n = n;
    for (int k = 0; k <= degree_max; ++k)
        spec.degrees.push_back({k, static_cast<double>(k) * (n + k - 1), binomial(n + k, k) - binomial(n + k - 2, k - 2)});
    return spec;
}

EmbeddingCoords sphere_coordinate_eigenmap(int n, const Eigen::MatrixXd& points)
{
    if (n < 1) throw ParameterError("sphere dimension n must be at least 1");
    if (points.cols() != n + 1) throw ParameterError("points must lie in R^{n+1}");
    for (Index i = 0; i < points.rows(); ++i)
        if (std::abs(points.row(i).norm() - 1.0) > 1e-9)
            throw ParameterError("point " + std::to_string(i) + " is not on the unit sphere");
    EmbeddingCoords out;
    out.kind = MapKind::eigenmap;
    out.coords = std::sqrt(static_cast<double>(n + 1)) * points;
    return out;
}

} // namespace specembed
