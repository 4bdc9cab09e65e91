#include "specembed/heat_kernel.hpp"

#include "specembed/error.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace specembed {

namespace {

void check_time(double t)
{
    if (!(t > 0.0)) throw ParameterError("heat kernel time must be positive");
}

} // namespace

double partial_heat_kernel(const Spectrum& spectrum, int k, double t, Index i, Index j)
{
    check_time(t);
    if (k < 0 || k > spectrum.count())
        throw ParameterError("truncation order k = " + std::to_string(k) + " outside [0, " +
                             std::to_string(spectrum.count()) + "]");
    const Index n = spectrum.num_vertices();
    if (i < 0 || i >= n || j < 0 || j >= n) throw ParameterError("vertex index out of range");
    const auto& phi = spectrum.eigenvectors;
    // accumulate in ascending l with identical operand order for (i,j) and
    // (j,i) so the result is symmetric bit for bit
    const Index lo = std::min(i, j);
    const Index hi = std::max(i, j);
    double sum = 0.0;
    for (int l = 0; l <= k; ++l) sum += std::exp(-spectrum.eigenvalues[l] * t) * (phi(lo, l) * phi(hi, l));
    return sum;
}

double empirical_remainder(const Spectrum& spectrum, int k, double t)
{
    check_time(t);
    const int modes = static_cast<int>(spectrum.eigenvalues.size());
    if (k < 0 || k > modes)
        throw ParameterError("remainder order k = " + std::to_string(k) + " exceeds the " + std::to_string(modes) +
                             " computed modes");
    if (k == modes) return 0.0;
    const auto& phi = spectrum.eigenvectors;
    Eigen::VectorXd weights = (-t * spectrum.eigenvalues.tail(modes - k).array()).exp();
    const Eigen::VectorXd per_vertex = phi.rightCols(modes - k).array().square().matrix() * weights;
    return per_vertex.maxCoeff();
}

std::vector<double> default_time_grid(const Spectrum& spectrum, int m, int count)
{
    if (m < 1 || m > spectrum.count()) throw ParameterError("time grid order outside computed spectrum");
    if (count < 1) throw ParameterError("time grid needs at least one point");
    const double lambda1 = spectrum.eigenvalues[1];
    const double lambdam = spectrum.eigenvalues[m];
    if (!(lambda1 > 0.0)) throw ParameterError("time grid needs lambda_1 > 0");
    const double lo = std::log(1.0 / (10.0 * lambdam));
    const double hi = std::log(10.0 / lambda1);
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = count == 1 ? std::exp(hi) : std::exp(lo + (hi - lo) * i / (count - 1));
    return grid;
}

SeparationCertificate separation_certificate(const Spectrum& spectrum, const GraphDistances& gd, double epsilon,
                                             int d_max, const std::vector<double>& t_grid,
                                             const PairSampling& sampling)
{
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (t_grid.empty()) throw ParameterError("time grid is empty");
    for (double t : t_grid) check_time(t);
    if (d_max < 1 || d_max > spectrum.count())
        throw ParameterError("d_max = " + std::to_string(d_max) + " outside [1, " + std::to_string(spectrum.count()) +
                             "]");
    if (gd.num_points() != spectrum.num_vertices()) throw ParameterError("distance table and spectrum differ in size");

    const Index n = spectrum.num_vertices();
    const std::size_t nt = t_grid.size();
    const auto& phi = spectrum.eigenvectors;

    // w(l, t) = exp(-lambda_l t)
    Eigen::MatrixXd w(d_max + 1, static_cast<Index>(nt));
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (int l = 0; l <= d_max; ++l) w(l, static_cast<Index>(ti)) = std::exp(-spectrum.eigenvalues[l] * t_grid[ti]);

    // diag(d, t)(x) = p^d(t, x, x), built incrementally over d
    std::vector<Eigen::MatrixXd> diag(static_cast<std::size_t>(d_max + 1), Eigen::MatrixXd(n, nt));
    for (std::size_t ti = 0; ti < nt; ++ti) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (int l = 0; l <= d_max; ++l) {
            acc += w(l, static_cast<Index>(ti)) * phi.col(l).array().square().matrix();
            diag[static_cast<std::size_t>(l)].col(static_cast<Index>(ti)) = acc;
        }
    }

    // margin(d, t) = min over far pairs, both orientations
    Eigen::MatrixXd margin =
        Eigen::MatrixXd::Constant(d_max + 1, static_cast<Index>(nt), std::numeric_limits<double>::infinity());
    SeparationCertificate cert;
    cert.epsilon = epsilon;
    cert.exhaustive = for_each_pair(gd, sampling, [&](Index x, Index y) {
        if (gd(x, y) < epsilon) return;
        ++cert.pairs_tested;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const auto tc = static_cast<Index>(ti);
            double cross = 0.0;
            for (int l = 0; l <= d_max; ++l) {
                cross += w(l, tc) * (phi(x, l) * phi(y, l));
                if (l == 0) continue;
                const auto& dg = diag[static_cast<std::size_t>(l)];
                const double m = std::min(dg(x, tc), dg(y, tc)) - cross;
                if (m < margin(l, tc)) margin(l, tc) = m;
            }
        }
    });

    double best = -std::numeric_limits<double>::infinity();
    int best_d = d_max;
    double best_t = t_grid.front();
    for (int d = 1; d <= d_max; ++d) {
        Index ti = 0;
        const double m = margin.row(d).maxCoeff(&ti);
        if (m > 0.0) {
            cert.d = d;
            cert.T = t_grid[static_cast<std::size_t>(ti)];
            cert.margin = m;
            cert.pass = true;
            return cert;
        }
        if (m > best) {
            best = m;
            best_d = d;
            best_t = t_grid[static_cast<std::size_t>(ti)];
        }
    }
    cert.d = best_d;
    cert.T = best_t;
    cert.margin = best;
    cert.pass = false;
    return cert;
}

void write_certificate(std::ostream& out, const SeparationCertificate& cert)
{
    const auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    out << "{\n"
        << "  \"d\": " << cert.d << ",\n"
        << "  \"T\": " << num(cert.T) << ",\n"
        << "  \"epsilon\": " << num(cert.epsilon) << ",\n"
        << "  \"margin\": " << num(cert.margin) << ",\n"
        << "  \"pairs_tested\": " << cert.pairs_tested << ",\n"
        << "  \"pass\": " << (cert.pass ? "true" : "false") << ",\n"
        << "  \"sampling\": \"" << (cert.exhaustive ? "exhaustive" : "random") << "\"\n"
        << "}\n";
}

} // namespace specembed
