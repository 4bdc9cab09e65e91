#include "specembed/spectral_maps.hpp"

#include "specembed/error.hpp"

#include <cmath>
#include <limits>

namespace specembed {

std::string_view to_string(MapKind kind)
{
    switch (kind) {
    case MapKind::eigenmap: return "eigen";
    case MapKind::diffusion: return "diffusion";
    case MapKind::gps: return "gps";
    }
    return "unknown";
}

namespace {

EmbeddingCoords scaled(const Spectrum& spectrum, int m, MapKind kind, double t, const Eigen::VectorXd& factors)
{
    EmbeddingCoords out;
    out.kind = kind;
    out.t = t;
    out.fingerprint = spectrum.fingerprint;
    out.coords = spectrum.eigenvectors.middleCols(1, m) * factors.asDiagonal();
    return out;
}

void check_dim(const Spectrum& spectrum, int m)
{
    if (m < 1) throw ParameterError("embedding dimension m must be at least 1");
    if (m > spectrum.count())
        throw ParameterError("m = " + std::to_string(m) + " exceeds the " + std::to_string(spectrum.count()) +
                             " non-constant eigenpairs available");
}

} // namespace

EmbeddingCoords eigenmap(const Spectrum& spectrum, int m)
{
    check_dim(spectrum, m);
    EmbeddingCoords out;
    out.kind = MapKind::eigenmap;
    out.fingerprint = spectrum.fingerprint;
    out.coords = spectrum.eigenvectors.middleCols(1, m);
    return out;
}

EmbeddingCoords diffusion_map(const Spectrum& spectrum, int m, double t)
{
    check_dim(spectrum, m);
    if (!(t > 0.0)) throw ParameterError("diffusion time must be positive");
    const Eigen::VectorXd factors = (-0.5 * t * spectrum.eigenvalues.segment(1, m).array()).exp();
    return scaled(spectrum, m, MapKind::diffusion, t, factors);
}

EmbeddingCoords gps_map(const Spectrum& spectrum, int m)
{
    check_dim(spectrum, m);
    if (!(spectrum.eigenvalues[1] > 0.0))
        throw ParameterError("GPS map needs lambda_1 > 0 (is the input disconnected?)");
    const Eigen::VectorXd factors = spectrum.eigenvalues.segment(1, m).array().rsqrt();
    return scaled(spectrum, m, MapKind::gps, 0.0, factors);
}

double default_diffusion_time(const Spectrum& spectrum)
{
    if (spectrum.count() < 1 || !(spectrum.eigenvalues[1] > 0.0))
        throw ParameterError("default diffusion time needs lambda_1 > 0");
    return 1.0 / spectrum.eigenvalues[1];
}

DistortionBracket local_distortion(const EmbeddingCoords& coords, const GraphDistances& gd, double radius,
                                   const PairSampling& sampling)
{
    if (!(radius > 0.0)) throw ParameterError("radius must be positive");
    if (gd.num_points() != coords.size()) throw ParameterError("distance table and coordinates differ in size");
    DistortionBracket out;
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = 0.0;
    out.exhaustive = for_each_pair(gd, sampling, [&](Index i, Index j) {
        const double d = gd(i, j);
        if (!(d > 0.0) || d > radius) return;
        const double ratio = (coords.coords.row(i) - coords.coords.row(j)).norm() / d;
        out.lower = std::min(out.lower, ratio);
        out.upper = std::max(out.upper, ratio);
        ++out.pairs;
    });
    if (out.pairs == 0) throw ParameterError("no sampled pairs lie within the distortion radius");
    return out;
}

} // namespace specembed
