#pragma once

#include "specembed/eigensolver.hpp"
#include "specembed/pairs.hpp"

#include <string_view>

namespace specembed {

enum class MapKind { eigenmap, diffusion, gps };

std::string_view to_string(MapKind kind);

/// Per-vertex image of a spectral map; column j-1 holds the contribution of
/// eigenpair j (the constant mode is never included).
struct EmbeddingCoords
{
    Eigen::MatrixXd coords;
    MapKind kind = MapKind::eigenmap;
    double t = 0.0; // diffusion time, diffusion maps only
    std::uint64_t fingerprint = 0;

    Index size() const { return coords.rows(); }
    Index dim() const { return coords.cols(); }
};

/// x -> (phi_1(x), ..., phi_m(x))
EmbeddingCoords eigenmap(const Spectrum& spectrum, int m);
/// x -> (exp(-lambda_j t / 2) phi_j(x))_j
EmbeddingCoords diffusion_map(const Spectrum& spectrum, int m, double t);
/// x -> (lambda_j^{-1/2} phi_j(x))_j
EmbeddingCoords gps_map(const Spectrum& spectrum, int m);

/// 1 / lambda_1.
double default_diffusion_time(const Spectrum& spectrum);

struct DistortionBracket
{
    double lower = 0.0;
    double upper = 0.0;
    Index pairs = 0;
    bool exhaustive = true;
};

/// Min and max of |Phi(x) - Phi(y)| / d(x, y) over sampled pairs with
/// 0 < d(x, y) <= radius. An empirical bi-Lipschitz bracket.
DistortionBracket local_distortion(const EmbeddingCoords& coords, const GraphDistances& gd, double radius,
                                   const PairSampling& sampling = {});

} // namespace specembed
