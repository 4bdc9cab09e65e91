#pragma once

#include "specembed/eigensolver.hpp"
#include "specembed/pairs.hpp"

#include <iosfwd>
#include <vector>

namespace specembed {

/// p^k(t, i, j) = sum_{l=0..k} exp(-lambda_l t) phi_l(i) phi_l(j).
double partial_heat_kernel(const Spectrum& spectrum, int k, double t, Index i, Index j);

/// max_x sum_{j=k..K-1} exp(-lambda_j t) phi_j(x)^2 over the K computed
/// modes (K = eigenvalues.size(), constant mode included). A lower bound on
/// the true remainder since the tail past K is unknown; k == K gives 0.
double empirical_remainder(const Spectrum& spectrum, int k, double t);

struct SeparationCertificate
{
    int d = 0;
    double T = 0.0;
    double epsilon = 0.0;
    /// min over far pairs (both orientations) of p^d(T,x,x) - p^d(T,x,y)
    double margin = 0.0;
    Index pairs_tested = 0;
    bool pass = false;
    bool exhaustive = true;
};

/// 16 log-spaced times in [1 / (10 lambda_m), 10 / lambda_1].
std::vector<double> default_time_grid(const Spectrum& spectrum, int m, int count = 16);

///
/// Scans d = 1..d_max and t over t_grid. Returns the smallest d for which
/// some t separates every sampled pair with graph distance >= epsilon; at that
/// d the time with the largest margin is recorded. On failure the best
/// margin seen is reported with pass = false.
///
SeparationCertificate separation_certificate(const Spectrum& spectrum, const GraphDistances& gd, double epsilon,
                                             int d_max, const std::vector<double>& t_grid,
                                             const PairSampling& sampling = {});

void write_certificate(std::ostream& out, const SeparationCertificate& cert);

} // namespace specembed
