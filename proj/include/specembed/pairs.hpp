#pragma once

#include "specembed/geometry.hpp"

#include <cstdint>
#include <random>

namespace specembed {

/// How vertex pairs are drawn for quadratic scans.
struct PairSampling
{
    /// All pairs are visited when every vertex is a distance source and
    /// N <= exhaustive_limit.
    Index exhaustive_limit = 2000;
    /// Otherwise this many seeded uniform random pairs.
    Index samples = 1'000'000;
    std::uint64_t seed = 0x9a1f5eedull;
};

/// Calls visit(i, j) for each selected pair (i != j, d(i, j) available).
/// Returns true when the visit was exhaustive.
template <typename Visit>
bool for_each_pair(const GraphDistances& gd, const PairSampling& sampling, Visit&& visit)
{
    const Index n = gd.num_points();
    if (gd.covers_all()) {
        if (n <= sampling.exhaustive_limit) {
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j) visit(i, j);
            return true;
        }
    } else {
        const auto& sources = gd.sources();
        const Index total = static_cast<Index>(sources.size()) * (n - 1);
        if (total <= sampling.samples) {
            for (Index s : sources)
                for (Index j = 0; j < n; ++j) {
                    // pairs of two sources are visited once
                    if (j == s || (gd.is_source(j) && j < s)) continue;
                    visit(s, j);
                }
            return true;
        }
    }
    std::mt19937_64 rng(sampling.seed);
    const auto& sources = gd.sources();
    const bool all = gd.covers_all();
    std::uniform_int_distribution<Index> pick_any(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_source(0, all ? 0 : sources.size() - 1);
    for (Index s = 0; s < sampling.samples; ++s) {
        const Index i = all ? pick_any(rng) : sources[pick_source(rng)];
        Index j = pick_any(rng);
        while (j == i) j = pick_any(rng);
        visit(i, j);
    }
    return false;
}

} // namespace specembed
