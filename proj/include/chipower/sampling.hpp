#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chipower/composition.hpp"
#include "chipower/error.hpp"
#include "chipower/rng.hpp"

namespace coda {

// Plan for drawing random subcompositions: for each fraction f, draw
// `replicates_per_fraction` part sets of size round(f*J), always containing
// `must_include`.
struct SubcompositionPlan {
    std::vector<double> fractions;        // strictly increasing, in (0, 1]
    std::size_t replicates_per_fraction = 1;
    std::vector<Index> must_include;      // part indices forced into every set
    std::uint64_t seed = 0;
};

inline void validate(const SubcompositionPlan& plan, Index n_parts) {
    if (plan.fractions.empty()) throw data_error("subcomposition plan has no fractions");
    for (std::size_t k = 0; k < plan.fractions.size(); ++k) {
        const double f = plan.fractions[k];
        if (!(f > 0.0 && f <= 1.0))
            throw data_error("fraction " + std::to_string(f) + " outside (0,1]");
        if (k > 0 && !(f > plan.fractions[k - 1]))
            throw data_error("fractions must be strictly increasing");
    }
    if (plan.replicates_per_fraction == 0) throw data_error("replicates_per_fraction must be positive");
    std::vector<Index> must = plan.must_include;
    std::sort(must.begin(), must.end());
    if (std::adjacent_find(must.begin(), must.end()) != must.end())
        throw data_error("must_include indices must be distinct");
    if (!must.empty() && (must.front() < 0 || must.back() >= n_parts))
        throw data_error("must_include index out of range");
    for (double f : plan.fractions) {
        const Index size = static_cast<Index>(std::floor(f * static_cast<double>(n_parts) + 0.5));
        if (size < 2)
            throw data_error("fraction " + std::to_string(f) + " gives subcomposition size " +
                             std::to_string(size) + " < 2");
        if (size < static_cast<Index>(must.size()))
            throw data_error("fraction " + std::to_string(f) + " gives size " + std::to_string(size) +
                             " smaller than the " + std::to_string(must.size()) + " forced parts");
    }
}

// Subcomposition size for a fraction of J parts: round half up.
inline Index subcomposition_size(double fraction, Index n_parts) {
    return static_cast<Index>(std::floor(fraction * static_cast<double>(n_parts) + 0.5));
}

// Draws all planned part sets. Pure function of (J, plan): each replicate
// derives its own stream from (seed, fraction index, replicate index), so the
// output is identical across runs and evaluation orders. Sets are returned
// sorted ascending, grouped by fraction then replicate.
inline std::vector<std::vector<Index>> sample_subcompositions(Index n_parts,
                                                              const SubcompositionPlan& plan) {
    validate(plan, n_parts);
    std::vector<Index> must = plan.must_include;
    std::sort(must.begin(), must.end());

    std::vector<Index> pool_base;
    pool_base.reserve(static_cast<std::size_t>(n_parts) - must.size());
    for (Index j = 0; j < n_parts; ++j)
        if (!std::binary_search(must.begin(), must.end(), j)) pool_base.push_back(j);

    std::vector<std::vector<Index>> sets;
    sets.reserve(plan.fractions.size() * plan.replicates_per_fraction);
    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
        const Index size = subcomposition_size(plan.fractions[fi], n_parts);
        const std::size_t extra = static_cast<std::size_t>(size) - must.size();
        for (std::size_t rep = 0; rep < plan.replicates_per_fraction; ++rep) {
            SeededRng rng = SeededRng::derive(plan.seed, fi, rep);
            std::vector<Index> pool = pool_base;
            // partial Fisher-Yates: the first `extra` slots become the draw
            for (std::size_t k = 0; k < extra; ++k) {
                const std::size_t pick = k + static_cast<std::size_t>(rng.next_below(
                                                 static_cast<std::uint64_t>(pool.size() - k)));
                std::swap(pool[k], pool[pick]);
            }
            std::vector<Index> set(must);
            set.insert(set.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extra));
            std::sort(set.begin(), set.end());
            sets.push_back(std::move(set));
        }
    }
    return sets;
}

inline std::vector<std::vector<Index>> sample_subcompositions(const CompositionMatrix& m,
                                                              const SubcompositionPlan& plan) {
    return sample_subcompositions(m.cols(), plan);
}

} // namespace coda
