#include "basketlab/reduction.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "basketlab/error.hpp"

namespace basketlab {

namespace {

void check_targets(const BasketDataset& baskets,
                   const std::vector<std::uint32_t>& targets) {
    if (targets.empty()) throw Error::data("reduction targets must be non-empty");
    for (auto t : targets)
        if (t >= baskets.catalog.size())
            throw Error::data("target index " + std::to_string(t) +
                              " outside catalog of size " +
                              std::to_string(baskets.catalog.size()));
}

std::vector<bool> target_mask(std::uint32_t catalog_size,
                              const std::vector<std::uint32_t>& targets) {
    std::vector<bool> mask(catalog_size, false);
    for (auto t : targets) mask[t] = true;
    return mask;
}

bool hits_target(const Basket& b, const std::vector<bool>& mask) {
    for (auto item : b.items)
        if (mask[item]) return true;
    return false;
}

} // namespace

std::vector<std::uint64_t> cooccurrence_counts_serial(
    const BasketDataset& baskets, const std::vector<std::uint32_t>& targets) {
    check_targets(baskets, targets);
    const auto mask = target_mask(baskets.catalog.size(), targets);
    std::vector<std::uint64_t> counts(baskets.catalog.size(), 0);
    for (const auto& b : baskets.baskets) {
        if (!hits_target(b, mask)) continue;
        for (auto item : b.items) ++counts[item];
    }
    return counts;
}

std::vector<std::uint64_t> cooccurrence_counts(
    const BasketDataset& baskets, const std::vector<std::uint32_t>& targets) {
    check_targets(baskets, targets);
    const auto mask = target_mask(baskets.catalog.size(), targets);
    std::vector<std::uint64_t> counts(baskets.catalog.size(), 0);
    const auto n = static_cast<std::int64_t>(baskets.baskets.size());

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(baskets.catalog.size(), 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            const auto& b = baskets.baskets[static_cast<std::size_t>(i)];
            if (!hits_target(b, mask)) continue;
            for (auto item : b.items) ++local[item];
        }
#pragma omp critical
        {
            for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += local[j];
        }
    }
    return counts;
}

std::pair<BasketDataset, ReductionStats> reduce(const BasketDataset& baskets,
                                                const ReductionSpec& spec) {
    check_targets(baskets, spec.targets);
    if (spec.policy == AttributePolicy::TargetsPlusCooccurring &&
        spec.min_cooccurrence < 1)
        throw Error::data("min_cooccurrence must be at least 1");

    const auto mask = target_mask(baskets.catalog.size(), spec.targets);

    // Phase 1: instance elimination.
    std::vector<const Basket*> kept_baskets;
    kept_baskets.reserve(baskets.baskets.size());
    for (const auto& b : baskets.baskets)
        if (hits_target(b, mask)) kept_baskets.push_back(&b);
    if (kept_baskets.empty()) throw Error::data("reduction removed all instances");

    // Phase 2: attribute elimination.
    std::vector<bool> keep_attr(baskets.catalog.size(), false);
    for (auto t : spec.targets) keep_attr[t] = true;
    if (spec.policy == AttributePolicy::TargetsPlusCooccurring) {
        const auto counts = cooccurrence_counts(baskets, spec.targets);
        for (std::uint32_t j = 0; j < baskets.catalog.size(); ++j)
            if (counts[j] >= spec.min_cooccurrence) keep_attr[j] = true;
    }

    std::vector<std::uint32_t> remap(baskets.catalog.size(),
                                     std::numeric_limits<std::uint32_t>::max());
    BasketDataset reduced;
    for (std::uint32_t j = 0; j < baskets.catalog.size(); ++j) {
        if (!keep_attr[j]) continue;
        remap[j] = reduced.catalog.add(baskets.catalog.code(j));
    }

    reduced.baskets.reserve(kept_baskets.size());
    for (const Basket* b : kept_baskets) {
        Basket projected;
        projected.date = b->date;
        for (auto item : b->items)
            if (keep_attr[item]) projected.items.push_back(remap[item]);
        // remap is monotone over kept attributes, so order is preserved
        reduced.baskets.push_back(std::move(projected));
    }

    ReductionStats stats;
    stats.rows_before = baskets.baskets.size();
    stats.rows_after = reduced.baskets.size();
    stats.attrs_before = baskets.catalog.size();
    stats.attrs_after = reduced.catalog.size();
    return {std::move(reduced), stats};
}

ReductionSpec spec_from_codes(const ItemCatalog& catalog,
                              const std::vector<std::string>& target_codes,
                              AttributePolicy policy,
                              std::uint64_t min_cooccurrence) {
    ReductionSpec spec;
    spec.policy = policy;
    spec.min_cooccurrence = min_cooccurrence;
    for (const auto& code : target_codes) {
        const auto idx = catalog.find(code);
        if (!idx) throw Error::data("target item '" + code + "' not in catalog");
        spec.targets.push_back(*idx);
    }
    std::sort(spec.targets.begin(), spec.targets.end());
    spec.targets.erase(std::unique(spec.targets.begin(), spec.targets.end()),
                       spec.targets.end());
    return spec;
}

} // namespace basketlab
