#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "basketlab/dataset.hpp"

namespace basketlab {

// Attribute retention after instance elimination: keep only the analysis
// targets, or additionally keep every attribute that co-occurs with a target
// often enough.
enum class AttributePolicy { TargetsOnly, TargetsPlusCooccurring };

struct ReductionSpec {
    std::vector<std::uint32_t> targets;
    AttributePolicy policy = AttributePolicy::TargetsPlusCooccurring;
    std::uint64_t min_cooccurrence = 1;
};

struct ReductionStats {
    std::uint64_t rows_before = 0;
    std::uint64_t rows_after = 0;
    std::uint64_t attrs_before = 0;
    std::uint64_t attrs_after = 0;
};

// count[j] = number of baskets containing item j together with at least one
// target. For a target t this is t's support among target-containing baskets.
// OpenMP-parallel over baskets; integer merge keeps the result independent of
// the partitioning.
std::vector<std::uint64_t> cooccurrence_counts(const BasketDataset& baskets,
                                               const std::vector<std::uint32_t>& targets);

// Serial reference for the kernel above.
std::vector<std::uint64_t> cooccurrence_counts_serial(
    const BasketDataset& baskets, const std::vector<std::uint32_t>& targets);

// Two-phase reduction: drop every basket sharing no item with the targets,
// then drop attributes outside the retention policy and project the survivors.
// Support counts of any itemset intersecting the targets are preserved
// exactly, because eliminated baskets never contained such an itemset.
std::pair<BasketDataset, ReductionStats> reduce(const BasketDataset& baskets,
                                                const ReductionSpec& spec);

// Convenience: resolve target codes against a catalog.
ReductionSpec spec_from_codes(const ItemCatalog& catalog,
                              const std::vector<std::string>& target_codes,
                              AttributePolicy policy = AttributePolicy::TargetsPlusCooccurring,
                              std::uint64_t min_cooccurrence = 1);

} // namespace basketlab
