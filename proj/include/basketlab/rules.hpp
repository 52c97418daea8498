#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "basketlab/dataset.hpp"

namespace basketlab {

struct Itemset {
    std::vector<std::uint32_t> items; // strictly ascending
    std::uint64_t support_count = 0;

    friend bool operator==(const Itemset&, const Itemset&) = default;
};

struct AssociationRule {
    Itemset antecedent;
    Itemset consequent;
    std::uint64_t joint_support_count = 0;
    double confidence = 0.0;       // joint / antecedent support
    double relative_support = 0.0; // joint / total baskets
};

struct MiningParams {
    // Relative support in (0,1] or an absolute basket count >= 1.
    std::variant<double, std::uint64_t> min_support = 0.01;
    double min_confidence = 0.70;
    std::uint32_t max_itemset_size = 5;

    // Smallest absolute count satisfying the threshold. Throws if invalid.
    std::uint64_t resolve_support_threshold(std::uint64_t total_baskets) const;
};

struct FrequentItemsets {
    std::vector<std::vector<Itemset>> levels; // levels[k-1] = size-k itemsets
    std::uint64_t total_baskets = 0;
    std::uint64_t threshold = 0;

    std::uint64_t total_count() const {
        std::uint64_t n = 0;
        for (const auto& level : levels) n += level.size();
        return n;
    }
};

// Support counts for a batch of candidate itemsets (each strictly ascending).
// The OpenMP kernel tests word-wise bitset containment per basket partition
// and merges integer counts, so results are independent of thread count.
std::vector<std::uint64_t> count_itemsets(const BasketDataset& baskets,
                                          const std::vector<std::vector<std::uint32_t>>& candidates);

// Serial reference: sorted-itemset subset test per basket via std::includes.
std::vector<std::uint64_t> count_itemsets_serial(
    const BasketDataset& baskets,
    const std::vector<std::vector<std::uint32_t>>& candidates);

// Level-wise Apriori. Level k+1 candidates join level-k sets sharing a
// (k-1)-prefix and are pruned unless every k-subset is frequent.
FrequentItemsets frequent_itemsets(const BasketDataset& baskets,
                                   const MiningParams& params);

// Every split A -> S\A of every frequent S with |S| >= 2 whose confidence
// clears the gate. Sorted by confidence desc, joint support desc, then
// antecedent and consequent item order.
std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent,
                                            const MiningParams& params);

struct RuleCheck {
    AssociationRule rule; // indices valid for the mining catalog
    std::uint64_t holdout_antecedent_support = 0;
    std::uint64_t holdout_joint_support = 0;
    double holdout_confidence = 0.0;
    std::string reason; // empty for validated rules
};

struct ValidationResult {
    std::vector<RuleCheck> validated;
    std::vector<RuleCheck> eliminated;
    std::uint64_t holdout_baskets = 0;
};

// Recomputes each rule's confidence on a holdout dataset, matching item codes
// by name. Rules whose antecedent never occurs on the holdout are eliminated
// with reason "antecedent unsupported"; the rest partition by the gate.
ValidationResult validate_rules(const std::vector<AssociationRule>& rules,
                                const ItemCatalog& rule_catalog,
                                const BasketDataset& holdout,
                                double min_confidence);

} // namespace basketlab
