#include "basketlab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "basketlab/error.hpp"

namespace basketlab {

namespace {

struct ItemsKey {
    std::vector<std::uint32_t> items;
    bool operator==(const ItemsKey&) const = default;
};

struct ItemsKeyHash {
    std::size_t operator()(const ItemsKey& k) const {
        std::size_t h = 1469598103934665603ull;
        for (auto v : k.items) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

using SupportMap = std::unordered_map<ItemsKey, std::uint64_t, ItemsKeyHash>;

// Fixed-width bitset rows, one per basket / candidate.
struct MaskTable {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    MaskTable(std::size_t rows, std::uint32_t universe)
        : words((universe + 63) / 64), bits(rows * words, 0) {}

    void set(std::size_t row, std::uint32_t item) {
        bits[row * words + item / 64] |= std::uint64_t{1} << (item % 64);
    }

    const std::uint64_t* row(std::size_t r) const { return bits.data() + r * words; }
};

bool contains_all(const std::uint64_t* basket, const std::uint64_t* cand,
                  std::size_t words) {
    for (std::size_t w = 0; w < words; ++w)
        if ((basket[w] & cand[w]) != cand[w]) return false;
    return true;
}

std::vector<std::vector<std::uint32_t>> join_level(
    const std::vector<Itemset>& level) {
    // Sets sharing all but the last item merge into a (k+1)-candidate; the
    // level is lexicographically sorted, so equal prefixes are adjacent.
    std::vector<std::vector<std::uint32_t>> candidates;
    const std::size_t k = level.empty() ? 0 : level.front().items.size();
    for (std::size_t i = 0; i < level.size(); ++i) {
        for (std::size_t j = i + 1; j < level.size(); ++j) {
            const auto& a = level[i].items;
            const auto& b = level[j].items;
            if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
            std::vector<std::uint32_t> merged(a);
            merged.push_back(b[k - 1]);
            candidates.push_back(std::move(merged));
        }
    }
    return candidates;
}

bool all_subsets_frequent(const std::vector<std::uint32_t>& candidate,
                          const std::unordered_set<ItemsKey, ItemsKeyHash>& prev) {
    std::vector<std::uint32_t> subset(candidate.size() - 1);
    for (std::size_t drop = 0; drop < candidate.size(); ++drop) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < candidate.size(); ++i)
            if (i != drop) subset[w++] = candidate[i];
        if (prev.count(ItemsKey{subset}) == 0) return false;
    }
    return true;
}

void validate_params(const MiningParams& params) {
    if (params.min_confidence < 0.0 || params.min_confidence > 1.0)
        throw Error::data("min_confidence must be in [0,1]");
    if (params.max_itemset_size < 1)
        throw Error::data("max_itemset_size must be at least 1");
}

SupportMap build_support_map(const FrequentItemsets& frequent) {
    SupportMap map;
    map.reserve(frequent.total_count() * 2);
    for (const auto& level : frequent.levels)
        for (const auto& s : level) map.emplace(ItemsKey{s.items}, s.support_count);
    return map;
}

std::uint64_t lookup_support(const SupportMap& map,
                             const std::vector<std::uint32_t>& items) {
    const auto it = map.find(ItemsKey{items});
    if (it == map.end())
        throw Error::internal("frequent itemset list is missing a required subset");
    return it->second;
}

} // namespace

std::uint64_t MiningParams::resolve_support_threshold(
    std::uint64_t total_baskets) const {
    std::uint64_t threshold = 0;
    if (std::holds_alternative<double>(min_support)) {
        const double rel = std::get<double>(min_support);
        if (rel <= 0.0 || rel > 1.0)
            throw Error::data("relative min_support must be in (0,1]");
        threshold = static_cast<std::uint64_t>(
            std::ceil(rel * static_cast<double>(total_baskets) - 1e-9));
    } else {
        threshold = std::get<std::uint64_t>(min_support);
    }
    if (threshold < 1)
        throw Error::data("support threshold resolves to zero baskets");
    return threshold;
}

std::vector<std::uint64_t> count_itemsets_serial(
    const BasketDataset& baskets,
    const std::vector<std::vector<std::uint32_t>>& candidates) {
    std::vector<std::uint64_t> counts(candidates.size(), 0);
    for (const auto& b : baskets.baskets) {
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (std::includes(b.items.begin(), b.items.end(),
                              candidates[c].begin(), candidates[c].end()))
                ++counts[c];
        }
    }
    return counts;
}

std::vector<std::uint64_t> count_itemsets(
    const BasketDataset& baskets,
    const std::vector<std::vector<std::uint32_t>>& candidates) {
    std::vector<std::uint64_t> counts(candidates.size(), 0);
    if (candidates.empty() || baskets.baskets.empty()) return counts;

    const std::uint32_t universe = baskets.catalog.size();
    MaskTable basket_masks(baskets.baskets.size(), universe);
    for (std::size_t i = 0; i < baskets.baskets.size(); ++i)
        for (auto item : baskets.baskets[i].items) basket_masks.set(i, item);
    MaskTable cand_masks(candidates.size(), universe);
    for (std::size_t c = 0; c < candidates.size(); ++c)
        for (auto item : candidates[c]) cand_masks.set(c, item);

    const auto n = static_cast<std::int64_t>(baskets.baskets.size());
    const std::size_t words = basket_masks.words;

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(candidates.size(), 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            const std::uint64_t* row = basket_masks.row(static_cast<std::size_t>(i));
            for (std::size_t c = 0; c < candidates.size(); ++c)
                if (contains_all(row, cand_masks.row(c), words)) ++local[c];
        }
#pragma omp critical
        {
            for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += local[c];
        }
    }
    return counts;
}

FrequentItemsets frequent_itemsets(const BasketDataset& baskets,
                                   const MiningParams& params) {
    validate_params(params);
    if (baskets.baskets.empty()) throw Error::data("dataset has no baskets");

    FrequentItemsets out;
    out.total_baskets = baskets.baskets.size();
    out.threshold = params.resolve_support_threshold(out.total_baskets);

    // Level 1: plain item frequencies.
    std::vector<std::uint64_t> item_counts(baskets.catalog.size(), 0);
    for (const auto& b : baskets.baskets)
        for (auto item : b.items) ++item_counts[item];
    std::vector<Itemset> level;
    for (std::uint32_t j = 0; j < baskets.catalog.size(); ++j)
        if (item_counts[j] >= out.threshold) level.push_back(Itemset{{j}, item_counts[j]});
    if (level.empty()) return out;
    out.levels.push_back(std::move(level));

    for (std::uint32_t k = 2; k <= params.max_itemset_size; ++k) {
        const auto& prev_level = out.levels.back();
        std::unordered_set<ItemsKey, ItemsKeyHash> prev_set;
        prev_set.reserve(prev_level.size() * 2);
        for (const auto& s : prev_level) prev_set.insert(ItemsKey{s.items});

        auto candidates = join_level(prev_level);
        candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                        [&](const auto& c) {
                                            return !all_subsets_frequent(c, prev_set);
                                        }),
                         candidates.end());
        if (candidates.empty()) break;

        const auto counts = count_itemsets(baskets, candidates);
        std::vector<Itemset> next;
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (counts[c] >= out.threshold)
                next.push_back(Itemset{std::move(candidates[c]), counts[c]});
        if (next.empty()) break;
        std::sort(next.begin(), next.end(),
                  [](const Itemset& a, const Itemset& b) { return a.items < b.items; });
        out.levels.push_back(std::move(next));
    }
    return out;
}

std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent,
                                            const MiningParams& params) {
    validate_params(params);
    const auto support = build_support_map(frequent);
    const auto total = static_cast<double>(frequent.total_baskets);

    std::vector<AssociationRule> rules;
    for (std::size_t level = 1; level < frequent.levels.size(); ++level) {
        for (const auto& s : frequent.levels[level]) {
            const auto m = s.items.size();
            if (m >= 32)
                throw Error::internal("itemset too large for rule enumeration");
            // Non-empty proper subsets of s enumerated by bitmask.
            for (std::uint32_t bits = 1; bits + 1 < (1u << m); ++bits) {
                std::vector<std::uint32_t> ante, cons;
                for (std::size_t i = 0; i < m; ++i)
                    ((bits >> i) & 1u ? ante : cons).push_back(s.items[i]);
                const std::uint64_t ante_support = lookup_support(support, ante);
                const double confidence =
                    static_cast<double>(s.support_count) / static_cast<double>(ante_support);
                if (confidence < params.min_confidence) continue;
                AssociationRule rule;
                rule.antecedent = Itemset{std::move(ante), ante_support};
                rule.consequent = Itemset{cons, lookup_support(support, cons)};
                rule.joint_support_count = s.support_count;
                rule.confidence = confidence;
                rule.relative_support = static_cast<double>(s.support_count) / total;
                rules.push_back(std::move(rule));
            }
        }
    }

    std::sort(rules.begin(), rules.end(),
              [](const AssociationRule& a, const AssociationRule& b) {
                  if (a.confidence != b.confidence) return a.confidence > b.confidence;
                  if (a.joint_support_count != b.joint_support_count)
                      return a.joint_support_count > b.joint_support_count;
                  if (a.antecedent.items != b.antecedent.items)
                      return a.antecedent.items < b.antecedent.items;
                  return a.consequent.items < b.consequent.items;
              });
    return rules;
}

ValidationResult validate_rules(const std::vector<AssociationRule>& rules,
                                const ItemCatalog& rule_catalog,
                                const BasketDataset& holdout,
                                double min_confidence) {
    if (min_confidence < 0.0 || min_confidence > 1.0)
        throw Error::data("min_confidence must be in [0,1]");

    ValidationResult out;
    out.holdout_baskets = holdout.baskets.size();

    // Remap each rule's items into the holdout catalog by code; batch-count
    // the mappable antecedent and joint sets in one kernel pass.
    std::vector<std::vector<std::uint32_t>> candidates;
    std::vector<std::pair<std::int64_t, std::int64_t>> slots; // ante, joint per rule
    const auto remap = [&](const std::vector<std::uint32_t>& items,
                           std::vector<std::uint32_t>& mapped) {
        mapped.clear();
        for (auto idx : items) {
            const auto found = holdout.catalog.find(rule_catalog.code(idx));
            if (!found) return false;
            mapped.push_back(*found);
        }
        std::sort(mapped.begin(), mapped.end());
        return true;
    };

    std::vector<std::uint32_t> mapped;
    for (const auto& rule : rules) {
        std::pair<std::int64_t, std::int64_t> slot{-1, -1};
        if (remap(rule.antecedent.items, mapped)) {
            slot.first = static_cast<std::int64_t>(candidates.size());
            candidates.push_back(mapped);
            std::vector<std::uint32_t> joint = mapped;
            if (remap(rule.consequent.items, mapped)) {
                joint.insert(joint.end(), mapped.begin(), mapped.end());
                std::sort(joint.begin(), joint.end());
                slot.second = static_cast<std::int64_t>(candidates.size());
                candidates.push_back(std::move(joint));
            }
        }
        slots.push_back(slot);
    }
    const auto counts = count_itemsets(holdout, candidates);

    for (std::size_t r = 0; r < rules.size(); ++r) {
        RuleCheck check;
        check.rule = rules[r];
        const auto [ante_slot, joint_slot] = slots[r];
        check.holdout_antecedent_support =
            ante_slot >= 0 ? counts[static_cast<std::size_t>(ante_slot)] : 0;
        check.holdout_joint_support =
            joint_slot >= 0 ? counts[static_cast<std::size_t>(joint_slot)] : 0;
        if (check.holdout_antecedent_support == 0) {
            check.reason = "antecedent unsupported";
            out.eliminated.push_back(std::move(check));
            continue;
        }
        check.holdout_confidence =
            static_cast<double>(check.holdout_joint_support) /
            static_cast<double>(check.holdout_antecedent_support);
        if (check.holdout_confidence >= min_confidence) {
            out.validated.push_back(std::move(check));
        } else {
            check.reason = "confidence below threshold";
            out.eliminated.push_back(std::move(check));
        }
    }
    return out;
}

} // namespace basketlab
