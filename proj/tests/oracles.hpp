#pragma once

// Brute-force reference implementations used as oracles. These enumerate or
// scan directly from the definitions and never share code with the library
// algorithms they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "basketlab/dataset.hpp"
#include "basketlab/model_tree.hpp"

namespace oracle {

using basketlab::BasketDataset;
using basketlab::InstanceTable;

inline bool contains(const std::vector<std::uint32_t>& basket,
                     const std::vector<std::uint32_t>& items) {
    for (auto item : items) {
        bool found = false;
        for (auto b : basket) {
            if (b == item) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// Support of one itemset by scanning every basket.
inline std::uint64_t support_scan(const BasketDataset& data,
                                  const std::vector<std::uint32_t>& items) {
    std::uint64_t count = 0;
    for (const auto& b : data.baskets)
        if (contains(b.items, items)) ++count;
    return count;
}

// Every frequent itemset (as a sorted item list) with its support, found by
// enumerating all 2^n - 1 subsets of the catalog. Catalog must be small.
inline std::map<std::vector<std::uint32_t>, std::uint64_t> enumerate_frequent(
    const BasketDataset& data, std::uint64_t threshold, std::uint32_t max_size) {
    const std::uint32_t n = data.catalog.size();
    std::vector<std::uint32_t> basket_masks;
    basket_masks.reserve(data.baskets.size());
    for (const auto& b : data.baskets) {
        std::uint32_t mask = 0;
        for (auto item : b.items) mask |= 1u << item;
        basket_masks.push_back(mask);
    }
    std::map<std::vector<std::uint32_t>, std::uint64_t> out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (static_cast<std::uint32_t>(__builtin_popcount(mask)) > max_size)
            continue;
        std::uint64_t count = 0;
        for (auto bm : basket_masks)
            if ((bm & mask) == mask) ++count;
        if (count < threshold) continue;
        std::vector<std::uint32_t> items;
        for (std::uint32_t i = 0; i < n; ++i)
            if (mask & (1u << i)) items.push_back(i);
        out.emplace(std::move(items), count);
    }
    return out;
}

struct SimpleRule {
    std::vector<std::uint32_t> antecedent;
    std::vector<std::uint32_t> consequent;
    std::uint64_t joint = 0;
    double confidence = 0.0;

    bool operator<(const SimpleRule& o) const {
        if (antecedent != o.antecedent) return antecedent < o.antecedent;
        return consequent < o.consequent;
    }
};

// All confident rules derived from the enumerated frequent map.
inline std::vector<SimpleRule> enumerate_rules(
    const std::map<std::vector<std::uint32_t>, std::uint64_t>& frequent,
    double min_confidence) {
    std::vector<SimpleRule> out;
    for (const auto& [items, joint] : frequent) {
        const auto m = items.size();
        if (m < 2) continue;
        for (std::uint32_t bits = 1; bits + 1 < (1u << m); ++bits) {
            SimpleRule rule;
            for (std::size_t i = 0; i < m; ++i)
                ((bits >> i) & 1u ? rule.antecedent : rule.consequent)
                    .push_back(items[i]);
            const auto ante = frequent.find(rule.antecedent);
            if (ante == frequent.end()) continue; // cannot happen on closed maps
            rule.joint = joint;
            rule.confidence =
                static_cast<double>(joint) / static_cast<double>(ante->second);
            if (rule.confidence >= min_confidence) out.push_back(std::move(rule));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Per-item co-occurrence with any target, by direct triple scan.
inline std::vector<std::uint64_t> cooccurrence_scan(
    const BasketDataset& data, const std::vector<std::uint32_t>& targets) {
    std::vector<std::uint64_t> counts(data.catalog.size(), 0);
    for (const auto& b : data.baskets) {
        bool has_target = false;
        for (auto t : targets)
            if (contains(b.items, {t})) has_target = true;
        if (!has_target) continue;
        for (std::uint32_t j = 0; j < data.catalog.size(); ++j)
            if (contains(b.items, {j})) ++counts[j];
    }
    return counts;
}

struct SdrBest {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double sdr = 0.0;
};

// Exhaustive SDR scan over every feature and every midpoint of consecutive
// distinct sorted values, evaluated directly from the definition.
inline SdrBest sdr_scan(const InstanceTable& table) {
    const auto sd_of = [&](const std::vector<double>& ys) {
        if (ys.empty()) return 0.0;
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        double var = 0.0;
        for (double y : ys) var += (y - mean) * (y - mean);
        return std::sqrt(var / static_cast<double>(ys.size()));
    };

    std::vector<double> all_targets = table.targets;
    const double sd_all = sd_of(all_targets);
    const double n = static_cast<double>(table.size());

    SdrBest best;
    for (std::uint32_t f = 0; f < table.dimension(); ++f) {
        std::vector<double> values;
        for (const auto& row : table.features) values.push_back(row[f]);
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
            const double threshold = (distinct[i] + distinct[i + 1]) / 2.0;
            std::vector<double> left, right;
            for (std::size_t r = 0; r < table.size(); ++r)
                (values[r] <= threshold ? left : right).push_back(table.targets[r]);
            const double sdr = sd_all -
                               (static_cast<double>(left.size()) / n) * sd_of(left) -
                               (static_cast<double>(right.size()) / n) * sd_of(right);
            if (sdr > best.sdr) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.sdr = sdr;
            }
        }
    }
    return best;
}

// Accuracy percentage straight from min/max, written independently.
inline int accuracy_cell(std::uint64_t p, std::uint64_t r) {
    if (p == 0 && r == 0) return 100;
    const double lo = static_cast<double>(std::min(p, r));
    const double hi = static_cast<double>(std::max(p, r));
    return static_cast<int>(std::floor(100.0 * lo / hi + 0.5));
}

} // namespace oracle
