#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "basketlab/catalog.hpp"
#include "basketlab/date.hpp"

namespace basketlab {

// One dated transaction. Quantities are stored sparsely: (item index, count)
// pairs sorted by item index, counts strictly positive. Absent items are zero.
struct TransactionRow {
    Day date;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> quantities;

    std::uint32_t quantity_of(std::uint32_t item) const {
        for (const auto& [idx, qty] : quantities)
            if (idx == item) return qty;
        return 0;
    }
};

struct TransactionTable {
    ItemCatalog catalog;
    std::vector<TransactionRow> rows;
};

// Binarized transaction: the set of items purchased, indices strictly ascending.
struct Basket {
    Day date;
    std::vector<std::uint32_t> items;

    friend bool operator==(const Basket&, const Basket&) = default;
};

struct BasketDataset {
    ItemCatalog catalog;
    std::vector<Basket> baskets;

    std::uint64_t size() const { return baskets.size(); }
};

// Per-item daily sales totals over a contiguous day range (gaps zero-filled).
struct DailySeries {
    ItemCatalog catalog;
    Day start;
    std::uint32_t num_days = 0;
    std::vector<std::vector<std::uint64_t>> totals; // [item][day]

    Day day(std::uint32_t i) const { return start + static_cast<std::int32_t>(i); }
};

} // namespace basketlab
