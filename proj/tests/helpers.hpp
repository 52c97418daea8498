#pragma once

// Shared construction helpers for the test suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <unistd.h>

#include "basketlab/dataset.hpp"
#include "basketlab/rng.hpp"

namespace test_helpers {

using namespace basketlab;

inline ItemCatalog letters_catalog(std::uint32_t n) {
    ItemCatalog catalog;
    for (std::uint32_t i = 0; i < n; ++i)
        catalog.add(std::string(1, static_cast<char>('a' + i)));
    return catalog;
}

// Baskets from item-index lists; dates default to one fixed day.
inline BasketDataset make_baskets(std::uint32_t item_count,
                                  std::initializer_list<std::vector<std::uint32_t>> rows,
                                  Day date = make_day(2014, 1, 5)) {
    BasketDataset data;
    data.catalog = letters_catalog(item_count);
    for (const auto& items : rows) data.baskets.push_back(Basket{date, items});
    return data;
}

// Random dataset for property suites: up to `max_items` items, `n_baskets`
// baskets, each item present independently with the given density.
inline BasketDataset random_baskets(Rng& rng, std::uint32_t max_items,
                                    std::uint64_t n_baskets) {
    const auto items = 2 + static_cast<std::uint32_t>(rng.below(max_items - 1));
    const double density = 0.1 + 0.5 * rng.uniform01();
    BasketDataset data;
    data.catalog = letters_catalog(items);
    for (std::uint64_t b = 0; b < n_baskets; ++b) {
        Basket basket;
        basket.date = make_day(2014, 1, 1) + static_cast<std::int32_t>(rng.below(28));
        for (std::uint32_t i = 0; i < items; ++i)
            if (rng.bernoulli(density)) basket.items.push_back(i);
        data.baskets.push_back(std::move(basket));
    }
    return data;
}

// Converts baskets back into a 0/1 quantity table (for idempotence checks).
inline TransactionTable table_from_baskets(const BasketDataset& data) {
    TransactionTable table;
    table.catalog = data.catalog;
    for (const auto& b : data.baskets) {
        TransactionRow row;
        row.date = b.date;
        for (auto item : b.items) row.quantities.emplace_back(item, 1);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("basketlab-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace test_helpers
