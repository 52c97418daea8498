#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "basketlab/dataset.hpp"

namespace basketlab {

// Input schema for delimited transaction files.
//
// Wide: a header row names the date column plus one quantity column per item;
// the catalog is built from the header in column order.
// Long: each record carries (receipt id, date, item code, quantity); records
// are grouped into one transaction per (receipt id, date) and the catalog is
// built from item codes in first-appearance order.
struct IngestSchema {
    enum class Format { Wide, Long };

    Format format = Format::Wide;
    std::string date_col = "date";
    std::string receipt_col = "receipt";
    std::string item_col = "item";
    std::string qty_col = "qty";
    char delimiter = ',';
};

struct ParseOutcome {
    TransactionTable table;
    std::vector<std::string> warnings;
};

// Single-pass parse of a delimited transaction stream. Row-level problems
// (bad date, negative quantity, wrong field count) throw a data error naming
// the line; an input with no records yields an empty table plus a warning.
ParseOutcome parse_transactions(std::istream& source, const IngestSchema& schema);

// Presence/absence view: basket i contains item j iff quantities[i][j] > 0.
// Every row survives, including all-zero ones (they become empty baskets).
BasketDataset binarize(const TransactionTable& table);

// Per-item daily totals over [min date, max date]; days with no transactions
// are zero-filled so downstream lag windows stay uniform.
DailySeries aggregate_daily(const TransactionTable& table);

// Items ranked by total sales across all days, descending; ties break by
// catalog order. Returns min(k, #items) indices.
std::vector<std::uint32_t> top_k_items(const DailySeries& series, std::uint32_t k);

} // namespace basketlab
