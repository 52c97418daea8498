#include "basketlab/ingest.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "basketlab/csv.hpp"
#include "basketlab/error.hpp"

namespace basketlab {

namespace {

constexpr std::int32_t kMaxDayRange = 100000; // sanity cap on [min,max] span

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Quantity cell: non-negative integer; empty counts as zero.
std::uint32_t parse_quantity(const std::string& raw, std::size_t line_no,
                             const std::string& column) {
    const std::string s = trim(raw);
    if (s.empty()) return 0;
    const auto fail = [&](const char* what) {
        return Error::data("line " + std::to_string(line_no) + ", column '" +
                           column + "': " + what + " '" + s + "'");
    };
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw fail("malformed quantity");
    std::uint64_t value = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw fail("malformed quantity");
        value = value * 10 + static_cast<std::uint64_t>(s[i] - '0');
        if (value > std::numeric_limits<std::uint32_t>::max())
            throw fail("quantity out of range");
    }
    if (negative && value > 0) throw fail("negative quantity");
    return static_cast<std::uint32_t>(value);
}

Day parse_row_date(const std::string& raw, std::size_t line_no) {
    try {
        return parse_iso_date(trim(raw));
    } catch (const Error& e) {
        throw Error::data("line " + std::to_string(line_no) + ": " + e.what());
    }
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name, const char* role) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == name) return i;
    throw Error::data(std::string(role) + " column '" + name +
                      "' not found in header");
}

ParseOutcome parse_wide(std::istream& in, const IngestSchema& schema) {
    ParseOutcome out;
    std::string line;
    if (!std::getline(in, line)) {
        out.warnings.push_back("input is empty; produced an empty table");
        return out;
    }
    const auto header = split_delimited(line, schema.delimiter);
    const std::size_t date_idx = find_column(header, schema.date_col, "date");
    std::vector<std::pair<std::size_t, std::uint32_t>> item_cols; // column -> item
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == date_idx) continue;
        const std::string code = trim(header[i]);
        if (code.empty())
            throw Error::data("header column " + std::to_string(i + 1) +
                              " has an empty item code");
        item_cols.emplace_back(i, out.table.catalog.add(code));
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_delimited(line, schema.delimiter);
        if (fields.size() != header.size())
            throw Error::data("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        TransactionRow row;
        row.date = parse_row_date(fields[date_idx], line_no);
        for (const auto& [col, item] : item_cols) {
            const std::uint32_t qty =
                parse_quantity(fields[col], line_no, trim(header[col]));
            if (qty > 0) row.quantities.emplace_back(item, qty);
        }
        out.table.rows.push_back(std::move(row));
    }
    if (out.table.rows.empty())
        out.warnings.push_back("input has a header but no records; produced an empty table");
    return out;
}

ParseOutcome parse_long(std::istream& in, const IngestSchema& schema) {
    ParseOutcome out;
    std::string line;
    if (!std::getline(in, line)) {
        out.warnings.push_back("input is empty; produced an empty table");
        return out;
    }
    const auto header = split_delimited(line, schema.delimiter);
    const std::size_t date_idx = find_column(header, schema.date_col, "date");
    const std::size_t receipt_idx = find_column(header, schema.receipt_col, "receipt");
    const std::size_t item_idx = find_column(header, schema.item_col, "item");
    const std::size_t qty_idx = find_column(header, schema.qty_col, "quantity");

    // receipt id + date -> row position, rows kept in first-appearance order
    std::unordered_map<std::string, std::size_t> groups;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_delimited(line, schema.delimiter);
        if (fields.size() != header.size())
            throw Error::data("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        const Day date = parse_row_date(fields[date_idx], line_no);
        const std::string code = trim(fields[item_idx]);
        if (code.empty())
            throw Error::data("line " + std::to_string(line_no) + ": empty item code");
        const std::uint32_t qty =
            parse_quantity(fields[qty_idx], line_no, trim(header[qty_idx]));
        const std::uint32_t item = out.table.catalog.intern(code);

        const std::string key =
            trim(fields[receipt_idx]) + '\x1f' + std::to_string(date.serial);
        auto [it, inserted] = groups.emplace(key, out.table.rows.size());
        if (inserted) out.table.rows.push_back(TransactionRow{date, {}});
        auto& quantities = out.table.rows[it->second].quantities;
        auto found = std::find_if(quantities.begin(), quantities.end(),
                                  [&](const auto& p) { return p.first == item; });
        if (found != quantities.end()) {
            found->second += qty;
        } else if (qty > 0) {
            quantities.emplace_back(item, qty);
        }
    }
    for (auto& row : out.table.rows)
        std::sort(row.quantities.begin(), row.quantities.end());
    if (out.table.rows.empty())
        out.warnings.push_back("input has a header but no records; produced an empty table");
    return out;
}

} // namespace

ParseOutcome parse_transactions(std::istream& source, const IngestSchema& schema) {
    if (!source) throw Error::data("cannot read input stream");
    return schema.format == IngestSchema::Format::Wide ? parse_wide(source, schema)
                                                       : parse_long(source, schema);
}

BasketDataset binarize(const TransactionTable& table) {
    BasketDataset out;
    out.catalog = table.catalog;
    out.baskets.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Basket b;
        b.date = row.date;
        b.items.reserve(row.quantities.size());
        for (const auto& [item, qty] : row.quantities)
            if (qty > 0) b.items.push_back(item);
        out.baskets.push_back(std::move(b));
    }
    return out;
}

DailySeries aggregate_daily(const TransactionTable& table) {
    if (table.rows.empty()) throw Error::data("no transactions to aggregate");
    Day lo = table.rows.front().date;
    Day hi = lo;
    for (const auto& row : table.rows) {
        lo = std::min(lo, row.date);
        hi = std::max(hi, row.date);
    }
    const std::int32_t span = hi - lo + 1;
    if (span > kMaxDayRange)
        throw Error::data("date range spans " + std::to_string(span) +
                          " days; refusing to zero-fill more than " +
                          std::to_string(kMaxDayRange));

    DailySeries series;
    series.catalog = table.catalog;
    series.start = lo;
    series.num_days = static_cast<std::uint32_t>(span);
    series.totals.assign(series.catalog.size(),
                         std::vector<std::uint64_t>(series.num_days, 0));
    for (const auto& row : table.rows) {
        const auto day = static_cast<std::size_t>(row.date - lo);
        for (const auto& [item, qty] : row.quantities)
            series.totals[item][day] += qty;
    }
    return series;
}

std::vector<std::uint32_t> top_k_items(const DailySeries& series, std::uint32_t k) {
    if (k < 1) throw Error::usage("k must be at least 1");
    std::vector<std::uint32_t> order(series.catalog.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<std::uint64_t> sums(series.catalog.size(), 0);
    for (std::uint32_t i = 0; i < series.catalog.size(); ++i)
        sums[i] = std::accumulate(series.totals[i].begin(), series.totals[i].end(),
                                  std::uint64_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return sums[a] > sums[b]; });
    order.resize(std::min<std::size_t>(k, order.size()));
    return order;
}

} // namespace basketlab
