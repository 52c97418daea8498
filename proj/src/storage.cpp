#include "basketlab/storage.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "basketlab/csv.hpp"
#include "basketlab/error.hpp"

namespace basketlab {

namespace {

using nlohmann::json;

constexpr const char* kDatasetHeader = "basketlab-dataset v1";
constexpr const char* kSeriesHeader = "basketlab-series v1";
constexpr const char* kModelHeader = "basketlab-model-tree v1";

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::data("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::data("cannot open '" + path + "' for reading");
    return in;
}

std::string next_line(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw Error::data("unexpected end of file in '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

void expect_header(std::istream& in, const std::string& path, const char* header) {
    const std::string line = next_line(in, path);
    if (line != header)
        throw Error::data("'" + path + "' is not a " + std::string(header) +
                          " file (got '" + line + "')");
}

std::uint64_t parse_count(const std::string& line, const std::string& keyword,
                          const std::string& path) {
    std::istringstream ss(line);
    std::string word;
    std::uint64_t value = 0;
    if (!(ss >> word >> value) || word != keyword)
        throw Error::data("'" + path + "': expected '" + keyword +
                          " <count>', got '" + line + "'");
    return value;
}

ItemCatalog read_catalog_block(std::istream& in, const std::string& path) {
    const auto count = parse_count(next_line(in, path), "items", path);
    ItemCatalog catalog;
    for (std::uint64_t i = 0; i < count; ++i) catalog.add(next_line(in, path));
    return catalog;
}

void write_catalog_block(std::ostream& out, const ItemCatalog& catalog) {
    out << "items " << catalog.size() << '\n';
    for (const auto& code : catalog.codes()) out << code << '\n';
}

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json rule_to_json(const RuleRecord& r) {
    return json{{"antecedent", r.antecedent},
                {"consequent", r.consequent},
                {"support_count", r.support_count},
                {"relative_support", r.relative_support},
                {"confidence", r.confidence}};
}

RuleRecord rule_from_json(const json& j) {
    RuleRecord r;
    r.antecedent = j.at("antecedent").get<std::vector<std::string>>();
    r.consequent = j.at("consequent").get<std::vector<std::string>>();
    r.support_count = j.at("support_count").get<std::uint64_t>();
    r.relative_support = j.at("relative_support").get<double>();
    r.confidence = j.at("confidence").get<double>();
    return r;
}

void dump_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error::data("failed writing '" + path + "'");
}

json load_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error::data("'" + path + "': " + e.what());
    }
}

std::vector<std::string> codes_of(const Itemset& set, const ItemCatalog& catalog) {
    std::vector<std::string> out;
    out.reserve(set.items.size());
    for (auto idx : set.items) out.push_back(catalog.code(idx));
    return out;
}

} // namespace

void write_dataset(const std::string& path, const BasketDataset& dataset) {
    auto out = open_out(path);
    out << kDatasetHeader << '\n';
    write_catalog_block(out, dataset.catalog);
    out << "baskets " << dataset.baskets.size() << '\n';
    for (const auto& b : dataset.baskets) {
        out << format_iso_date(b.date);
        for (auto item : b.items) out << ' ' << item;
        out << '\n';
    }
    if (!out) throw Error::data("failed writing '" + path + "'");
}

BasketDataset read_dataset(const std::string& path) {
    auto in = open_in(path);
    expect_header(in, path, kDatasetHeader);
    BasketDataset dataset;
    dataset.catalog = read_catalog_block(in, path);
    const auto count = parse_count(next_line(in, path), "baskets", path);
    dataset.baskets.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::string line = next_line(in, path);
        std::istringstream ss(line);
        std::string date_text;
        ss >> date_text;
        Basket b;
        b.date = parse_iso_date(date_text);
        std::uint32_t item = 0;
        std::uint32_t prev = 0;
        bool first = true;
        while (ss >> item) {
            if (item >= dataset.catalog.size())
                throw Error::data("'" + path + "': item index " +
                                  std::to_string(item) + " out of range");
            if (!first && item <= prev)
                throw Error::data("'" + path + "': basket items not strictly ascending");
            b.items.push_back(item);
            prev = item;
            first = false;
        }
        dataset.baskets.push_back(std::move(b));
    }
    return dataset;
}

void write_series(const std::string& path, const DailySeries& series) {
    auto out = open_out(path);
    out << kSeriesHeader << '\n';
    write_catalog_block(out, series.catalog);
    out << "days " << series.num_days << " start " << format_iso_date(series.start)
        << '\n';
    out << "totals\n";
    for (const auto& row : series.totals) {
        for (std::size_t d = 0; d < row.size(); ++d) {
            if (d > 0) out << ' ';
            out << row[d];
        }
        out << '\n';
    }
    if (!out) throw Error::data("failed writing '" + path + "'");
}

DailySeries read_series(const std::string& path) {
    auto in = open_in(path);
    expect_header(in, path, kSeriesHeader);
    DailySeries series;
    series.catalog = read_catalog_block(in, path);
    {
        const std::string line = next_line(in, path);
        std::istringstream ss(line);
        std::string word, start_word, date_text;
        std::uint32_t days = 0;
        if (!(ss >> word >> days >> start_word >> date_text) || word != "days" ||
            start_word != "start")
            throw Error::data("'" + path + "': malformed days line '" + line + "'");
        series.num_days = days;
        series.start = parse_iso_date(date_text);
    }
    if (next_line(in, path) != "totals")
        throw Error::data("'" + path + "': expected 'totals' block");
    series.totals.resize(series.catalog.size());
    for (std::uint32_t i = 0; i < series.catalog.size(); ++i) {
        const std::string line = next_line(in, path);
        std::istringstream ss(line);
        std::uint64_t v = 0;
        auto& row = series.totals[i];
        row.reserve(series.num_days);
        while (ss >> v) row.push_back(v);
        if (row.size() != series.num_days)
            throw Error::data("'" + path + "': totals row for '" +
                              series.catalog.code(i) + "' has " +
                              std::to_string(row.size()) + " values, expected " +
                              std::to_string(series.num_days));
    }
    return series;
}

std::vector<RuleRecord> to_records(const std::vector<AssociationRule>& rules,
                                   const ItemCatalog& catalog) {
    std::vector<RuleRecord> out;
    out.reserve(rules.size());
    for (const auto& r : rules) {
        RuleRecord rec;
        rec.antecedent = codes_of(r.antecedent, catalog);
        rec.consequent = codes_of(r.consequent, catalog);
        rec.support_count = r.joint_support_count;
        rec.relative_support = r.relative_support;
        rec.confidence = r.confidence;
        out.push_back(std::move(rec));
    }
    return out;
}

void write_rules_json(const std::string& path, const std::vector<RuleRecord>& rules) {
    json arr = json::array();
    for (const auto& r : rules) arr.push_back(rule_to_json(r));
    dump_json(path, arr);
}

std::vector<RuleRecord> read_rules_json(const std::string& path) {
    const json arr = load_json(path);
    if (!arr.is_array()) throw Error::data("'" + path + "': expected a JSON array");
    std::vector<RuleRecord> out;
    out.reserve(arr.size());
    for (const auto& j : arr) out.push_back(rule_from_json(j));
    return out;
}

void write_validation_json(const std::string& path, const ValidationResult& result,
                           const ItemCatalog& rule_catalog, double min_confidence) {
    const auto check_to_json = [&](const RuleCheck& c) {
        json j{{"antecedent", codes_of(c.rule.antecedent, rule_catalog)},
               {"consequent", codes_of(c.rule.consequent, rule_catalog)},
               {"support_count", c.rule.joint_support_count},
               {"relative_support", c.rule.relative_support},
               {"confidence", c.rule.confidence},
               {"holdout_antecedent_support", c.holdout_antecedent_support},
               {"holdout_support_count", c.holdout_joint_support},
               {"holdout_confidence", c.holdout_confidence}};
        if (!c.reason.empty()) j["reason"] = c.reason;
        return j;
    };
    json j{{"min_confidence", min_confidence},
           {"holdout_baskets", result.holdout_baskets},
           {"validated", json::array()},
           {"eliminated", json::array()}};
    for (const auto& c : result.validated) j["validated"].push_back(check_to_json(c));
    for (const auto& c : result.eliminated) j["eliminated"].push_back(check_to_json(c));
    dump_json(path, j);
}

void write_forecast_json(const std::string& path,
                         const std::vector<ForecastRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back(json{{"item", r.item},
                           {"lag_window", r.lag_window},
                           {"horizon", r.horizon},
                           {"smoothing_k", r.smoothing_k},
                           {"predictions", r.predictions}});
    }
    dump_json(path, arr);
}

std::vector<ForecastRecord> read_forecast_json(const std::string& path) {
    const json arr = load_json(path);
    if (!arr.is_array()) throw Error::data("'" + path + "': expected a JSON array");
    std::vector<ForecastRecord> out;
    for (const auto& j : arr) {
        ForecastRecord r;
        r.item = j.at("item").get<std::string>();
        r.lag_window = j.at("lag_window").get<std::uint32_t>();
        r.horizon = j.at("horizon").get<std::uint32_t>();
        r.smoothing_k = j.at("smoothing_k").get<double>();
        r.predictions = j.at("predictions").get<std::vector<std::uint64_t>>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_clusters_json(const std::string& path, const ClusterResult& result,
                         const std::vector<std::string>& item_codes,
                         std::uint64_t seed) {
    json assignments = json::object();
    for (std::size_t i = 0; i < item_codes.size(); ++i)
        assignments[item_codes[i]] = result.assignments[i];
    json j{{"k", result.k},
           {"seed", seed},
           {"iterations", result.iterations},
           {"inertia", result.inertia},
           {"assignments", assignments},
           {"centroids", result.centroids}};
    dump_json(path, j);
}

void write_report_json(const std::string& path, const AccuracyReport& report,
                       const std::string& note) {
    json j{{"products", report.products},
           {"predicted", report.predicted},
           {"actual", report.actual},
           {"accuracy_pct", report.accuracy_pct},
           {"average",
            json{{"predicted", report.avg_predicted},
                 {"actual", report.avg_actual},
                 {"accuracy_pct", report.avg_accuracy_pct}}},
           {"threshold_pct", report.threshold_pct},
           {"validity_horizon", report.validity_horizon}};
    if (!note.empty()) j["note"] = note;
    dump_json(path, j);
}

void write_stats_json(const std::string& path, const ReductionStats& stats) {
    dump_json(path, json{{"rows_before", stats.rows_before},
                         {"rows_after", stats.rows_after},
                         {"attrs_before", stats.attrs_before},
                         {"attrs_after", stats.attrs_after}});
}

namespace {

void write_model(std::ostream& out, const LinearModel& model) {
    out << " model " << full_precision(model.intercept);
    for (const auto& [f, c] : model.terms)
        out << ' ' << f << ':' << full_precision(c);
    out << '\n';
}

void write_node(std::ostream& out, const TreeNode& node, std::uint32_t& next_id,
                std::uint32_t id) {
    if (node.is_leaf()) {
        out << "leaf " << id << " n " << node.n;
        write_model(out, node.model);
        return;
    }
    const std::uint32_t left_id = ++next_id;
    const std::uint32_t right_id = ++next_id;
    out << "node " << id << " split " << node.split_feature << " le "
        << full_precision(node.threshold) << " left " << left_id << " right "
        << right_id << " n " << node.n;
    write_model(out, node.model);
    write_node(out, *node.left, next_id, left_id);
    write_node(out, *node.right, next_id, right_id);
}

} // namespace

void write_model_tree(const std::string& path, const ModelTree& tree,
                      const std::vector<std::string>& feature_names) {
    auto out = open_out(path);
    out << kModelHeader << '\n';
    out << "features " << feature_names.size();
    for (const auto& name : feature_names) out << ' ' << name;
    out << '\n';
    out << "smoothing_k " << full_precision(tree.params().smoothing_k) << '\n';
    out << "nodes " << tree.node_count() << '\n';
    std::uint32_t next_id = 0;
    write_node(out, tree.root(), next_id, 0);
    if (!out) throw Error::data("failed writing '" + path + "'");
}

ModelTree read_model_tree(const std::string& path) {
    auto in = open_in(path);
    expect_header(in, path, kModelHeader);
    std::size_t feature_count = 0;
    {
        std::istringstream ss(next_line(in, path));
        std::string word;
        if (!(ss >> word >> feature_count) || word != "features")
            throw Error::data("'" + path + "': malformed features line");
    }
    TreeParams params;
    {
        std::istringstream ss(next_line(in, path));
        std::string word;
        if (!(ss >> word >> params.smoothing_k) || word != "smoothing_k")
            throw Error::data("'" + path + "': malformed smoothing_k line");
    }
    const auto node_count = parse_count(next_line(in, path), "nodes", path);

    struct RawNode {
        bool leaf = false;
        std::uint32_t split_feature = 0;
        double threshold = 0.0;
        std::uint32_t left = 0, right = 0;
        std::uint64_t n = 0;
        LinearModel model;
    };
    std::vector<RawNode> nodes(node_count);
    for (std::uint64_t i = 0; i < node_count; ++i) {
        std::istringstream ss(next_line(in, path));
        std::string kind, word;
        std::uint32_t id = 0;
        ss >> kind >> id;
        if (id >= node_count)
            throw Error::data("'" + path + "': node id out of range");
        RawNode& node = nodes[id];
        if (kind == "leaf") {
            node.leaf = true;
            ss >> word >> node.n; // "n"
        } else if (kind == "node") {
            std::string le;
            ss >> word >> node.split_feature >> le >> node.threshold; // "split"
            ss >> word >> node.left;                                   // "left"
            ss >> word >> node.right;                                  // "right"
            ss >> word >> node.n;                                      // "n"
        } else {
            throw Error::data("'" + path + "': unknown node kind '" + kind + "'");
        }
        ss >> word; // "model"
        if (word != "model" || !(ss >> node.model.intercept))
            throw Error::data("'" + path + "': malformed model on node " +
                              std::to_string(id));
        std::string term;
        while (ss >> term) {
            const auto colon = term.find(':');
            if (colon == std::string::npos)
                throw Error::data("'" + path + "': malformed model term '" + term + "'");
            node.model.terms.emplace_back(
                static_cast<std::uint32_t>(std::stoul(term.substr(0, colon))),
                std::stod(term.substr(colon + 1)));
        }
    }

    // Rebuild ownership from ids.
    std::vector<std::unique_ptr<TreeNode>> built(node_count);
    for (std::size_t i = node_count; i-- > 0;) {
        auto node = std::make_unique<TreeNode>();
        const RawNode& raw = nodes[i];
        node->n = raw.n;
        node->model = raw.model;
        if (!raw.leaf) {
            node->split_feature = raw.split_feature;
            node->threshold = raw.threshold;
            if (raw.left >= node_count || raw.right >= node_count ||
                !built[raw.left] || !built[raw.right])
                throw Error::data("'" + path + "': node ids are not in preorder");
            node->left = std::move(built[raw.left]);
            node->right = std::move(built[raw.right]);
        }
        built[i] = std::move(node);
    }
    if (!built[0]) throw Error::data("'" + path + "': missing root node");
    return ModelTree(std::move(built[0]), params, feature_count);
}

void write_wide_csv(std::ostream& out, const TransactionTable& table) {
    out << "date";
    for (const auto& code : table.catalog.codes())
        out << ',' << csv_escape(code, ',');
    out << '\n';
    for (const auto& row : table.rows) {
        out << format_iso_date(row.date);
        std::size_t cursor = 0;
        for (std::uint32_t item = 0; item < table.catalog.size(); ++item) {
            std::uint32_t qty = 0;
            if (cursor < row.quantities.size() &&
                row.quantities[cursor].first == item) {
                qty = row.quantities[cursor].second;
                ++cursor;
            }
            out << ',' << qty;
        }
        out << '\n';
    }
}

ActualsGrid read_actuals_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw Error::data("'" + path + "' is empty; expected a header row");
    const auto header = split_delimited(line, ',');
    if (header.empty() || header[0] != "product")
        throw Error::data("'" + path + "': first header column must be 'product'");
    const std::size_t days = header.size() - 1;
    if (days == 0) throw Error::data("'" + path + "': no day columns");

    ActualsGrid grid;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_delimited(line, ',');
        if (fields.size() != header.size())
            throw Error::data("'" + path + "' line " + std::to_string(line_no) +
                              ": expected " + std::to_string(header.size()) +
                              " fields");
        grid.products.push_back(fields[0]);
        std::vector<std::uint64_t> row;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                const long long v = std::stoll(fields[i]);
                if (v < 0) throw std::invalid_argument("negative");
                row.push_back(static_cast<std::uint64_t>(v));
            } catch (const std::exception&) {
                throw Error::data("'" + path + "' line " + std::to_string(line_no) +
                                  ": bad count '" + fields[i] + "'");
            }
        }
        grid.counts.push_back(std::move(row));
    }
    if (grid.products.empty())
        throw Error::data("'" + path + "': no product rows");
    return grid;
}

void write_actuals_csv(const std::string& path, const ActualsGrid& grid) {
    auto out = open_out(path);
    out << "product";
    const std::size_t days = grid.counts.empty() ? 0 : grid.counts.front().size();
    for (std::size_t d = 1; d <= days; ++d) out << ",r" << d;
    out << '\n';
    for (std::size_t i = 0; i < grid.products.size(); ++i) {
        out << csv_escape(grid.products[i], ',');
        for (auto v : grid.counts[i]) out << ',' << v;
        out << '\n';
    }
    if (!out) throw Error::data("failed writing '" + path + "'");
}

} // namespace basketlab
