// basketlab command-line front end: market-basket mining, rule validation,
// sales forecasting and clustering over delimited transaction data.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "basketlab/error.hpp"
#include "basketlab/forecast.hpp"
#include "basketlab/ingest.hpp"
#include "basketlab/kmeans.hpp"
#include "basketlab/pipeline.hpp"
#include "basketlab/reduction.hpp"
#include "basketlab/rules.hpp"
#include "basketlab/storage.hpp"
#include "basketlab/synthetic.hpp"

namespace {

using namespace basketlab;

constexpr const char* kVersion = "basketlab 1.0.0";

IngestSchema schema_from_flags(const std::string& format, const std::string& date_col,
                               const std::string& receipt_col,
                               const std::string& item_col, const std::string& qty_col,
                               const std::string& delim) {
    IngestSchema schema;
    if (format == "wide") schema.format = IngestSchema::Format::Wide;
    else if (format == "long") schema.format = IngestSchema::Format::Long;
    else throw Error::usage("--format must be wide or long");
    schema.date_col = date_col;
    schema.receipt_col = receipt_col;
    schema.item_col = item_col;
    schema.qty_col = qty_col;
    if (delim.size() != 1) throw Error::usage("--delim must be a single character");
    schema.delimiter = delim[0];
    return schema;
}

PlantedRule parse_plant(const std::string& text, const ItemCatalog& catalog) {
    const auto arrow = text.find("=>");
    const auto colon = text.rfind(':');
    if (arrow == std::string::npos || colon == std::string::npos || colon < arrow)
        throw Error::usage("--plant expects 'a,b=>c,d:PROB', got '" + text + "'");
    const auto resolve = [&](const std::string& list) {
        std::vector<std::uint32_t> items;
        std::string code;
        std::istringstream ss(list);
        while (std::getline(ss, code, ',')) {
            const auto idx = catalog.find(code);
            if (!idx) throw Error::usage("--plant names unknown item '" + code + "'");
            items.push_back(*idx);
        }
        if (items.empty()) throw Error::usage("--plant has an empty item list");
        return items;
    };
    PlantedRule rule;
    rule.antecedent = resolve(text.substr(0, arrow));
    rule.consequent = resolve(text.substr(arrow + 2, colon - arrow - 2));
    try {
        rule.probability = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error::usage("--plant has a malformed probability in '" + text + "'");
    }
    return rule;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"market-basket mining toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // --- ingest ---------------------------------------------------------
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "parse a transaction file into a basket dataset");
    std::string in_format = "wide", in_date = "date", in_receipt = "receipt",
                in_item = "item", in_qty = "qty", in_delim = ",";
    std::string ingest_input, ingest_output = "dataset.bl", ingest_series;
    ingest_cmd->add_option("--format", in_format, "wide or long")
        ->check(CLI::IsMember({"wide", "long"}));
    ingest_cmd->add_option("--date-col", in_date, "date column name");
    ingest_cmd->add_option("--receipt-col", in_receipt, "receipt id column (long)");
    ingest_cmd->add_option("--item-col", in_item, "item code column (long)");
    ingest_cmd->add_option("--qty-col", in_qty, "quantity column (long)");
    ingest_cmd->add_option("--delim", in_delim, "field delimiter (default ,)");
    ingest_cmd->add_option("input", ingest_input, "delimited transaction file")
        ->required();
    ingest_cmd->add_option("-o,--output", ingest_output, "basket dataset file");
    ingest_cmd->add_option("--series", ingest_series,
                           "also write the aggregated daily series here");
    ingest_cmd->callback([&] {
        const auto schema = schema_from_flags(in_format, in_date, in_receipt,
                                              in_item, in_qty, in_delim);
        std::ifstream in(ingest_input, std::ios::binary);
        if (!in) throw Error::data("cannot open input file '" + ingest_input + "'");
        auto outcome = parse_transactions(in, schema);
        for (const auto& w : outcome.warnings)
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        write_dataset(ingest_output, binarize(outcome.table));
        if (!ingest_series.empty())
            write_series(ingest_series, aggregate_daily(outcome.table));
    });

    // --- reduce ---------------------------------------------------------
    auto* reduce_cmd = app.add_subcommand(
        "reduce", "drop baskets and attributes unrelated to the target items");
    std::vector<std::string> reduce_targets;
    std::string reduce_policy = "cooccur";
    std::uint64_t reduce_min_cooccur = 1;
    std::string reduce_input, reduce_output = "reduced.bl", reduce_stats;
    reduce_cmd->add_option("--targets", reduce_targets, "target item codes")
        ->required()
        ->delimiter(',')
        ->allow_extra_args(false);
    reduce_cmd->add_option("--policy", reduce_policy, "targets-only or cooccur")
        ->check(CLI::IsMember({"targets-only", "cooccur"}));
    reduce_cmd->add_option("--min-cooccur", reduce_min_cooccur,
                           "co-occurrence count needed to keep an attribute");
    reduce_cmd->add_option("input", reduce_input, "basket dataset file")->required();
    reduce_cmd->add_option("-o,--output", reduce_output, "reduced dataset file");
    reduce_cmd->add_option("--stats", reduce_stats, "write reduction stats JSON here");
    reduce_cmd->callback([&] {
        const auto dataset = read_dataset(reduce_input);
        const auto policy = reduce_policy == "targets-only"
                                ? AttributePolicy::TargetsOnly
                                : AttributePolicy::TargetsPlusCooccurring;
        const auto spec = spec_from_codes(dataset.catalog, reduce_targets, policy,
                                          reduce_min_cooccur);
        const auto [reduced, stats] = reduce(dataset, spec);
        write_dataset(reduce_output, reduced);
        if (!reduce_stats.empty()) write_stats_json(reduce_stats, stats);
        std::printf("rows %llu -> %llu, attributes %llu -> %llu\n",
                    static_cast<unsigned long long>(stats.rows_before),
                    static_cast<unsigned long long>(stats.rows_after),
                    static_cast<unsigned long long>(stats.attrs_before),
                    static_cast<unsigned long long>(stats.attrs_after));
    });

    // --- mine -----------------------------------------------------------
    auto* mine_cmd = app.add_subcommand("mine", "mine association rules");
    double mine_min_conf = 0.70, mine_min_support = 0.01;
    std::optional<std::uint64_t> mine_abs_support;
    std::uint32_t mine_max_size = 5;
    std::string mine_input, mine_output = "rules.json";
    mine_cmd->add_option("--min-conf", mine_min_conf, "confidence gate (default 0.70)");
    auto* rel_opt =
        mine_cmd->add_option("--min-support", mine_min_support,
                             "relative support floor in (0,1] (default 0.01)");
    mine_cmd->add_option("--absolute-support", mine_abs_support,
                         "absolute support floor in baskets (overrides --min-support)")
        ->excludes(rel_opt);
    mine_cmd->add_option("--max-size", mine_max_size, "largest itemset size (default 5)");
    mine_cmd->add_option("input", mine_input, "basket dataset file")->required();
    mine_cmd->add_option("-o,--output", mine_output, "rules JSON file");
    mine_cmd->callback([&] {
        const auto dataset = read_dataset(mine_input);
        MiningParams params;
        params.min_confidence = mine_min_conf;
        params.max_itemset_size = mine_max_size;
        if (mine_abs_support) params.min_support = *mine_abs_support;
        else params.min_support = mine_min_support;
        const auto frequent = frequent_itemsets(dataset, params);
        const auto rules = generate_rules(frequent, params);
        write_rules_json(mine_output, to_records(rules, dataset.catalog));
        std::printf("%zu rules written to %s\n", rules.size(), mine_output.c_str());
    });

    // --- validate -------------------------------------------------------
    auto* validate_cmd = app.add_subcommand(
        "validate", "re-test mined rules against a holdout dataset");
    std::string validate_holdout, validate_rules_path, validate_output = "validated.json";
    double validate_min_conf = 0.70;
    validate_cmd->add_option("--holdout", validate_holdout, "holdout basket dataset")
        ->required();
    validate_cmd->add_option("--min-conf", validate_min_conf,
                             "confidence gate (default 0.70)");
    validate_cmd->add_option("rules", validate_rules_path, "rules JSON file")
        ->required();
    validate_cmd->add_option("-o,--output", validate_output, "validation JSON file");
    validate_cmd->callback([&] {
        const auto records = read_rules_json(validate_rules_path);
        const auto holdout = read_dataset(validate_holdout);

        // Rebuild index-based rules over a catalog spanning the rule codes.
        ItemCatalog catalog;
        for (const auto& r : records) {
            for (const auto& c : r.antecedent) catalog.intern(c);
            for (const auto& c : r.consequent) catalog.intern(c);
        }
        std::vector<AssociationRule> rules;
        rules.reserve(records.size());
        for (const auto& r : records) {
            AssociationRule rule;
            for (const auto& c : r.antecedent)
                rule.antecedent.items.push_back(*catalog.find(c));
            for (const auto& c : r.consequent)
                rule.consequent.items.push_back(*catalog.find(c));
            std::sort(rule.antecedent.items.begin(), rule.antecedent.items.end());
            std::sort(rule.consequent.items.begin(), rule.consequent.items.end());
            rule.joint_support_count = r.support_count;
            rule.relative_support = r.relative_support;
            rule.confidence = r.confidence;
            rules.push_back(std::move(rule));
        }
        const auto result = validate_rules(rules, catalog, holdout, validate_min_conf);
        write_validation_json(validate_output, result, catalog, validate_min_conf);
        std::printf("%zu validated, %zu eliminated\n", result.validated.size(),
                    result.eliminated.size());
    });

    // --- forecast -------------------------------------------------------
    auto* forecast_cmd = app.add_subcommand(
        "forecast", "train model trees and predict the next days per item");
    std::vector<std::string> forecast_items;
    std::uint32_t forecast_top_k = 0, forecast_lags = 7, forecast_horizon_n = 5;
    double forecast_smoothing_k = 15.0, forecast_sd_stop = 0.05;
    int forecast_min_leaf = 4;
    bool forecast_no_smoothing = false;
    std::string forecast_input, forecast_output = "forecast.json", forecast_models_dir;
    forecast_cmd->add_option("--item", forecast_items, "item code (repeatable)")
        ->allow_extra_args(false);
    forecast_cmd->add_option("--top-k", forecast_top_k,
                             "forecast the k best-selling items instead");
    forecast_cmd->add_option("--lags", forecast_lags, "lag window (default 7)");
    forecast_cmd->add_option("--horizon", forecast_horizon_n,
                             "days to predict (default 5)");
    forecast_cmd->add_option("--smoothing-k", forecast_smoothing_k,
                             "smoothing constant (default 15)");
    forecast_cmd->add_flag("--no-smoothing", forecast_no_smoothing,
                           "emit raw leaf predictions");
    forecast_cmd->add_option("--min-leaf", forecast_min_leaf,
                             "minimum instances to split (default 4)");
    forecast_cmd->add_option("--sd-stop", forecast_sd_stop,
                             "sd stop fraction (default 0.05)");
    forecast_cmd->add_option("input", forecast_input, "daily series file")->required();
    forecast_cmd->add_option("-o,--output", forecast_output, "forecast JSON file");
    forecast_cmd->add_option("--models-dir", forecast_models_dir,
                             "export each fitted model tree into this directory");
    forecast_cmd->callback([&] {
        const auto series = read_series(forecast_input);
        std::vector<std::uint32_t> items;
        if (forecast_top_k > 0) {
            if (!forecast_items.empty())
                throw Error::usage("use either --item or --top-k, not both");
            items = top_k_items(series, forecast_top_k);
        } else {
            if (forecast_items.empty())
                throw Error::usage("name at least one --item or use --top-k");
            for (const auto& code : forecast_items) {
                const auto idx = series.catalog.find(code);
                if (!idx) throw Error::data("item '" + code + "' not in series");
                items.push_back(*idx);
            }
        }
        ForecastParams params;
        params.lag_window = forecast_lags;
        params.horizon = forecast_horizon_n;
        params.smoothing = !forecast_no_smoothing;
        params.tree.smoothing_k = forecast_smoothing_k;
        params.tree.min_leaf = forecast_min_leaf;
        params.tree.sd_stop_fraction = forecast_sd_stop;

        std::vector<ForecastRecord> records;
        for (auto item : items) {
            const auto instances = build_instances(series, item, params.lag_window);
            auto tree = ModelTree::grow(instances, params.tree);
            tree.prune(instances);
            ForecastRecord record;
            record.item = series.catalog.code(item);
            record.lag_window = params.lag_window;
            record.horizon = params.horizon;
            record.smoothing_k = params.tree.smoothing_k;
            record.predictions = forecast_horizon(tree, series, item, params);
            if (!forecast_models_dir.empty()) {
                std::filesystem::create_directories(forecast_models_dir);
                write_model_tree(forecast_models_dir + "/" + record.item + ".m5t",
                                 tree, instances.feature_names);
            }
            records.push_back(std::move(record));
        }
        write_forecast_json(forecast_output, records);
    });

    // --- cluster --------------------------------------------------------
    auto* cluster_cmd = app.add_subcommand(
        "cluster", "k-means over per-item daily sales vectors");
    std::uint32_t cluster_k = 4, cluster_max_iter = 300;
    std::uint64_t cluster_seed = 0;
    double cluster_tol = 1e-6;
    bool cluster_normalize = false;
    std::string cluster_input, cluster_output = "clusters.json";
    cluster_cmd->add_option("-k,--clusters", cluster_k, "cluster count (default 4)");
    cluster_cmd->add_option("--seed", cluster_seed, "init seed (default 0)");
    cluster_cmd->add_option("--max-iter", cluster_max_iter, "iteration cap");
    cluster_cmd->add_option("--tol", cluster_tol, "centroid shift tolerance");
    cluster_cmd->add_flag("--normalize", cluster_normalize,
                          "min-max scale each item vector first");
    cluster_cmd->add_option("input", cluster_input, "daily series file")->required();
    cluster_cmd->add_option("-o,--output", cluster_output, "clusters JSON file");
    cluster_cmd->callback([&] {
        const auto series = read_series(cluster_input);
        std::vector<std::vector<double>> vectors;
        vectors.reserve(series.totals.size());
        for (const auto& row : series.totals)
            vectors.emplace_back(row.begin(), row.end());
        if (cluster_normalize) vectors = minmax_normalize(vectors);
        KMeansParams params;
        params.k = cluster_k;
        params.seed = cluster_seed;
        params.max_iter = cluster_max_iter;
        params.tol = cluster_tol;
        const auto result = kmeans(vectors, params);
        write_clusters_json(cluster_output, result, series.catalog.codes(),
                            params.seed);
        std::printf("k=%u iterations=%u inertia=%.6g\n", result.k, result.iterations,
                    result.inertia);
    });

    // --- accuracy -------------------------------------------------------
    auto* accuracy_cmd = app.add_subcommand(
        "accuracy", "compare forecasts against actual counts, day by day");
    int accuracy_threshold = 70;
    std::string accuracy_forecast, accuracy_actuals, accuracy_output = "report.json";
    accuracy_cmd->add_option("--threshold", accuracy_threshold,
                             "validity threshold percent (default 70)");
    accuracy_cmd->add_option("forecast", accuracy_forecast, "forecast JSON file")
        ->required();
    accuracy_cmd->add_option("actuals", accuracy_actuals,
                             "CSV: product,<one column per day>")
        ->required();
    accuracy_cmd->add_option("-o,--output", accuracy_output, "report JSON file");
    accuracy_cmd->callback([&] {
        const auto forecasts = read_forecast_json(accuracy_forecast);
        if (forecasts.empty()) throw Error::data("forecast file has no items");
        const auto grid = read_actuals_csv(accuracy_actuals);
        std::vector<std::string> products;
        std::vector<std::vector<std::uint64_t>> predicted, actual;
        for (const auto& f : forecasts) {
            products.push_back(f.item);
            predicted.push_back(f.predictions);
            bool found = false;
            for (std::size_t i = 0; i < grid.products.size(); ++i) {
                if (grid.products[i] == f.item) {
                    actual.push_back(grid.counts[i]);
                    found = true;
                    break;
                }
            }
            if (!found)
                throw Error::data("actuals file has no row for item '" + f.item + "'");
        }
        const auto report =
            accuracy_table(products, predicted, actual, accuracy_threshold);
        write_report_json(accuracy_output, report,
                          "validity_horizon counts the leading days whose average "
                          "accuracy stays at or above threshold_pct; "
                          "forecast-extended rules should not be applied past it.");
        std::printf("validity horizon: %d day(s)\n", report.validity_horizon);
    });

    // --- run ------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute the full pipeline from a config");
    std::string run_config;
    std::optional<std::string> run_out_dir;
    std::optional<std::uint64_t> run_seed;
    std::optional<double> run_min_conf;
    std::optional<std::uint32_t> run_top_k, run_horizon;
    run_cmd->add_option("--config", run_config, "pipeline config JSON")->required();
    run_cmd->add_option("--out-dir", run_out_dir, "override out_dir");
    run_cmd->add_option("--seed", run_seed, "override clustering seed");
    run_cmd->add_option("--min-conf", run_min_conf, "override mining.min_confidence");
    run_cmd->add_option("--top-k", run_top_k, "override forecast.top_k");
    run_cmd->add_option("--horizon", run_horizon, "override forecast.horizon");
    run_cmd->callback([&] {
        auto config = load_pipeline_config(run_config);
        if (run_out_dir) config.out_dir = *run_out_dir;
        if (run_seed) config.clustering.seed = *run_seed;
        if (run_min_conf) config.mining.min_confidence = *run_min_conf;
        if (run_top_k) config.top_k = *run_top_k;
        if (run_horizon) config.forecast.horizon = *run_horizon;
        const auto summary = run_pipeline(config);
        std::printf("pipeline complete: %zu usable rule(s), validity horizon %d day(s)\n",
                    summary.usable_rules.size(), summary.report.validity_horizon);
        std::printf("artifacts in %s\n", config.out_dir.c_str());
    });

    // --- synth ----------------------------------------------------------
    auto* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic transaction CSV with planted rules");
    std::uint32_t synth_items = 20, synth_baskets = 1000, synth_days = 30;
    std::uint64_t synth_seed = 0;
    double synth_base_prob = 0.1;
    std::string synth_start = "2014-01-01", synth_output = "synthetic.csv";
    std::vector<std::string> synth_plants;
    synth_cmd->add_option("--items", synth_items, "item count (codes it0..itN-1)");
    synth_cmd->add_option("--baskets", synth_baskets, "basket count");
    synth_cmd->add_option("--days", synth_days, "day span");
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--base-prob", synth_base_prob,
                          "independent item probability (default 0.1)");
    synth_cmd->add_option("--start-date", synth_start, "first day (YYYY-MM-DD)");
    synth_cmd->add_option("--plant", synth_plants,
                          "planted rule 'a,b=>c,d:PROB' (repeatable)")
        ->allow_extra_args(false);
    synth_cmd->add_option("-o,--output", synth_output, "wide CSV output path");
    synth_cmd->callback([&] {
        SyntheticSpec spec;
        spec.item_count = synth_items;
        spec.basket_count = synth_baskets;
        spec.day_span = synth_days;
        spec.seed = synth_seed;
        spec.start_day = parse_iso_date(synth_start);
        spec.base_probabilities.assign(synth_items, synth_base_prob);
        ItemCatalog catalog;
        for (std::uint32_t i = 0; i < synth_items; ++i)
            catalog.add("it" + std::to_string(i));
        for (const auto& plant : synth_plants)
            spec.rules.push_back(parse_plant(plant, catalog));
        const auto table = generate_synthetic(spec);
        std::ofstream out(synth_output, std::ios::binary);
        if (!out) throw Error::data("cannot open '" + synth_output + "' for writing");
        write_wide_csv(out, table);
        std::printf("%u baskets over %u items -> %s\n", synth_baskets, synth_items,
                    synth_output.c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
