#include "basketlab/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "basketlab/error.hpp"

namespace basketlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kHorizonNote =
    "validity_horizon counts the leading days whose average accuracy stays at "
    "or above threshold_pct; forecast-extended rules should not be applied "
    "past it.";

const std::vector<std::string> kStages = {"ingest",   "reduce",   "mine",
                                          "validate", "aggregate", "forecast",
                                          "accuracy", "cluster",  "summary"};

// Stage ledger persisted after every transition so interrupted runs leave an
// accurate record next to whatever artifacts they managed to produce.
class Manifest {
public:
    explicit Manifest(fs::path out_dir) : path_(out_dir / "manifest.json") {
        for (const auto& name : kStages) records_.push_back({name, "pending", {}, ""});
        write();
    }

    void run(const std::string& stage,
             const std::function<std::vector<std::string>()>& body) {
        auto& rec = find(stage);
        try {
            rec.artifacts = body();
            rec.status = "done";
            write();
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.note = e.what();
            write();
            throw;
        }
    }

    void skip(const std::string& stage, const std::string& why) {
        auto& rec = find(stage);
        rec.status = "skipped";
        rec.note = why;
        write();
    }

private:
    struct Record {
        std::string name;
        std::string status;
        std::vector<std::string> artifacts;
        std::string note;
    };

    Record& find(const std::string& stage) {
        for (auto& r : records_)
            if (r.name == stage) return r;
        throw Error::internal("unknown pipeline stage '" + stage + "'");
    }

    void write() const {
        json stages = json::array();
        bool failed = false;
        for (const auto& r : records_) {
            json j{{"name", r.name}, {"status", r.status}};
            if (!r.artifacts.empty()) j["artifacts"] = r.artifacts;
            if (!r.note.empty()) j["note"] = r.note;
            stages.push_back(j);
            failed = failed || r.status == "failed";
        }
        json root{{"stages", stages}, {"status", failed ? "failed" : "ok"}};
        std::ofstream out(path_, std::ios::binary);
        out << root.dump(2) << '\n';
    }

    fs::path path_;
    std::vector<Record> records_;
};

DailySeries truncate_series(const DailySeries& series, std::uint32_t days) {
    DailySeries out;
    out.catalog = series.catalog;
    out.start = series.start;
    out.num_days = days;
    out.totals.reserve(series.totals.size());
    for (const auto& row : series.totals)
        out.totals.emplace_back(row.begin(), row.begin() + days);
    return out;
}

TransactionTable parse_file(const std::string& path, const IngestSchema& schema,
                            std::vector<std::string>& warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::data("cannot open input file '" + path + "'");
    auto outcome = parse_transactions(in, schema);
    for (auto& w : outcome.warnings) warnings.push_back(path + ": " + std::move(w));
    return std::move(outcome.table);
}

std::string format_rule_line(const RuleRecord& r) {
    std::ostringstream line;
    line << "  {";
    for (std::size_t i = 0; i < r.antecedent.size(); ++i)
        line << (i ? ", " : "") << r.antecedent[i];
    line << "} => {";
    for (std::size_t i = 0; i < r.consequent.size(); ++i)
        line << (i ? ", " : "") << r.consequent[i];
    line << "}";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  confidence %.3f  support %llu", r.confidence,
                  static_cast<unsigned long long>(r.support_count));
    line << buf;
    return line.str();
}

void check_not_inside(const std::string& candidate, const fs::path& out_dir,
                      const char* what) {
    if (candidate.empty()) return;
    const auto norm = fs::absolute(fs::path(candidate)).lexically_normal();
    const auto base = fs::absolute(out_dir).lexically_normal();
    auto it = base.begin();
    auto cit = norm.begin();
    for (; it != base.end() && cit != norm.end(); ++it, ++cit)
        if (*it != *cit) return;
    if (it == base.end())
        throw Error::usage(std::string(what) +
                           " must not live inside the output directory");
}

} // namespace

void validate_config(const PipelineConfig& config) {
    if (config.input_path.empty()) throw Error::usage("config: input.path is required");
    if (config.out_dir.empty()) throw Error::usage("config: out_dir is required");
    if (config.mining.min_confidence < 0.0 || config.mining.min_confidence > 1.0)
        throw Error::usage("config: mining.min_confidence must be in [0,1]");
    if (config.mining.max_itemset_size < 1)
        throw Error::usage("config: mining.max_size must be at least 1");
    if (std::holds_alternative<double>(config.mining.min_support)) {
        const double rel = std::get<double>(config.mining.min_support);
        if (rel <= 0.0 || rel > 1.0)
            throw Error::usage("config: mining.min_support must be in (0,1]");
    } else if (std::get<std::uint64_t>(config.mining.min_support) < 1) {
        throw Error::usage("config: mining.absolute_support must be at least 1");
    }
    if (config.top_k < 1) throw Error::usage("config: forecast.top_k must be at least 1");
    if (config.forecast.lag_window < 1)
        throw Error::usage("config: forecast.lag_window must be at least 1");
    if (config.forecast.horizon < 1)
        throw Error::usage("config: forecast.horizon must be at least 1");
    if (config.forecast.tree.smoothing_k < 0.0)
        throw Error::usage("config: forecast.smoothing_k must be non-negative");
    if (config.forecast.tree.sd_stop_fraction <= 0.0 ||
        config.forecast.tree.sd_stop_fraction >= 1.0)
        throw Error::usage("config: forecast.sd_stop_fraction must be in (0,1)");
    if (config.clustering.k < 1)
        throw Error::usage("config: clustering.k must be at least 1");
    if (config.threshold_pct < 0 || config.threshold_pct > 100)
        throw Error::usage("config: accuracy.threshold_pct must be in [0,100]");
    if (!config.reduction_targets.empty() &&
        config.reduction_policy == AttributePolicy::TargetsPlusCooccurring &&
        config.min_cooccurrence < 1)
        throw Error::usage("config: reduction.min_cooccur must be at least 1");
    check_not_inside(config.input_path, config.out_dir, "config: input.path");
    check_not_inside(config.holdout_path, config.out_dir, "config: holdout.path");
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::usage("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error::usage("config '" + path + "': " + e.what());
    }

    const auto known_keys = [&](const json& obj, const char* section,
                                std::initializer_list<const char*> keys) {
        for (const auto& [key, value] : obj.items()) {
            (void)value;
            if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
                    return key == k;
                }) == keys.end())
                throw Error::usage("config '" + path + "': unknown key '" + key +
                                   "' in " + section);
        }
    };

    PipelineConfig config;
    try {
        known_keys(j, "top level",
                   {"input", "reduction", "mining", "forecast", "clustering",
                    "accuracy", "holdout", "out_dir"});
        if (j.contains("input")) {
            const auto& in_j = j.at("input");
            known_keys(in_j, "input",
                       {"path", "format", "date_col", "receipt_col", "item_col",
                        "qty_col", "delimiter"});
            config.input_path = in_j.value("path", "");
            const std::string format = in_j.value("format", "wide");
            if (format == "wide") config.schema.format = IngestSchema::Format::Wide;
            else if (format == "long") config.schema.format = IngestSchema::Format::Long;
            else throw Error::usage("config: input.format must be wide or long");
            config.schema.date_col = in_j.value("date_col", config.schema.date_col);
            config.schema.receipt_col = in_j.value("receipt_col", config.schema.receipt_col);
            config.schema.item_col = in_j.value("item_col", config.schema.item_col);
            config.schema.qty_col = in_j.value("qty_col", config.schema.qty_col);
            const std::string delim = in_j.value("delimiter", ",");
            if (delim.size() != 1)
                throw Error::usage("config: input.delimiter must be one character");
            config.schema.delimiter = delim[0];
        }
        if (j.contains("reduction")) {
            const auto& red = j.at("reduction");
            known_keys(red, "reduction", {"targets", "policy", "min_cooccur"});
            config.reduction_targets =
                red.value("targets", std::vector<std::string>{});
            const std::string policy = red.value("policy", "cooccur");
            if (policy == "targets-only") config.reduction_policy = AttributePolicy::TargetsOnly;
            else if (policy == "cooccur")
                config.reduction_policy = AttributePolicy::TargetsPlusCooccurring;
            else throw Error::usage("config: reduction.policy must be targets-only or cooccur");
            config.min_cooccurrence = red.value("min_cooccur", std::uint64_t{1});
        }
        if (j.contains("mining")) {
            const auto& mine = j.at("mining");
            known_keys(mine, "mining",
                       {"min_confidence", "min_support", "absolute_support", "max_size"});
            config.mining.min_confidence = mine.value("min_confidence", 0.70);
            if (mine.contains("absolute_support") && mine.contains("min_support"))
                throw Error::usage(
                    "config: set either mining.min_support or mining.absolute_support");
            if (mine.contains("absolute_support"))
                config.mining.min_support = mine.at("absolute_support").get<std::uint64_t>();
            else if (mine.contains("min_support"))
                config.mining.min_support = mine.at("min_support").get<double>();
            config.mining.max_itemset_size = mine.value("max_size", 5u);
        }
        if (j.contains("forecast")) {
            const auto& fc = j.at("forecast");
            known_keys(fc, "forecast",
                       {"top_k", "lag_window", "horizon", "smoothing",
                        "smoothing_k", "min_leaf", "sd_stop_fraction"});
            config.top_k = fc.value("top_k", 4u);
            config.forecast.lag_window = fc.value("lag_window", 7u);
            config.forecast.horizon = fc.value("horizon", 5u);
            config.forecast.smoothing = fc.value("smoothing", true);
            config.forecast.tree.smoothing_k = fc.value("smoothing_k", 15.0);
            config.forecast.tree.min_leaf = fc.value("min_leaf", 4);
            config.forecast.tree.sd_stop_fraction = fc.value("sd_stop_fraction", 0.05);
        }
        if (j.contains("clustering")) {
            const auto& cl = j.at("clustering");
            known_keys(cl, "clustering", {"k", "seed", "max_iter", "tol", "normalize"});
            config.clustering.k = cl.value("k", 4u);
            config.clustering.seed = cl.value("seed", std::uint64_t{0});
            config.clustering.max_iter = cl.value("max_iter", 300u);
            config.clustering.tol = cl.value("tol", 1e-6);
            config.normalize_clusters = cl.value("normalize", false);
        }
        if (j.contains("accuracy")) {
            const auto& acc = j.at("accuracy");
            known_keys(acc, "accuracy", {"threshold_pct"});
            config.threshold_pct = acc.value("threshold_pct", 70);
        }
        if (j.contains("holdout")) {
            const auto& hold = j.at("holdout");
            known_keys(hold, "holdout", {"path"});
            config.holdout_path = hold.value("path", "");
        }
        config.out_dir = j.value("out_dir", config.out_dir);
    } catch (const json::exception& e) {
        throw Error::usage("config '" + path + "': " + e.what());
    }
    return config;
}

RunSummary run_pipeline(const PipelineConfig& config) {
    validate_config(config);
    const fs::path out_dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error::data("cannot create output directory '" + config.out_dir + "'");

    Manifest manifest(out_dir);
    RunSummary summary;
    std::vector<std::string> warnings;

    TransactionTable table;
    BasketDataset baskets;
    manifest.run("ingest", [&] {
        table = parse_file(config.input_path, config.schema, warnings);
        baskets = binarize(table);
        summary.baskets = baskets.baskets.size();
        summary.items = baskets.catalog.size();
        write_dataset((out_dir / "dataset.bl").string(), baskets);
        return std::vector<std::string>{"dataset.bl"};
    });
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    BasketDataset mining_input = baskets;
    if (config.reduction_targets.empty()) {
        manifest.skip("reduce", "no reduction targets configured");
    } else {
        manifest.run("reduce", [&] {
            const auto spec =
                spec_from_codes(baskets.catalog, config.reduction_targets,
                                config.reduction_policy, config.min_cooccurrence);
            auto [reduced, stats] = reduce(baskets, spec);
            summary.reduction = stats;
            summary.reduced = true;
            mining_input = std::move(reduced);
            write_dataset((out_dir / "reduced.bl").string(), mining_input);
            write_stats_json((out_dir / "stats.json").string(), stats);
            return std::vector<std::string>{"reduced.bl", "stats.json"};
        });
    }

    std::vector<AssociationRule> rules;
    manifest.run("mine", [&] {
        const auto frequent = frequent_itemsets(mining_input, config.mining);
        rules = generate_rules(frequent, config.mining);
        summary.mined_rules = to_records(rules, mining_input.catalog);
        write_rules_json((out_dir / "rules.json").string(), summary.mined_rules);
        return std::vector<std::string>{"rules.json"};
    });

    if (config.holdout_path.empty()) {
        manifest.skip("validate", "no holdout configured");
        summary.usable_rules = summary.mined_rules;
    } else {
        manifest.run("validate", [&] {
            auto holdout_table = parse_file(config.holdout_path, config.schema, warnings);
            const auto holdout = binarize(holdout_table);
            write_dataset((out_dir / "holdout.bl").string(), holdout);
            const auto result = validate_rules(rules, mining_input.catalog, holdout,
                                               config.mining.min_confidence);
            summary.validated_against_holdout = true;
            summary.eliminated_rules = result.eliminated.size();
            std::vector<AssociationRule> kept;
            kept.reserve(result.validated.size());
            for (const auto& check : result.validated) kept.push_back(check.rule);
            summary.usable_rules = to_records(kept, mining_input.catalog);
            write_validation_json((out_dir / "validated.json").string(), result,
                                  mining_input.catalog, config.mining.min_confidence);
            return std::vector<std::string>{"holdout.bl", "validated.json"};
        });
    }

    DailySeries series;
    manifest.run("aggregate", [&] {
        series = aggregate_daily(table);
        write_series((out_dir / "series.bl").string(), series);
        return std::vector<std::string>{"series.bl"};
    });

    // The last `horizon` days are withheld from training and replayed as the
    // actuals of the accuracy report.
    std::vector<ForecastRecord> forecasts;
    std::vector<std::vector<std::uint64_t>> actual_grid;
    DailySeries train;
    manifest.run("forecast", [&] {
        const auto horizon = config.forecast.horizon;
        if (series.num_days <= config.forecast.lag_window + horizon)
            throw Error::data(
                "series has " + std::to_string(series.num_days) +
                " days; need more than lag_window + horizon = " +
                std::to_string(config.forecast.lag_window + horizon));
        train = truncate_series(series, series.num_days - horizon);
        const auto top = top_k_items(series, config.top_k);
        std::vector<std::string> artifacts{"forecast.json"};
        fs::create_directories(out_dir / "models");
        for (auto item : top) {
            const auto code = series.catalog.code(item);
            summary.top_items.push_back(code);
            const auto instances =
                build_instances(train, item, config.forecast.lag_window);
            auto tree = ModelTree::grow(instances, config.forecast.tree);
            tree.prune(instances);
            const auto predictions =
                forecast_horizon(tree, train, item, config.forecast);
            ForecastRecord record;
            record.item = code;
            record.lag_window = config.forecast.lag_window;
            record.horizon = horizon;
            record.smoothing_k = config.forecast.tree.smoothing_k;
            record.predictions = predictions;
            forecasts.push_back(std::move(record));
            std::vector<std::uint64_t> tail(
                series.totals[item].end() - horizon, series.totals[item].end());
            actual_grid.push_back(std::move(tail));
            const std::string model_file = "models/" + code + ".m5t";
            write_model_tree((out_dir / model_file).string(), tree,
                             instances.feature_names);
            artifacts.push_back(model_file);
        }
        write_forecast_json((out_dir / "forecast.json").string(), forecasts);
        return artifacts;
    });

    manifest.run("accuracy", [&] {
        std::vector<std::vector<std::uint64_t>> predicted_grid;
        predicted_grid.reserve(forecasts.size());
        for (const auto& f : forecasts) predicted_grid.push_back(f.predictions);
        summary.report = accuracy_table(summary.top_items, predicted_grid,
                                        actual_grid, config.threshold_pct);
        write_report_json((out_dir / "report.json").string(), summary.report,
                          kHorizonNote);
        return std::vector<std::string>{"report.json"};
    });

    manifest.run("cluster", [&] {
        std::vector<std::vector<double>> vectors;
        vectors.reserve(series.totals.size());
        for (const auto& row : series.totals)
            vectors.emplace_back(row.begin(), row.end());
        if (config.normalize_clusters) vectors = minmax_normalize(vectors);
        summary.clusters = kmeans(vectors, config.clustering);
        write_clusters_json((out_dir / "clusters.json").string(), summary.clusters,
                            series.catalog.codes(), config.clustering.seed);
        return std::vector<std::string>{"clusters.json"};
    });

    manifest.run("summary", [&] {
        std::ostringstream text;
        text << "basketlab pipeline summary\n";
        text << "==========================\n";
        text << "input: " << config.input_path << "  baskets: " << summary.baskets
             << "  items: " << summary.items << "  days: " << series.num_days
             << "\n";
        if (summary.reduced) {
            text << "reduction: rows " << summary.reduction.rows_before << " -> "
                 << summary.reduction.rows_after << ", attributes "
                 << summary.reduction.attrs_before << " -> "
                 << summary.reduction.attrs_after << "\n";
        } else {
            text << "reduction: skipped\n";
        }
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f", config.mining.min_confidence);
            text << "mining: " << summary.mined_rules.size()
                 << " rules at min confidence " << buf << "\n";
        }
        if (summary.validated_against_holdout) {
            text << "validation: " << summary.usable_rules.size() << " validated, "
                 << summary.eliminated_rules << " eliminated (holdout "
                 << config.holdout_path << ")\n";
        } else {
            text << "validation: skipped (no holdout)\n";
        }
        text << "forecast items:";
        for (const auto& code : summary.top_items) text << ' ' << code;
        text << "  horizon: " << config.forecast.horizon << "\n";
        text << "average accuracy % per day:";
        for (int pct : summary.report.avg_accuracy_pct) text << ' ' << pct;
        text << "\n";
        text << "validity horizon: " << summary.report.validity_horizon
             << " day(s) at threshold " << config.threshold_pct << "%\n";
        text << "note: " << kHorizonNote << "\n";
        text << "rules usable for the next " << summary.report.validity_horizon
             << " day(s): " << summary.usable_rules.size() << "\n";
        const std::size_t shown = std::min<std::size_t>(10, summary.usable_rules.size());
        for (std::size_t i = 0; i < shown; ++i)
            text << format_rule_line(summary.usable_rules[i]) << "\n";
        if (shown < summary.usable_rules.size())
            text << "  ... (" << summary.usable_rules.size() - shown << " more)\n";
        text << "clusters (k=" << summary.clusters.k << "):";
        for (std::size_t i = 0; i < summary.top_items.size(); ++i) {
            const auto idx = series.catalog.find(summary.top_items[i]);
            text << ' ' << summary.top_items[i] << "=c"
                 << summary.clusters.assignments[*idx];
        }
        text << "\n";

        std::ofstream out(out_dir / "summary.txt", std::ios::binary);
        out << text.str();
        if (!out) throw Error::data("failed writing summary.txt");
        return std::vector<std::string>{"summary.txt"};
    });

    return summary;
}

} // namespace basketlab
