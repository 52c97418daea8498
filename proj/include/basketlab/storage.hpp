#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "basketlab/accuracy.hpp"
#include "basketlab/dataset.hpp"
#include "basketlab/kmeans.hpp"
#include "basketlab/model_tree.hpp"
#include "basketlab/reduction.hpp"
#include "basketlab/rules.hpp"

namespace basketlab {

// Versioned line-oriented containers (see docs/FORMATS.md). Writers emit
// byte-stable output for identical inputs.

void write_dataset(const std::string& path, const BasketDataset& dataset);
BasketDataset read_dataset(const std::string& path);

void write_series(const std::string& path, const DailySeries& series);
DailySeries read_series(const std::string& path);

// rules.json records (item codes instead of indices).
struct RuleRecord {
    std::vector<std::string> antecedent;
    std::vector<std::string> consequent;
    std::uint64_t support_count = 0;
    double relative_support = 0.0;
    double confidence = 0.0;
};

std::vector<RuleRecord> to_records(const std::vector<AssociationRule>& rules,
                                   const ItemCatalog& catalog);

void write_rules_json(const std::string& path, const std::vector<RuleRecord>& rules);
std::vector<RuleRecord> read_rules_json(const std::string& path);

void write_validation_json(const std::string& path, const ValidationResult& result,
                           const ItemCatalog& rule_catalog, double min_confidence);

struct ForecastRecord {
    std::string item;
    std::uint32_t lag_window = 0;
    std::uint32_t horizon = 0;
    double smoothing_k = 0.0;
    std::vector<std::uint64_t> predictions;
};

void write_forecast_json(const std::string& path,
                         const std::vector<ForecastRecord>& records);
std::vector<ForecastRecord> read_forecast_json(const std::string& path);

void write_clusters_json(const std::string& path, const ClusterResult& result,
                         const std::vector<std::string>& item_codes,
                         std::uint64_t seed);

void write_report_json(const std::string& path, const AccuracyReport& report,
                       const std::string& note);

void write_stats_json(const std::string& path, const ReductionStats& stats);

// Versioned structured text dump of a model tree; coefficients and thresholds
// keep full round-trip precision.
void write_model_tree(const std::string& path, const ModelTree& tree,
                      const std::vector<std::string>& feature_names);
ModelTree read_model_tree(const std::string& path);

// Wide-format transaction CSV (header: date, then one column per item code).
void write_wide_csv(std::ostream& out, const TransactionTable& table);

// Actuals grid: header "product,<day labels...>"; one row of counts per item.
struct ActualsGrid {
    std::vector<std::string> products;
    std::vector<std::vector<std::uint64_t>> counts;
};
ActualsGrid read_actuals_csv(const std::string& path);
void write_actuals_csv(const std::string& path, const ActualsGrid& grid);

} // namespace basketlab
