#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "basketlab/accuracy.hpp"
#include "basketlab/forecast.hpp"
#include "basketlab/ingest.hpp"
#include "basketlab/kmeans.hpp"
#include "basketlab/reduction.hpp"
#include "basketlab/rules.hpp"
#include "basketlab/storage.hpp"

namespace basketlab {

// Declarative description of one end-to-end run. Loaded from a JSON config
// file (schema in docs/FORMATS.md); CLI flags override individual fields.
struct PipelineConfig {
    std::string input_path;
    IngestSchema schema;

    std::vector<std::string> reduction_targets; // empty = skip reduction
    AttributePolicy reduction_policy = AttributePolicy::TargetsPlusCooccurring;
    std::uint64_t min_cooccurrence = 1;

    MiningParams mining;

    std::string holdout_path; // empty = skip validation

    std::uint32_t top_k = 4;
    ForecastParams forecast;

    KMeansParams clustering;
    bool normalize_clusters = false;

    int threshold_pct = 70;

    std::string out_dir = "out";
};

PipelineConfig load_pipeline_config(const std::string& path);

// Range/consistency checks; throws a usage error before any stage runs.
void validate_config(const PipelineConfig& config);

struct RunSummary {
    std::uint64_t baskets = 0;
    std::uint32_t items = 0;
    ReductionStats reduction;
    bool reduced = false;
    bool validated_against_holdout = false;
    std::vector<RuleRecord> mined_rules;
    std::vector<RuleRecord> usable_rules; // validated when a holdout ran, else mined
    std::size_t eliminated_rules = 0;
    std::vector<std::string> top_items;
    AccuracyReport report;
    ClusterResult clusters;
};

// Executes ingest -> reduce -> mine -> validate -> aggregate -> forecast ->
// accuracy -> cluster and writes every artifact plus a human-readable summary
// into out_dir. manifest.json tracks per-stage completion; on failure it is
// left behind with the failed stage marked and partial artifacts retained.
RunSummary run_pipeline(const PipelineConfig& config);

} // namespace basketlab
