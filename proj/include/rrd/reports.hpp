#pragma once

#include <map>
#include <string>
#include <vector>

#include "rrd/model.hpp"

namespace rrd {

struct SampleRedundancy {
    std::string query_id;
    int sample_index = 0;
    RedundancyMetrics metrics;

    friend bool operator==(const SampleRedundancy&, const SampleRedundancy&) = default;
};

/// Per-trace TRR/MOR and their averages over traces that state at least one
/// ranking.
struct RedundancySummary {
    std::string model_tag;
    std::vector<SampleRedundancy> per_sample;
    double avg_trr = 0.0;
    double avg_mor = 0.0;
    int n_traces = 0;
};

RedundancySummary summarize_redundancy(const std::vector<TrajectorySample>& samples, const std::string& model_tag);

struct FilterReport {
    std::vector<QueryFilterStats> stats;
    double retention_rate = 0.0;
    int n_queries = 0;
    int n_retained = 0;
};

struct ComparisonRow {
    std::string model_tag;
    double mean_ndcg10 = 0.0;
    double mean_len = 0.0;
    int n_queries = 0;
};

/// One row per model plus each model's length/nDCG curve.
struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    std::map<std::string, std::vector<LengthBucket>> curves;
};

/// Merges evaluation reports of different models over the same queries.
/// Throws ValidationError on duplicate tags or differing query sets.
ComparisonReport compare_reports(const std::vector<EvalReport>& reports, int bucket_count);

}  // namespace rrd
