#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rrd/model.hpp"

namespace rrd {

/// nDCG@k with exponential gain (2^grade - 1) and log2(i + 1) discount.
/// Tie groups are flattened in stored order. The ideal DCG is computed from
/// every judgment of the query, so unretrieved relevant documents lower the
/// score. Returns 0 when the ideal DCG is 0.
double ndcg_at_k(const Ranking& ranking, const Qrels& qrels, const std::string& query_id, int k = 10);

/// (T - t*) / T where t* is the 1-based index of the last ranking that has no
/// equal predecessor. 0 for T <= 1.
double tail_repeat_ratio(const std::vector<Ranking>& sequence);

/// Fraction of distinct rankings that occur at least twice. 0 for an empty
/// sequence.
double multi_occurrence_ratio(const std::vector<Ranking>& sequence);

RedundancyMetrics redundancy_metrics(const std::vector<Ranking>& sequence);

/// Mean over sequences of the per-token mean negative log-likelihood.
/// Throws ValidationError on an empty batch, an empty sequence or a
/// positive log-probability.
double length_normalized_nll(const std::vector<std::vector<double>>& batch);

/// One generation to be scored: its final ranking (nullopt when the output
/// was unusable, scoring 0) and its length.
struct RunPoint {
    std::string query_id;
    std::optional<Ranking> ranking;
    double gen_len = 0.0;
};

/// Per-query nDCG@10 and length, averaged over that query's points, plus
/// equal-width length buckets over the per-query lengths. Queries without
/// judgments are kept (scoring 0) and named in `warnings`.
EvalReport aggregate_report(const std::vector<RunPoint>& run, const Qrels& qrels, int bucket_count,
                            const std::string& model_tag = "");

/// Equal-width buckets over [min, max] of the per-query lengths; the last
/// bucket is closed. A degenerate range collapses into one bucket.
std::vector<LengthBucket> length_buckets(const std::map<std::string, QueryEval>& per_query, int bucket_count);

}  // namespace rrd
