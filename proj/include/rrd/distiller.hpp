#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rrd/model.hpp"

namespace rrd {

/// Samples with a parsed ranking and a strictly positive score, in input
/// order. Throws ValidationError on a valid sample that was never scored.
std::vector<TrajectorySample> valid_subset(const std::vector<TrajectorySample>& samples);

struct QueryMeans {
    double mean_score = 0.0;
    double mean_len = 0.0;
};

/// Arithmetic means of score and token length. Throws on empty input.
QueryMeans query_stats(const std::vector<TrajectorySample>& valid);

/// Samples with score >= mean_score and token_len < mean_len.
std::vector<TrajectorySample> efficient_set(const std::vector<TrajectorySample>& valid, const QueryMeans& means);

/// Shortest member; ties go to the higher score, then the lower index.
std::optional<TrajectorySample> select_target(const std::vector<TrajectorySample>& efficient);

struct QueryInput {
    Query query;
    CandidateSet candidates;
    std::vector<TrajectorySample> samples;
};

struct CorpusResult {
    std::vector<DistillationRecord> corpus;
    std::vector<QueryFilterStats> stats;
    double retention_rate = 0.0;
};

/// Runs the filter chain per query. Corpus and stats come out ordered by
/// query_id; retention is retained queries over all queries.
CorpusResult build_corpus(const std::map<std::string, QueryInput>& per_query);

using ScoringFn = std::function<double(const Ranking&, const Qrels&, const std::string& query_id)>;

/// nDCG@10, the quality score used by the filter.
ScoringFn ndcg10_scorer();

/// Attaches a score to every valid sample. Invalid samples stay unscored.
std::vector<TrajectorySample> score_samples(std::vector<TrajectorySample> samples, const Qrels& qrels,
                                            const ScoringFn& scorer = ndcg10_scorer());

}  // namespace rrd
