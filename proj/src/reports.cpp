#include "rrd/reports.hpp"

#include <set>

#include "rrd/metrics.hpp"

namespace rrd {

RedundancySummary summarize_redundancy(const std::vector<TrajectorySample>& samples, const std::string& model_tag) {
    RedundancySummary out;
    out.model_tag = model_tag;
    double trr_sum = 0.0, mor_sum = 0.0;
    for (const auto& s : samples) {
        SampleRedundancy r{s.query_id, s.sample_index, redundancy_metrics(s.ranking_sequence)};
        if (r.metrics.seq_len >= 1) {
            trr_sum += r.metrics.trr;
            mor_sum += r.metrics.mor;
            ++out.n_traces;
        }
        out.per_sample.push_back(std::move(r));
    }
    if (out.n_traces > 0) {
        out.avg_trr = trr_sum / out.n_traces;
        out.avg_mor = mor_sum / out.n_traces;
    }
    return out;
}

ComparisonReport compare_reports(const std::vector<EvalReport>& reports, int bucket_count) {
    if (reports.empty()) throw ValidationError("no reports to compare");
    std::set<std::string> tags;
    for (const auto& r : reports) {
        if (!tags.insert(r.model_tag).second) throw ValidationError("duplicate model tag '" + r.model_tag + "'");
    }

    const auto& reference = reports.front();
    std::string mismatches;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        for (const auto& [qid, e] : reports[i].per_query) {
            if (!reference.per_query.count(qid)) {
                mismatches += "\n  '" + qid + "' only in '" + reports[i].model_tag + "'";
            }
        }
        for (const auto& [qid, e] : reference.per_query) {
            if (!reports[i].per_query.count(qid)) {
                mismatches += "\n  '" + qid + "' missing from '" + reports[i].model_tag + "'";
            }
        }
    }
    if (!mismatches.empty()) throw ValidationError("reports cover different query sets:" + mismatches);

    ComparisonReport out;
    for (const auto& r : reports) {
        validate(r);
        out.rows.push_back({r.model_tag, r.mean_ndcg10, r.mean_len, static_cast<int>(r.per_query.size())});
        out.curves[r.model_tag] = length_buckets(r.per_query, bucket_count);
    }
    return out;
}

}  // namespace rrd
