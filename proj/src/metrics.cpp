#include "rrd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rrd {

namespace {

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

}  // namespace

double ndcg_at_k(const Ranking& ranking, const Qrels& qrels, const std::string& query_id, int k) {
    if (k < 1) throw ValidationError("ndcg cutoff k must be >= 1");
    const auto order = ranking.flatten();
    double dcg = 0.0;
    for (std::size_t i = 0; i < order.size() && i < static_cast<std::size_t>(k); ++i) {
        dcg += gain(qrels.grade(query_id, order[i])) / std::log2(static_cast<double>(i) + 2.0);
    }

    std::vector<int> grades;
    for (const auto& [doc, g] : qrels.judgments_for(query_id)) {
        if (g > 0) grades.push_back(g);
    }
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < grades.size() && i < static_cast<std::size_t>(k); ++i) {
        idcg += gain(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
    }
    if (idcg == 0.0) return 0.0;
    return std::min(1.0, dcg / idcg);
}

RedundancyMetrics redundancy_metrics(const std::vector<Ranking>& sequence) {
    RedundancyMetrics m;
    m.seq_len = static_cast<int>(sequence.size());
    std::map<Ranking, int> counts;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (++counts[sequence[i]] == 1) m.t_star = static_cast<int>(i) + 1;
    }
    m.trr = m.seq_len <= 1 ? 0.0 : static_cast<double>(m.seq_len - m.t_star) / m.seq_len;
    if (!counts.empty()) {
        const auto repeated = std::count_if(counts.begin(), counts.end(), [](const auto& kv) { return kv.second >= 2; });
        m.mor = static_cast<double>(repeated) / static_cast<double>(counts.size());
    }
    return m;
}

double tail_repeat_ratio(const std::vector<Ranking>& sequence) { return redundancy_metrics(sequence).trr; }

double multi_occurrence_ratio(const std::vector<Ranking>& sequence) { return redundancy_metrics(sequence).mor; }

double length_normalized_nll(const std::vector<std::vector<double>>& batch) {
    if (batch.empty()) throw ValidationError("length_normalized_nll: empty batch");
    double total = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const auto& seq = batch[s];
        if (seq.empty()) throw ValidationError("length_normalized_nll: sequence " + std::to_string(s) + " is empty");
        double sum = 0.0;
        for (const double lp : seq) {
            if (!(lp <= 0.0)) {
                throw ValidationError("length_normalized_nll: sequence " + std::to_string(s) +
                                      " contains a value that is not a log-probability");
            }
            sum += lp;
        }
        total += sum / static_cast<double>(seq.size());
    }
    return -total / static_cast<double>(batch.size());
}

std::vector<LengthBucket> length_buckets(const std::map<std::string, QueryEval>& per_query, int bucket_count) {
    if (bucket_count < 1) throw ValidationError("bucket_count must be >= 1");
    if (per_query.empty()) return {};
    double lo = per_query.begin()->second.gen_len, hi = lo;
    for (const auto& [qid, e] : per_query) {
        lo = std::min(lo, e.gen_len);
        hi = std::max(hi, e.gen_len);
    }
    const int n = hi > lo ? bucket_count : 1;
    const double width = (hi - lo) / n;
    std::vector<LengthBucket> buckets(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        buckets[b].len_lo = lo + width * b;
        buckets[b].len_hi = b + 1 == n ? hi : lo + width * (b + 1);
    }
    std::vector<double> sums(buckets.size(), 0.0);
    for (const auto& [qid, e] : per_query) {
        int b = width > 0.0 ? static_cast<int>((e.gen_len - lo) / width) : 0;
        b = std::clamp(b, 0, n - 1);
        // Guard the floating-point edge so each point lands in [lo, hi).
        while (b > 0 && e.gen_len < buckets[b].len_lo) --b;
        while (b + 1 < n && e.gen_len >= buckets[b + 1].len_lo) ++b;
        sums[b] += e.ndcg10;
        ++buckets[b].count;
    }
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (buckets[b].count > 0) buckets[b].mean_ndcg10 = sums[b] / buckets[b].count;
    }
    return buckets;
}

EvalReport aggregate_report(const std::vector<RunPoint>& run, const Qrels& qrels, int bucket_count,
                            const std::string& model_tag) {
    if (run.empty()) throw ValidationError("aggregate_report: empty run");
    EvalReport report;
    report.model_tag = model_tag;

    std::map<std::string, std::pair<double, double>> sums;
    for (const auto& p : run) {
        auto& e = report.per_query[p.query_id];
        auto& [ndcg_sum, len_sum] = sums[p.query_id];
        if (p.ranking) ndcg_sum += ndcg_at_k(*p.ranking, qrels, p.query_id, 10);
        len_sum += p.gen_len;
        ++e.n_samples;
    }
    double total_ndcg = 0.0, total_len = 0.0;
    for (auto& [qid, e] : report.per_query) {
        if (!qrels.has_query(qid)) report.warnings.push_back("query '" + qid + "' has no relevance judgments");
        e.ndcg10 = sums[qid].first / e.n_samples;
        e.gen_len = sums[qid].second / e.n_samples;
        total_ndcg += e.ndcg10;
        total_len += e.gen_len;
    }
    const double n = static_cast<double>(report.per_query.size());
    report.mean_ndcg10 = total_ndcg / n;
    report.mean_len = total_len / n;
    report.length_buckets = length_buckets(report.per_query, bucket_count);
    return report;
}

}  // namespace rrd
