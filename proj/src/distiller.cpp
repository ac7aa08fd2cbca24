#include "rrd/distiller.hpp"

#include <algorithm>

#include "rrd/metrics.hpp"

namespace rrd {

std::vector<TrajectorySample> valid_subset(const std::vector<TrajectorySample>& samples) {
    std::vector<TrajectorySample> out;
    for (const auto& s : samples) {
        if (!s.valid) continue;
        if (!s.score) {
            throw ValidationError("sample (" + s.query_id + ", " + std::to_string(s.sample_index) +
                                  ") is valid but unscored; run evaluation first");
        }
        if (*s.score > 0.0) out.push_back(s);
    }
    return out;
}

QueryMeans query_stats(const std::vector<TrajectorySample>& valid) {
    if (valid.empty()) throw ValidationError("query_stats: no valid samples");
    double score_sum = 0.0, len_sum = 0.0;
    for (const auto& s : valid) {
        score_sum += s.score.value_or(0.0);
        len_sum += static_cast<double>(s.token_len);
    }
    const double n = static_cast<double>(valid.size());
    return {score_sum / n, len_sum / n};
}

std::vector<TrajectorySample> efficient_set(const std::vector<TrajectorySample>& valid, const QueryMeans& means) {
    std::vector<TrajectorySample> out;
    for (const auto& s : valid) {
        if (s.score.value_or(0.0) >= means.mean_score && static_cast<double>(s.token_len) < means.mean_len) {
            out.push_back(s);
        }
    }
    return out;
}

std::optional<TrajectorySample> select_target(const std::vector<TrajectorySample>& efficient) {
    if (efficient.empty()) return std::nullopt;
    const auto better = [](const TrajectorySample& a, const TrajectorySample& b) {
        if (a.token_len != b.token_len) return a.token_len < b.token_len;
        const double sa = a.score.value_or(0.0), sb = b.score.value_or(0.0);
        if (sa != sb) return sa > sb;
        return a.sample_index < b.sample_index;
    };
    return *std::min_element(efficient.begin(), efficient.end(), better);
}

CorpusResult build_corpus(const std::map<std::string, QueryInput>& per_query) {
    CorpusResult out;
    for (const auto& [qid, input] : per_query) {
        QueryFilterStats st;
        st.query_id = qid;
        st.n_sampled = static_cast<int>(input.samples.size());
        const auto valid = valid_subset(input.samples);
        st.n_valid = static_cast<int>(valid.size());
        if (!valid.empty()) {
            const auto means = query_stats(valid);
            st.mean_score = means.mean_score;
            st.mean_len = means.mean_len;
            const auto efficient = efficient_set(valid, means);
            for (const auto& s : efficient) st.efficient_indices.push_back(s.sample_index);
            if (auto target = select_target(efficient)) {
                DistillationRecord rec{input.query, input.candidates, target->raw_text, *target->score,
                                       target->token_len, target->sample_index, target->prompt_hash};
                validate(rec);
                out.corpus.push_back(std::move(rec));
            }
        }
        st.retained = !st.efficient_indices.empty();
        validate(st);
        out.stats.push_back(std::move(st));
    }
    if (!per_query.empty()) {
        out.retention_rate = static_cast<double>(out.corpus.size()) / static_cast<double>(per_query.size());
    }
    return out;
}

ScoringFn ndcg10_scorer() {
    return [](const Ranking& r, const Qrels& q, const std::string& qid) { return ndcg_at_k(r, q, qid, 10); };
}

std::vector<TrajectorySample> score_samples(std::vector<TrajectorySample> samples, const Qrels& qrels,
                                            const ScoringFn& scorer) {
    for (auto& s : samples) {
        if (s.valid && s.final_ranking) {
            s.score = scorer(*s.final_ranking, qrels, s.query_id);
        } else {
            s.score.reset();
        }
        validate(s);
    }
    return samples;
}

}  // namespace rrd
