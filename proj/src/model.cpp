#include "rrd/model.hpp"

#include <cmath>
#include <unordered_set>

namespace rrd {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

}  // namespace

Query::Query(std::string id_, std::string text_) : id(std::move(id_)), text(std::move(text_)) {
    require(!id.empty(), "query id must be non-empty");
}

CandidateDoc::CandidateDoc(std::string doc_id_, std::string text_)
    : doc_id(std::move(doc_id_)), text(std::move(text_)) {
    require(!doc_id.empty(), "candidate doc_id must be non-empty");
}

CandidateSet::CandidateSet(std::string query_id, std::vector<CandidateDoc> docs, std::string retriever_tag)
    : query_id_(std::move(query_id)), docs_(std::move(docs)), retriever_tag_(std::move(retriever_tag)) {
    require(!docs_.empty(), "candidate set for query '" + query_id_ + "' is empty");
    std::unordered_set<std::string> seen;
    for (const auto& d : docs_) {
        require(!d.doc_id.empty(), "candidate doc_id must be non-empty");
        require(seen.insert(d.doc_id).second,
                "duplicate doc_id '" + d.doc_id + "' in candidate set for query '" + query_id_ + "'");
    }
}

const std::string* CandidateSet::doc_for_alias(std::uint64_t alias) const {
    if (alias < 1 || alias > docs_.size()) return nullptr;
    return &docs_[alias - 1].doc_id;
}

std::size_t CandidateSet::alias_of(const std::string& doc_id) const {
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].doc_id == doc_id) return i + 1;
    }
    return 0;
}

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
    require(!query_id.empty() && !doc_id.empty(), "qrels ids must be non-empty");
    require(grade >= 0, "negative relevance grade for (" + query_id + ", " + doc_id + ")");
    judgments_[{query_id, doc_id}] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto it = judgments_.find({query_id, doc_id});
    return it == judgments_.end() ? 0 : it->second;
}

bool Qrels::contains(const std::string& query_id, const std::string& doc_id) const {
    return judgments_.count({query_id, doc_id}) > 0;
}

bool Qrels::has_query(const std::string& query_id) const {
    auto it = judgments_.lower_bound({query_id, std::string()});
    return it != judgments_.end() && it->first.first == query_id;
}

std::set<std::string> Qrels::query_ids() const {
    std::set<std::string> out;
    for (const auto& [key, grade] : judgments_) out.insert(key.first);
    return out;
}

std::vector<std::pair<std::string, int>> Qrels::judgments_for(const std::string& query_id) const {
    std::vector<std::pair<std::string, int>> out;
    for (auto it = judgments_.lower_bound({query_id, std::string()});
         it != judgments_.end() && it->first.first == query_id; ++it) {
        out.emplace_back(it->first.second, it->second);
    }
    return out;
}

Ranking::Ranking(std::vector<std::vector<std::string>> groups) : groups_(std::move(groups)) {
    std::unordered_set<std::string> seen;
    for (const auto& g : groups_) {
        require(!g.empty(), "ranking tie-group must be non-empty");
        for (const auto& id : g) {
            require(!id.empty(), "ranking doc_id must be non-empty");
            require(seen.insert(id).second, "doc_id '" + id + "' appears twice in ranking");
        }
    }
}

Ranking Ranking::strict(const std::vector<std::string>& order) {
    std::vector<std::vector<std::string>> groups;
    groups.reserve(order.size());
    for (const auto& id : order) groups.push_back({id});
    return Ranking(std::move(groups));
}

std::vector<std::string> Ranking::flatten() const {
    std::vector<std::string> out;
    out.reserve(item_count());
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
}

std::size_t Ranking::item_count() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.size();
    return n;
}

std::string to_string(TokenProvenance p) {
    return p == TokenProvenance::EndpointReported ? "endpoint-reported" : "approximated";
}

std::string to_string(FinishReason r) {
    switch (r) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "error";
}

std::string to_string(SplitMode m) {
    switch (m) {
        case SplitMode::Delimiter: return "delimiter";
        case SplitMode::Fallback: return "fallback";
        case SplitMode::None: return "none";
    }
    return "none";
}

TokenProvenance token_provenance_from_string(const std::string& s) {
    if (s == "endpoint-reported") return TokenProvenance::EndpointReported;
    if (s == "approximated") return TokenProvenance::Approximated;
    throw ValidationError("unknown token provenance '" + s + "'");
}

FinishReason finish_reason_from_string(const std::string& s) {
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    if (s == "error") return FinishReason::Error;
    throw ValidationError("unknown finish reason '" + s + "'");
}

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "delimiter") return SplitMode::Delimiter;
    if (s == "fallback") return SplitMode::Fallback;
    if (s == "none") return SplitMode::None;
    throw ValidationError("unknown split mode '" + s + "'");
}

void validate(const TrajectorySample& s) {
    const std::string where = "sample (" + s.query_id + ", " + std::to_string(s.sample_index) + "): ";
    require(!s.query_id.empty(), "sample query_id must be non-empty");
    require(s.sample_index >= 1, where + "sample_index must be >= 1");
    require(s.token_len >= 0, where + "token_len must be >= 0");
    require(!s.valid || s.final_ranking.has_value(), where + "valid sample without a final ranking");
    if (s.score) {
        require(std::isfinite(*s.score) && *s.score >= 0.0 && *s.score <= 1.0, where + "score outside [0, 1]");
    }
    require(s.coverage >= 0.0 && s.coverage <= 1.0, where + "coverage outside [0, 1]");
}

void validate(const SamplingConfig& c) {
    require(c.k_samples >= 1, "k_samples must be >= 1");
    require(c.top_p > 0.0 && c.top_p <= 1.0, "top_p must lie in (0, 1]");
    require(c.temperature >= 0.0, "temperature must be >= 0");
    require(c.max_tokens >= 1, "max_tokens must be >= 1");
    require(c.max_in_flight >= 1, "max_in_flight must be >= 1");
}

SamplingConfig distill_profile() {
    SamplingConfig c;
    c.k_samples = 16;
    c.temperature = 0.7;
    c.top_p = 0.95;
    c.max_tokens = 8192;
    return c;
}

SamplingConfig eval_profile() {
    SamplingConfig c;
    c.k_samples = 1;
    c.temperature = 0.5;
    c.top_p = 0.95;
    c.max_tokens = 8192;
    return c;
}

void validate(const QueryFilterStats& s) {
    require(s.n_valid >= 0 && s.n_valid <= s.n_sampled, "filter stats for '" + s.query_id + "': n_valid > n_sampled");
    require(s.retained == !s.efficient_indices.empty(),
            "filter stats for '" + s.query_id + "': retained must match a non-empty efficient set");
}

void validate(const DistillationRecord& r) {
    require(r.query.id == r.candidates.query_id(), "distillation record query/candidate id mismatch");
    require(r.target_score > 0.0, "distillation target for '" + r.query.id + "' must have positive score");
    require(r.target_len >= 0, "distillation target length must be >= 0");
}

void validate(const RedundancyMetrics& m) {
    require(m.seq_len >= 0 && m.t_star >= 0 && m.t_star <= m.seq_len, "redundancy metrics: t_star outside [0, T]");
    require(m.trr >= 0.0 && m.trr <= 1.0 && m.mor >= 0.0 && m.mor <= 1.0, "redundancy ratios outside [0, 1]");
    if (m.seq_len >= 1) {
        const double expected = static_cast<double>(m.seq_len - m.t_star) / m.seq_len;
        require(std::abs(expected - m.trr) < 1e-12, "redundancy metrics: trr != (T - t*)/T");
    }
}

void validate(const EvalReport& r) {
    require(!r.per_query.empty(), "eval report has no queries");
    double sum_ndcg = 0.0, sum_len = 0.0;
    for (const auto& [qid, e] : r.per_query) {
        require(e.ndcg10 >= 0.0 && e.ndcg10 <= 1.0, "eval report: nDCG for '" + qid + "' outside [0, 1]");
        require(e.gen_len >= 0.0, "eval report: negative length for '" + qid + "'");
        sum_ndcg += e.ndcg10;
        sum_len += e.gen_len;
    }
    const double n = static_cast<double>(r.per_query.size());
    require(std::abs(sum_ndcg / n - r.mean_ndcg10) < 1e-5, "eval report: mean_ndcg10 is not the per-query mean");
    require(std::abs(sum_len / n - r.mean_len) < 1e-5 * std::max(1.0, r.mean_len),
            "eval report: mean_len is not the per-query mean");
    int counted = 0;
    for (std::size_t i = 0; i < r.length_buckets.size(); ++i) {
        const auto& b = r.length_buckets[i];
        require(b.len_lo <= b.len_hi, "eval report: bucket with inverted range");
        if (i > 0) require(r.length_buckets[i - 1].len_hi == b.len_lo, "eval report: buckets are not contiguous");
        counted += b.count;
    }
    if (!r.length_buckets.empty()) {
        require(counted == static_cast<int>(r.per_query.size()), "eval report: buckets do not cover every query");
    }
}

}  // namespace rrd
