#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rrd {

/// Raised whenever a value would violate one of its type invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Query {
    std::string id;
    std::string text;

    Query() = default;
    Query(std::string id_, std::string text_);

    friend bool operator==(const Query&, const Query&) = default;
};

struct CandidateDoc {
    std::string doc_id;
    std::string text;

    CandidateDoc() = default;
    CandidateDoc(std::string doc_id_, std::string text_);

    friend bool operator==(const CandidateDoc&, const CandidateDoc&) = default;
};

/// The candidate list handed to the reranker for one query. Prompt aliases
/// are the 1-based positions in `docs()`.
class CandidateSet {
public:
    CandidateSet(std::string query_id, std::vector<CandidateDoc> docs, std::string retriever_tag = "");

    const std::string& query_id() const { return query_id_; }
    const std::vector<CandidateDoc>& docs() const { return docs_; }
    const std::string& retriever_tag() const { return retriever_tag_; }
    std::size_t size() const { return docs_.size(); }

    /// Doc id for a 1-based prompt alias, or nullptr when out of range.
    const std::string* doc_for_alias(std::uint64_t alias) const;
    /// 1-based alias of a doc id, or 0 when the doc is not a candidate.
    std::size_t alias_of(const std::string& doc_id) const;

    friend bool operator==(const CandidateSet& a, const CandidateSet& b) {
        return a.query_id_ == b.query_id_ && a.docs_ == b.docs_ && a.retriever_tag_ == b.retriever_tag_;
    }

private:
    std::string query_id_;
    std::vector<CandidateDoc> docs_;
    std::string retriever_tag_;
};

/// Graded relevance judgments. Unjudged pairs read as grade 0.
class Qrels {
public:
    void set(const std::string& query_id, const std::string& doc_id, int grade);
    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool contains(const std::string& query_id, const std::string& doc_id) const;
    bool has_query(const std::string& query_id) const;
    std::set<std::string> query_ids() const;
    /// All judged (doc_id, grade) pairs for one query, sorted by doc_id.
    std::vector<std::pair<std::string, int>> judgments_for(const std::string& query_id) const;

    const std::map<std::pair<std::string, std::string>, int>& judgments() const { return judgments_; }
    std::size_t size() const { return judgments_.size(); }
    bool empty() const { return judgments_.empty(); }

    friend bool operator==(const Qrels&, const Qrels&) = default;

private:
    std::map<std::pair<std::string, std::string>, int> judgments_;
};

/// An ordered list of tie groups. "[a] > [b] = [c]" is {{a}, {b, c}}.
/// Equality is tie-aware: the group structure must match exactly.
class Ranking {
public:
    Ranking() = default;
    explicit Ranking(std::vector<std::vector<std::string>> groups);

    static Ranking strict(const std::vector<std::string>& order);

    const std::vector<std::vector<std::string>>& groups() const { return groups_; }
    std::vector<std::string> flatten() const;
    std::size_t item_count() const;
    bool empty() const { return groups_.empty(); }

    friend bool operator==(const Ranking&, const Ranking&) = default;
    friend auto operator<=>(const Ranking& a, const Ranking& b) { return a.groups_ <=> b.groups_; }

private:
    std::vector<std::vector<std::string>> groups_;
};

enum class TokenProvenance { EndpointReported, Approximated };

enum class FinishReason { Stop, Length, Error };

/// How the reasoning/answer boundary was located in a trace.
enum class SplitMode { Delimiter, Fallback, None };

std::string to_string(TokenProvenance p);
std::string to_string(FinishReason r);
std::string to_string(SplitMode m);
TokenProvenance token_provenance_from_string(const std::string& s);
FinishReason finish_reason_from_string(const std::string& s);
SplitMode split_mode_from_string(const std::string& s);

/// One sampled response for a query.
struct TrajectorySample {
    std::string query_id;
    int sample_index = 1;
    std::string raw_text;
    std::string reasoning_text;
    std::optional<Ranking> final_ranking;
    std::vector<Ranking> ranking_sequence;
    std::int64_t token_len = 0;
    TokenProvenance token_provenance = TokenProvenance::Approximated;
    std::optional<double> score;
    bool valid = false;
    double coverage = 0.0;
    SplitMode split_mode = SplitMode::None;
    FinishReason finish_reason = FinishReason::Stop;
    std::string error;
    std::string prompt_hash;

    friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Throws ValidationError when `s` breaks a TrajectorySample invariant.
void validate(const TrajectorySample& s);

struct SamplingConfig {
    int k_samples = 16;
    double temperature = 0.7;
    double top_p = 0.95;
    int max_tokens = 8192;
    std::optional<std::uint64_t> seed;
    int max_in_flight = 4;
    std::string endpoint_url;
    std::string model_name;
};

void validate(const SamplingConfig& c);

/// Sampling profile used to build the distillation corpus.
SamplingConfig distill_profile();
/// Sampling profile used at evaluation time.
SamplingConfig eval_profile();

struct QueryFilterStats {
    std::string query_id;
    int n_sampled = 0;
    int n_valid = 0;
    double mean_score = 0.0;
    double mean_len = 0.0;
    std::vector<int> efficient_indices;
    bool retained = false;

    friend bool operator==(const QueryFilterStats&, const QueryFilterStats&) = default;
};

void validate(const QueryFilterStats& s);

struct DistillationRecord {
    Query query;
    CandidateSet candidates;
    std::string target_text;
    double target_score = 0.0;
    std::int64_t target_len = 0;
    int target_sample_index = 0;
    std::string prompt_hash;
};

void validate(const DistillationRecord& r);

struct RedundancyMetrics {
    int seq_len = 0;
    int t_star = 0;
    double trr = 0.0;
    double mor = 0.0;

    friend bool operator==(const RedundancyMetrics&, const RedundancyMetrics&) = default;
};

void validate(const RedundancyMetrics& m);

struct QueryEval {
    double ndcg10 = 0.0;
    double gen_len = 0.0;
    int n_samples = 0;

    friend bool operator==(const QueryEval&, const QueryEval&) = default;
};

struct LengthBucket {
    double len_lo = 0.0;
    double len_hi = 0.0;
    double mean_ndcg10 = 0.0;
    int count = 0;

    friend bool operator==(const LengthBucket&, const LengthBucket&) = default;
};

struct EvalReport {
    std::string model_tag;
    std::map<std::string, QueryEval> per_query;
    double mean_ndcg10 = 0.0;
    double mean_len = 0.0;
    std::vector<LengthBucket> length_buckets;
    std::vector<std::string> warnings;
};

void validate(const EvalReport& r);

}  // namespace rrd
