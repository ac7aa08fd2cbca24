#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rrd/model.hpp"
#include "rrd/prompt.hpp"
#include "rrd/reports.hpp"

namespace rrd {

/// Malformed input file. `what()` reads "path:line: message".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& message);

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Non-fatal reader findings, one line each.
using Warnings = std::vector<std::string>;

inline constexpr int kSampleSchemaVersion = 1;
inline constexpr const char* kSftSchema = "rrd.sft.v1";

// --- TREC formats ---------------------------------------------------------

/// "qid iter docid grade" per line. A repeated pair keeps the last grade.
Qrels read_qrels(const std::string& path, Warnings* warnings = nullptr);
/// Sorted by (qid, docid); iteration column written as 0.
void write_qrels(const Qrels& qrels, const std::string& path);

struct RunEntry {
    std::string query_id;
    std::string doc_id;
    int rank = 0;
    double score = 0.0;
    std::string tag;
};

/// "qid Q0 docid rank score tag" per line; each query's docs in rank order,
/// truncated to `depth`.
std::map<std::string, std::vector<std::string>> read_run(const std::string& path, int depth,
                                                         Warnings* warnings = nullptr);
/// Throws ValidationError unless every query has ranks 1..m with strictly
/// descending scores.
void write_run(const std::vector<RunEntry>& entries, const std::string& path);

// --- Plain-text inputs ----------------------------------------------------

/// "qid<TAB>text" per line, in file order.
std::vector<Query> read_topics(const std::string& path);
/// "docid<TAB>text" per line. When `wanted` is given, other docs are skipped.
std::map<std::string, std::string> read_collection(const std::string& path,
                                                   const std::set<std::string>* wanted = nullptr);

// --- JSON-lines stores ----------------------------------------------------

struct QueryCandidates {
    Query query;
    CandidateSet candidates;
};

void write_candidates(const std::vector<QueryCandidates>& items, const std::string& path);
std::vector<QueryCandidates> read_candidates(const std::string& path);

nlohmann::json sample_to_json(const TrajectorySample& s);
TrajectorySample sample_from_json(const nlohmann::json& j);

void write_samples(const std::vector<TrajectorySample>& samples, const std::string& path);
std::vector<TrajectorySample> read_samples(const std::string& path);

/// Chat-format fine-tuning corpus, one {"messages": [...], "meta": {...}}
/// object per line, ordered by query id. Every record must carry the hash of
/// `tmpl`.
void write_sft_corpus(const std::vector<DistillationRecord>& corpus, const PromptTemplate& tmpl,
                      const std::string& path, bool allow_empty = false);

// --- Reports --------------------------------------------------------------

enum class ReportFormat { Json, Csv };

ReportFormat report_format_from_string(const std::string& s);

/// Canonical JSON: sorted keys, two-space indent, floats with
/// exactly six decimals.
std::string canonical_json(const nlohmann::json& j);

/// CSV columns: query_id,ndcg10,gen_len,n_samples
void write_report(const EvalReport& report, const std::string& path, ReportFormat format);
/// CSV columns: model_tag,avg_trr,avg_mor,n_traces
void write_report(const RedundancySummary& report, const std::string& path, ReportFormat format);
/// CSV columns: query_id,n_sampled,n_valid,mean_score,mean_len,efficient_indices,retained
void write_report(const FilterReport& report, const std::string& path, ReportFormat format);
/// CSV columns: model_tag,mean_ndcg10,mean_len,n_queries
void write_report(const ComparisonReport& report, const std::string& path, ReportFormat format);
/// CSV columns: model_tag,len_lo,len_hi,mean_ndcg10,count
void write_curve_csv(const ComparisonReport& report, const std::string& path);

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const RedundancySummary& r);
nlohmann::json to_json(const FilterReport& r);
nlohmann::json to_json(const ComparisonReport& r);

EvalReport read_eval_report(const std::string& path);
RedundancySummary read_redundancy_summary(const std::string& path);
FilterReport read_filter_report(const std::string& path);

/// Whole-file helpers shared by the writers and the CLI.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rrd
