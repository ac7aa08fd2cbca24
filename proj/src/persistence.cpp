#include "rrd/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace rrd {

using nlohmann::json;

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + message), path_(path), line_(line) {}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) out.push_back(f);
    return out;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string format_fixed(double v) {
    if (!std::isfinite(v)) throw ValidationError("cannot serialize a non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

void canonical_into(const json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(it.key()).dump() + ": ";
                canonical_into(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out += ",\n";
                out += inner;
                canonical_into(j[i], out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_fixed(j.get<double>());
            return;
        default:
            out += j.dump(-1, ' ', false, json::error_handler_t::replace);
            return;
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json ranking_to_json(const Ranking& r) { return r.groups(); }

Ranking ranking_from_json(const json& j) { return Ranking(j.get<std::vector<std::vector<std::string>>>()); }

json buckets_to_json(const std::vector<LengthBucket>& buckets) {
    json arr = json::array();
    for (const auto& b : buckets) {
        arr.push_back({{"len_lo", b.len_lo}, {"len_hi", b.len_hi}, {"mean_ndcg10", b.mean_ndcg10}, {"count", b.count}});
    }
    return arr;
}

std::vector<LengthBucket> buckets_from_json(const json& arr) {
    std::vector<LengthBucket> out;
    for (const auto& b : arr) {
        out.push_back({b.at("len_lo").get<double>(), b.at("len_hi").get<double>(), b.at("mean_ndcg10").get<double>(),
                       b.at("count").get<int>()});
    }
    return out;
}

// Forces a float JSON number even for integral values, so the canonical
// writer applies fixed formatting.
json real(double v) { return json(static_cast<double>(v)); }

json parse_report_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path, 1, std::string("invalid JSON report: ") + e.what());
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Qrels read_qrels(const std::string& path, Warnings* warnings) {
    auto in = open_input(path);
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto f = split_fields(line);
        if (f.size() != 4) {
            throw ParseError(path, lineno, "expected 4 fields 'qid iter docid grade', got " + std::to_string(f.size()));
        }
        int grade = 0;
        if (!parse_number(f[3], grade)) throw ParseError(path, lineno, "grade '" + f[3] + "' is not an integer");
        if (grade < 0) throw ParseError(path, lineno, "negative grade " + f[3]);
        if (qrels.contains(f[0], f[2]) && warnings != nullptr) {
            warnings->push_back(path + ":" + std::to_string(lineno) + ": repeated judgment for (" + f[0] + ", " +
                                f[2] + "); keeping the last");
        }
        qrels.set(f[0], f[2], grade);
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    std::string out;
    for (const auto& [key, grade] : qrels.judgments()) {
        out += key.first + " 0 " + key.second + " " + std::to_string(grade) + "\n";
    }
    write_file(path, out);
}

std::map<std::string, std::vector<std::string>> read_run(const std::string& path, int depth, Warnings* warnings) {
    if (depth < 1) throw ValidationError("run depth must be >= 1");
    auto in = open_input(path);
    struct Row {
        int rank;
        double score;
        std::size_t line;
        std::string doc;
    };
    std::map<std::string, std::vector<Row>> rows;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto f = split_fields(line);
        if (f.size() != 6) {
            throw ParseError(path, lineno,
                             "expected 6 fields 'qid Q0 docid rank score tag', got " + std::to_string(f.size()));
        }
        Row row{0, 0.0, lineno, f[2]};
        if (!parse_number(f[3], row.rank)) throw ParseError(path, lineno, "rank '" + f[3] + "' is not an integer");
        if (!parse_number(f[4], row.score) || !std::isfinite(row.score)) {
            throw ParseError(path, lineno, "score '" + f[4] + "' is not a number");
        }
        auto [it, inserted] = seen.emplace(std::make_pair(f[0], f[2]), lineno);
        if (!inserted) {
            throw ParseError(path, lineno,
                             "duplicate document '" + f[2] + "' for query '" + f[0] + "' (first seen on line " +
                                 std::to_string(it->second) + ")");
        }
        rows[f[0]].push_back(std::move(row));
    }

    std::map<std::string, std::vector<std::string>> out;
    for (auto& [qid, list] : rows) {
        std::stable_sort(list.begin(), list.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
        if (warnings != nullptr) {
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (list[i].rank != static_cast<int>(i) + 1) {
                    warnings->push_back(path + ": query '" + qid + "' ranks are not 1.." + std::to_string(list.size()));
                    break;
                }
                if (i > 0 && !(list[i].score < list[i - 1].score)) {
                    warnings->push_back(path + ":" + std::to_string(list[i].line) + ": query '" + qid +
                                        "' scores are not strictly descending");
                    break;
                }
            }
        }
        auto& docs = out[qid];
        for (std::size_t i = 0; i < list.size() && i < static_cast<std::size_t>(depth); ++i) docs.push_back(list[i].doc);
    }
    return out;
}

void write_run(const std::vector<RunEntry>& entries, const std::string& path) {
    std::map<std::string, std::vector<const RunEntry*>> by_query;
    for (const auto& e : entries) by_query[e.query_id].push_back(&e);
    std::string out;
    for (auto& [qid, list] : by_query) {
        std::sort(list.begin(), list.end(), [](const RunEntry* a, const RunEntry* b) { return a->rank < b->rank; });
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i]->rank != static_cast<int>(i) + 1) {
                throw ValidationError("run for query '" + qid + "' must have ranks 1.." + std::to_string(list.size()));
            }
            if (i > 0 && !(list[i]->score < list[i - 1]->score)) {
                throw ValidationError("run for query '" + qid + "' must have strictly descending scores");
            }
            char score[64];
            std::snprintf(score, sizeof score, "%.6f", list[i]->score);
            out += qid + " Q0 " + list[i]->doc_id + " " + std::to_string(list[i]->rank) + " " + score + " " +
                   list[i]->tag + "\n";
        }
    }
    write_file(path, out);
}

std::vector<Query> read_topics(const std::string& path) {
    auto in = open_input(path);
    std::vector<Query> out;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) throw ParseError(path, lineno, "expected 'qid<TAB>query text'");
        std::string id = line.substr(0, tab);
        if (!ids.insert(id).second) throw ParseError(path, lineno, "duplicate query id '" + id + "'");
        out.emplace_back(std::move(id), line.substr(tab + 1));
    }
    return out;
}

std::map<std::string, std::string> read_collection(const std::string& path, const std::set<std::string>* wanted) {
    auto in = open_input(path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) throw ParseError(path, lineno, "expected 'docid<TAB>text'");
        std::string id = line.substr(0, tab);
        if (wanted != nullptr && !wanted->count(id)) continue;
        out[std::move(id)] = line.substr(tab + 1);
    }
    return out;
}

void write_candidates(const std::vector<QueryCandidates>& items, const std::string& path) {
    std::string out;
    for (const auto& item : items) {
        json docs = json::array();
        for (const auto& d : item.candidates.docs()) docs.push_back({{"doc_id", d.doc_id}, {"text", d.text}});
        json j = {{"query_id", item.query.id},
                  {"query_text", item.query.text},
                  {"retriever_tag", item.candidates.retriever_tag()},
                  {"docs", docs}};
        out += dump_line(j) + "\n";
    }
    write_file(path, out);
}

std::vector<QueryCandidates> read_candidates(const std::string& path) {
    auto in = open_input(path);
    std::vector<QueryCandidates> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        try {
            const auto j = json::parse(line);
            std::vector<CandidateDoc> docs;
            for (const auto& d : j.at("docs")) {
                docs.emplace_back(d.at("doc_id").get<std::string>(), d.at("text").get<std::string>());
            }
            const auto qid = j.at("query_id").get<std::string>();
            out.push_back({Query(qid, j.at("query_text").get<std::string>()),
                           CandidateSet(qid, std::move(docs), j.value("retriever_tag", std::string()))});
        } catch (const json::exception& e) {
            throw ParseError(path, lineno, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return out;
}

json sample_to_json(const TrajectorySample& s) {
    json seq = json::array();
    for (const auto& r : s.ranking_sequence) seq.push_back(ranking_to_json(r));
    return {{"schema_version", kSampleSchemaVersion},
            {"query_id", s.query_id},
            {"sample_index", s.sample_index},
            {"raw_text", s.raw_text},
            {"reasoning_text", s.reasoning_text},
            {"final_ranking", s.final_ranking ? ranking_to_json(*s.final_ranking) : json(nullptr)},
            {"ranking_sequence", seq},
            {"token_len", s.token_len},
            {"token_provenance", to_string(s.token_provenance)},
            {"score", s.score ? json(*s.score) : json(nullptr)},
            {"valid", s.valid},
            {"coverage", s.coverage},
            {"split_mode", to_string(s.split_mode)},
            {"finish_reason", to_string(s.finish_reason)},
            {"error", s.error},
            {"prompt_hash", s.prompt_hash}};
}

TrajectorySample sample_from_json(const json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kSampleSchemaVersion) {
        throw ValidationError("sample schema_version " + std::to_string(version) + " does not match " +
                              std::to_string(kSampleSchemaVersion));
    }
    TrajectorySample s;
    s.query_id = j.at("query_id").get<std::string>();
    s.sample_index = j.at("sample_index").get<int>();
    s.raw_text = j.at("raw_text").get<std::string>();
    s.reasoning_text = j.at("reasoning_text").get<std::string>();
    if (!j.at("final_ranking").is_null()) s.final_ranking = ranking_from_json(j.at("final_ranking"));
    for (const auto& r : j.at("ranking_sequence")) s.ranking_sequence.push_back(ranking_from_json(r));
    s.token_len = j.at("token_len").get<std::int64_t>();
    s.token_provenance = token_provenance_from_string(j.at("token_provenance").get<std::string>());
    if (!j.at("score").is_null()) s.score = j.at("score").get<double>();
    s.valid = j.at("valid").get<bool>();
    s.coverage = j.at("coverage").get<double>();
    s.split_mode = split_mode_from_string(j.at("split_mode").get<std::string>());
    s.finish_reason = finish_reason_from_string(j.at("finish_reason").get<std::string>());
    s.error = j.at("error").get<std::string>();
    s.prompt_hash = j.at("prompt_hash").get<std::string>();
    validate(s);
    return s;
}

void write_samples(const std::vector<TrajectorySample>& samples, const std::string& path) {
    std::string out;
    for (const auto& s : samples) out += dump_line(sample_to_json(s)) + "\n";
    write_file(path, out);
}

std::vector<TrajectorySample> read_samples(const std::string& path) {
    auto in = open_input(path);
    std::vector<TrajectorySample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (is_blank(line)) continue;
        try {
            out.push_back(sample_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(path, lineno, std::string("corrupted sample: ") + e.what());
        } catch (const ValidationError& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return out;
}

void write_sft_corpus(const std::vector<DistillationRecord>& corpus, const PromptTemplate& tmpl,
                      const std::string& path, bool allow_empty) {
    if (corpus.empty() && !allow_empty) {
        throw ValidationError("distillation corpus is empty (pass --allow-empty to write an empty file)");
    }
    const std::string hash = prompt_hash(tmpl);
    std::vector<const DistillationRecord*> ordered;
    for (const auto& r : corpus) {
        if (r.prompt_hash != hash) {
            throw ValidationError("record for query '" + r.query.id + "' was sampled with prompt " + r.prompt_hash +
                                  " but the template '" + tmpl.version + "' hashes to " + hash);
        }
        ordered.push_back(&r);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const DistillationRecord* a, const DistillationRecord* b) { return a->query.id < b->query.id; });

    std::string out;
    for (const auto* r : ordered) {
        json messages = json::array();
        for (const auto& m : build_prompt(r->query, r->candidates, tmpl)) {
            messages.push_back({{"role", m.role}, {"content", m.content}});
        }
        messages.push_back({{"role", "assistant"}, {"content", r->target_text}});
        json meta = {{"schema", kSftSchema},
                     {"query_id", r->query.id},
                     {"prompt_template", tmpl.version},
                     {"prompt_hash", hash},
                     {"target_sample_index", r->target_sample_index},
                     {"target_len", r->target_len},
                     {"target_score", r->target_score}};
        out += dump_line(json{{"messages", messages}, {"meta", meta}}) + "\n";
    }
    write_file(path, out);
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw ValidationError("unknown report format '" + s + "' (expected json or csv)");
}

std::string canonical_json(const json& j) {
    std::string out;
    canonical_into(j, out, 0);
    out += "\n";
    return out;
}

json to_json(const EvalReport& r) {
    json per_query = json::object();
    for (const auto& [qid, e] : r.per_query) {
        per_query[qid] = {{"ndcg10", real(e.ndcg10)}, {"gen_len", real(e.gen_len)}, {"n_samples", e.n_samples}};
    }
    return {{"kind", "eval"},
            {"model_tag", r.model_tag},
            {"mean_ndcg10", real(r.mean_ndcg10)},
            {"mean_len", real(r.mean_len)},
            {"n_queries", r.per_query.size()},
            {"per_query", per_query},
            {"length_buckets", buckets_to_json(r.length_buckets)},
            {"warnings", r.warnings},
            {"metadata",
             {{"metric", "ndcg@10"},
              {"gain", "2^grade - 1"},
              {"discount", "log2(rank + 1)"},
              {"ideal_dcg", "all judged documents of the query"},
              {"zero_ideal_dcg", "score 0"},
              {"ties", "flattened in stated order"},
              {"per_query", "mean over samples; unparseable outputs score 0"}}}};
}

json to_json(const RedundancySummary& r) {
    json per_sample = json::array();
    for (const auto& s : r.per_sample) {
        per_sample.push_back({{"query_id", s.query_id},
                              {"sample_index", s.sample_index},
                              {"seq_len", s.metrics.seq_len},
                              {"t_star", s.metrics.t_star},
                              {"trr", real(s.metrics.trr)},
                              {"mor", real(s.metrics.mor)}});
    }
    return {{"kind", "redundancy"},
            {"model_tag", r.model_tag},
            {"avg_trr", real(r.avg_trr)},
            {"avg_mor", real(r.avg_mor)},
            {"n_traces", r.n_traces},
            {"per_sample", per_sample},
            {"metadata",
             {{"ranking_equality", "tie-aware"},
              {"t_star", "index of the last first occurrence"},
              {"empty_sequence", "trr 0, mor 0, excluded from averages"}}}};
}

json to_json(const FilterReport& r) {
    json stats = json::array();
    for (const auto& s : r.stats) {
        stats.push_back({{"query_id", s.query_id},
                         {"n_sampled", s.n_sampled},
                         {"n_valid", s.n_valid},
                         {"mean_score", real(s.mean_score)},
                         {"mean_len", real(s.mean_len)},
                         {"efficient_indices", s.efficient_indices},
                         {"retained", s.retained}});
    }
    return {{"kind", "filter"},
            {"retention_rate", real(r.retention_rate)},
            {"n_queries", r.n_queries},
            {"n_retained", r.n_retained},
            {"stats", stats}};
}

json to_json(const ComparisonReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"model_tag", row.model_tag},
                        {"mean_ndcg10", real(row.mean_ndcg10)},
                        {"mean_len", real(row.mean_len)},
                        {"n_queries", row.n_queries}});
    }
    json curves = json::object();
    for (const auto& [tag, buckets] : r.curves) curves[tag] = buckets_to_json(buckets);
    return {{"kind", "comparison"}, {"rows", rows}, {"curves", curves}};
}

void write_report(const EvalReport& report, const std::string& path, ReportFormat format) {
    if (report.per_query.empty()) throw ValidationError("refusing to write an eval report without queries");
    if (format == ReportFormat::Json) {
        write_file(path, canonical_json(to_json(report)));
        return;
    }
    std::string out = "query_id,ndcg10,gen_len,n_samples\n";
    for (const auto& [qid, e] : report.per_query) {
        out += csv_field(qid) + "," + format_fixed(e.ndcg10) + "," + format_fixed(e.gen_len) + "," +
               std::to_string(e.n_samples) + "\n";
    }
    write_file(path, out);
}

void write_report(const RedundancySummary& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_file(path, canonical_json(to_json(report)));
        return;
    }
    write_file(path, "model_tag,avg_trr,avg_mor,n_traces\n" + csv_field(report.model_tag) + "," +
                         format_fixed(report.avg_trr) + "," + format_fixed(report.avg_mor) + "," +
                         std::to_string(report.n_traces) + "\n");
}

void write_report(const FilterReport& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_file(path, canonical_json(to_json(report)));
        return;
    }
    std::string out = "query_id,n_sampled,n_valid,mean_score,mean_len,efficient_indices,retained\n";
    for (const auto& s : report.stats) {
        std::string idx;
        for (std::size_t i = 0; i < s.efficient_indices.size(); ++i) {
            if (i > 0) idx += ';';
            idx += std::to_string(s.efficient_indices[i]);
        }
        out += csv_field(s.query_id) + "," + std::to_string(s.n_sampled) + "," + std::to_string(s.n_valid) + "," +
               format_fixed(s.mean_score) + "," + format_fixed(s.mean_len) + "," + idx + "," +
               (s.retained ? "true" : "false") + "\n";
    }
    write_file(path, out);
}

void write_report(const ComparisonReport& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_file(path, canonical_json(to_json(report)));
        return;
    }
    std::string out = "model_tag,mean_ndcg10,mean_len,n_queries\n";
    for (const auto& row : report.rows) {
        out += csv_field(row.model_tag) + "," + format_fixed(row.mean_ndcg10) + "," + format_fixed(row.mean_len) +
               "," + std::to_string(row.n_queries) + "\n";
    }
    write_file(path, out);
}

void write_curve_csv(const ComparisonReport& report, const std::string& path) {
    std::string out = "model_tag,len_lo,len_hi,mean_ndcg10,count\n";
    for (const auto& row : report.rows) {
        for (const auto& b : report.curves.at(row.model_tag)) {
            out += csv_field(row.model_tag) + "," + format_fixed(b.len_lo) + "," + format_fixed(b.len_hi) + "," +
                   format_fixed(b.mean_ndcg10) + "," + std::to_string(b.count) + "\n";
        }
    }
    write_file(path, out);
}

EvalReport read_eval_report(const std::string& path) {
    const json j = parse_report_file(path);
    try {
        if (j.at("kind").get<std::string>() != "eval") throw ParseError(path, 1, "not an eval report");
        EvalReport r;
        r.model_tag = j.at("model_tag").get<std::string>();
        r.mean_ndcg10 = j.at("mean_ndcg10").get<double>();
        r.mean_len = j.at("mean_len").get<double>();
        for (const auto& [qid, e] : j.at("per_query").items()) {
            r.per_query[qid] = {e.at("ndcg10").get<double>(), e.at("gen_len").get<double>(),
                                e.at("n_samples").get<int>()};
        }
        r.length_buckets = buckets_from_json(j.at("length_buckets"));
        r.warnings = j.value("warnings", std::vector<std::string>{});
        validate(r);
        return r;
    } catch (const json::exception& e) {
        throw ParseError(path, 1, std::string("malformed eval report: ") + e.what());
    } catch (const ValidationError& e) {
        throw ParseError(path, 1, e.what());
    }
}

RedundancySummary read_redundancy_summary(const std::string& path) {
    const json j = parse_report_file(path);
    try {
        if (j.at("kind").get<std::string>() != "redundancy") throw ParseError(path, 1, "not a redundancy report");
        RedundancySummary r;
        r.model_tag = j.at("model_tag").get<std::string>();
        r.avg_trr = j.at("avg_trr").get<double>();
        r.avg_mor = j.at("avg_mor").get<double>();
        r.n_traces = j.at("n_traces").get<int>();
        for (const auto& s : j.at("per_sample")) {
            r.per_sample.push_back({s.at("query_id").get<std::string>(), s.at("sample_index").get<int>(),
                                    {s.at("seq_len").get<int>(), s.at("t_star").get<int>(), s.at("trr").get<double>(),
                                     s.at("mor").get<double>()}});
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(path, 1, std::string("malformed redundancy report: ") + e.what());
    }
}

FilterReport read_filter_report(const std::string& path) {
    const json j = parse_report_file(path);
    try {
        if (j.at("kind").get<std::string>() != "filter") throw ParseError(path, 1, "not a filter report");
        FilterReport r;
        r.retention_rate = j.at("retention_rate").get<double>();
        r.n_queries = j.at("n_queries").get<int>();
        r.n_retained = j.at("n_retained").get<int>();
        for (const auto& s : j.at("stats")) {
            QueryFilterStats st;
            st.query_id = s.at("query_id").get<std::string>();
            st.n_sampled = s.at("n_sampled").get<int>();
            st.n_valid = s.at("n_valid").get<int>();
            st.mean_score = s.at("mean_score").get<double>();
            st.mean_len = s.at("mean_len").get<double>();
            st.efficient_indices = s.at("efficient_indices").get<std::vector<int>>();
            st.retained = s.at("retained").get<bool>();
            r.stats.push_back(std::move(st));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(path, 1, std::string("malformed filter report: ") + e.what());
    }
}

}  // namespace rrd
