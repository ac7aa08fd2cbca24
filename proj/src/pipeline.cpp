#include "rrd/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <set>

#include "rrd/distiller.hpp"
#include "rrd/http_backend.hpp"
#include "rrd/metrics.hpp"
#include "rrd/mock_backend.hpp"
#include "rrd/sampler.hpp"

namespace rrd {

namespace {

void require_input(const std::string& path, const std::string& what) {
    if (path.empty()) throw ValidationError(what + " path is required");
    if (!std::filesystem::is_regular_file(path)) throw ValidationError(what + " '" + path + "' does not exist");
}

void require_output(const std::string& path, const std::string& what) {
    if (path.empty()) throw ValidationError(what + " path is required");
}

void print_warnings(std::ostream& log, const Warnings& warnings) {
    for (const auto& w : warnings) log << "warning: " << w << "\n";
}

std::unique_ptr<GenerationBackend> make_backend(const SampleStageArgs& args, const PipelineConfig& config,
                                                std::uint64_t seed, std::ostream& log) {
    if (args.backend == BackendKind::Mock) {
        Qrels oracle;
        if (!args.qrels_path.empty()) {
            require_input(args.qrels_path, "qrels");
            Warnings w;
            oracle = read_qrels(args.qrels_path, &w);
            print_warnings(log, w);
        }
        return std::make_unique<MockBackend>(config.mock, std::move(oracle), seed);
    }
    HttpBackendOptions opts;
    opts.endpoint_url = config.endpoint_url;
    opts.model = config.model_name;
    opts.timeout = config.timeout;
    if (!config.api_key_env.empty()) {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (key == nullptr) {
            throw ValidationError("environment variable '" + config.api_key_env + "' (endpoint.api_key_env) is not set");
        }
        opts.api_key = key;
    }
    return std::make_unique<HttpChatBackend>(std::move(opts));
}

}  // namespace

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "mock") return BackendKind::Mock;
    if (s == "http") return BackendKind::Http;
    throw ValidationError("unknown backend '" + s + "' (expected mock or http)");
}

int run_sample_stage(const SampleStageArgs& args, const PipelineConfig& config, std::ostream& log) {
    require_input(args.topics_path, "topics file");
    require_input(args.run_path, "run file");
    require_input(args.collection_path, "collection file");
    require_output(args.samples_out, "samples output");
    require_output(args.candidates_out, "candidates output");
    if (args.depth < 1) throw ValidationError("--depth must be >= 1");

    SamplingConfig sampling = config.profile(args.profile);
    if (args.k_samples) sampling.k_samples = *args.k_samples;
    if (args.seed) sampling.seed = args.seed;
    validate(sampling);
    const std::uint64_t seed = sampling.seed.value_or(0);

    const auto topics = read_topics(args.topics_path);
    Warnings warnings;
    const auto run = read_run(args.run_path, args.depth, &warnings);
    print_warnings(log, warnings);

    std::set<std::string> wanted;
    for (const auto& [qid, docs] : run) wanted.insert(docs.begin(), docs.end());
    const auto collection = read_collection(args.collection_path, &wanted);

    std::map<std::string, Query> queries;
    for (const auto& q : topics) queries.emplace(q.id, q);

    std::vector<QueryCandidates> items;
    for (const auto& [qid, q] : queries) {
        auto it = run.find(qid);
        if (it == run.end()) {
            log << "warning: query '" << qid << "' has no candidates in the run file; skipped\n";
            continue;
        }
        if (static_cast<int>(it->second.size()) < args.depth) {
            log << "warning: query '" << qid << "' has only " << it->second.size() << " candidates (depth "
                << args.depth << ")\n";
        }
        std::vector<CandidateDoc> docs;
        for (const auto& doc_id : it->second) {
            auto text = collection.find(doc_id);
            if (text == collection.end()) {
                throw ValidationError("document '" + doc_id + "' is missing from " + args.collection_path);
            }
            docs.emplace_back(doc_id, text->second);
        }
        items.push_back({q, CandidateSet(qid, std::move(docs), args.retriever_tag)});
    }
    if (items.empty()) throw ValidationError("no query in the topics file has candidates in the run file");

    auto backend = make_backend(args, config, seed, log);
    const SamplerOptions options = config.sampler_options();

    std::vector<TrajectorySample> all;
    std::vector<QueryCandidates> sampled;
    std::vector<std::string> failures;
    std::size_t done = 0;
    for (const auto& item : items) {
        ++done;
        try {
            auto samples = sample_trajectories(item.query, item.candidates, sampling, *backend, options);
            int n_valid = 0;
            for (const auto& s : samples) n_valid += s.valid ? 1 : 0;
            log << "[" << done << "/" << items.size() << "] " << item.query.id << ": " << n_valid << "/"
                << samples.size() << " parseable\n";
            all.insert(all.end(), std::make_move_iterator(samples.begin()), std::make_move_iterator(samples.end()));
            sampled.push_back(item);
        } catch (const QueryError& e) {
            log << "[" << done << "/" << items.size() << "] " << item.query.id << ": FAILED\n";
            failures.push_back(e.what());
        }
    }

    write_samples(all, args.samples_out);
    write_candidates(sampled, args.candidates_out);
    if (!failures.empty()) {
        log << failures.size() << " of " << items.size() << " queries failed:\n";
        for (const auto& f : failures) log << "  " << f << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_evaluate_stage(const EvaluateStageArgs& args, std::ostream& log) {
    require_input(args.samples_path, "samples file");
    require_input(args.qrels_path, "qrels file");
    require_output(args.report_out, "report output");

    Warnings warnings;
    const Qrels qrels = read_qrels(args.qrels_path, &warnings);
    print_warnings(log, warnings);
    auto samples = score_samples(read_samples(args.samples_path), qrels);
    if (samples.empty()) throw ValidationError("samples file '" + args.samples_path + "' is empty");

    std::vector<RunPoint> points;
    points.reserve(samples.size());
    for (const auto& s : samples) {
        points.push_back({s.query_id, s.valid ? s.final_ranking : std::nullopt, static_cast<double>(s.token_len)});
    }
    const auto report = aggregate_report(points, qrels, args.bucket_count, args.model_tag);
    for (const auto& w : report.warnings) log << "warning: " << w << "\n";

    write_report(report, args.report_out, args.format);
    if (!args.scored_out.empty()) write_samples(samples, args.scored_out);
    log << "evaluated " << samples.size() << " samples over " << report.per_query.size()
        << " queries: mean nDCG@10 " << report.mean_ndcg10 << ", mean length " << report.mean_len << "\n";
    return kExitOk;
}

int run_build_corpus_stage(const BuildCorpusStageArgs& args, const PipelineConfig& config, std::ostream& log) {
    require_input(args.samples_path, "scored samples file");
    require_input(args.candidates_path, "candidates file");
    require_output(args.corpus_out, "corpus output");

    std::map<std::string, QueryCandidates> candidates;
    for (auto& c : read_candidates(args.candidates_path)) candidates.emplace(c.query.id, std::move(c));

    std::map<std::string, QueryInput> per_query;
    for (auto& s : read_samples(args.samples_path)) {
        auto it = per_query.find(s.query_id);
        if (it == per_query.end()) {
            auto c = candidates.find(s.query_id);
            if (c == candidates.end()) {
                throw ValidationError("query '" + s.query_id + "' has samples but no entry in " + args.candidates_path);
            }
            it = per_query.emplace(s.query_id, QueryInput{c->second.query, c->second.candidates, {}}).first;
        }
        it->second.samples.push_back(std::move(s));
    }

    const auto result = build_corpus(per_query);
    write_sft_corpus(result.corpus, config.prompt, args.corpus_out, args.allow_empty);

    FilterReport report;
    report.stats = result.stats;
    report.retention_rate = result.retention_rate;
    report.n_queries = static_cast<int>(per_query.size());
    report.n_retained = static_cast<int>(result.corpus.size());
    if (!args.stats_out.empty()) write_report(report, args.stats_out, args.format);
    log << "retained " << report.n_retained << " of " << report.n_queries << " queries (retention "
        << report.retention_rate << ")\n";
    return kExitOk;
}

int run_analyze_stage(const AnalyzeStageArgs& args, std::ostream& log) {
    require_input(args.samples_path, "samples file");
    require_output(args.report_out, "report output");
    const auto summary = summarize_redundancy(read_samples(args.samples_path), args.model_tag);
    write_report(summary, args.report_out, args.format);
    log << "analyzed " << summary.per_sample.size() << " traces (" << summary.n_traces
        << " with rankings): avg TRR " << summary.avg_trr << ", avg MOR " << summary.avg_mor << "\n";
    return kExitOk;
}

int run_report_stage(const ReportStageArgs& args, std::ostream& log) {
    if (args.report_paths.empty()) throw ValidationError("at least one eval report is required");
    require_output(args.report_out, "report output");
    std::vector<EvalReport> reports;
    for (const auto& p : args.report_paths) {
        require_input(p, "eval report");
        reports.push_back(read_eval_report(p));
    }
    const auto merged = compare_reports(reports, args.bucket_count);
    write_report(merged, args.report_out, args.format);
    if (!args.curve_out.empty()) write_curve_csv(merged, args.curve_out);
    log << "merged " << reports.size() << " report(s)\n";
    return kExitOk;
}

}  // namespace rrd
