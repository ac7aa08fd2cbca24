// Command-line front end: sample -> evaluate -> build-corpus -> analyze-redundancy -> report.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrd/pipeline.hpp"

namespace {

rrd::PipelineConfig load_config(const std::string& path) {
    return path.empty() ? rrd::default_pipeline_config() : rrd::load_pipeline_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sample, filter and analyze reasoning-reranker trajectories"};
    app.require_subcommand(1);

    std::string config_path;
    std::string format = "json";
    app.add_option("--config", config_path, "Pipeline config (JSON)");

    // sample
    rrd::SampleStageArgs sample;
    std::string backend = "mock";
    std::optional<std::uint64_t> seed;
    std::optional<int> k;
    auto* cmd_sample = app.add_subcommand("sample", "Draw K trajectories per query");
    cmd_sample->add_option("--topics", sample.topics_path, "Topics file (qid<TAB>text)")->required();
    cmd_sample->add_option("--run", sample.run_path, "First-stage TREC run file")->required();
    cmd_sample->add_option("--collection", sample.collection_path, "Passages (docid<TAB>text)")->required();
    cmd_sample->add_option("--qrels", sample.qrels_path, "Grades the mock backend ranks by");
    cmd_sample->add_option("--depth", sample.depth, "Candidates per query")->capture_default_str();
    cmd_sample->add_option("--profile", sample.profile, "Sampling profile (distill|eval)")->capture_default_str();
    cmd_sample->add_option("--backend", backend, "mock|http")->capture_default_str();
    cmd_sample->add_option("--seed", seed, "Sampling seed");
    cmd_sample->add_option("-k,--samples-per-query", k, "Override the profile's K");
    cmd_sample->add_option("--retriever-tag", sample.retriever_tag, "Label stored with each candidate set");
    cmd_sample->add_option("--out", sample.samples_out, "Sample store (JSON lines)")->required();
    cmd_sample->add_option("--candidates-out", sample.candidates_out, "Candidate store (JSON lines)")->required();

    // evaluate
    rrd::EvaluateStageArgs evaluate;
    auto* cmd_eval = app.add_subcommand("evaluate", "Score samples with nDCG@10 and report quality vs length");
    cmd_eval->add_option("--samples", evaluate.samples_path, "Sample store")->required();
    cmd_eval->add_option("--qrels", evaluate.qrels_path, "TREC qrels")->required();
    cmd_eval->add_option("--out", evaluate.report_out, "Evaluation report")->required();
    cmd_eval->add_option("--scored-out", evaluate.scored_out, "Sample store with scores attached");
    cmd_eval->add_option("--model-tag", evaluate.model_tag, "Label for this run");
    cmd_eval->add_option("--buckets", evaluate.bucket_count, "Length buckets")->capture_default_str();
    cmd_eval->add_option("--format", format, "json|csv")->capture_default_str();

    // build-corpus
    rrd::BuildCorpusStageArgs corpus;
    bool strict_nonempty = false;
    auto* cmd_corpus = app.add_subcommand("build-corpus", "Filter scored samples into a fine-tuning corpus");
    cmd_corpus->add_option("--samples", corpus.samples_path, "Scored sample store")->required();
    cmd_corpus->add_option("--candidates", corpus.candidates_path, "Candidate store from the sample stage")->required();
    cmd_corpus->add_option("--out", corpus.corpus_out, "Corpus (JSON lines)")->required();
    cmd_corpus->add_option("--stats-out", corpus.stats_out, "Per-query filter statistics");
    cmd_corpus->add_flag("--require-nonempty", strict_nonempty, "Fail when no query is retained");
    cmd_corpus->add_option("--format", format, "json|csv for the statistics")->capture_default_str();

    // analyze-redundancy
    rrd::AnalyzeStageArgs analyze;
    auto* cmd_analyze = app.add_subcommand("analyze-redundancy", "Tail-repeat and multi-occurrence ratios");
    cmd_analyze->add_option("--samples", analyze.samples_path, "Sample store")->required();
    cmd_analyze->add_option("--out", analyze.report_out, "Redundancy report")->required();
    cmd_analyze->add_option("--model-tag", analyze.model_tag, "Label for this run");
    cmd_analyze->add_option("--format", format, "json|csv")->capture_default_str();

    // report
    rrd::ReportStageArgs report;
    auto* cmd_report = app.add_subcommand("report", "Merge evaluation reports into comparison rows and curves");
    cmd_report->add_option("--reports", report.report_paths, "Evaluation reports (JSON)")->required();
    cmd_report->add_option("--out", report.report_out, "Comparison report")->required();
    cmd_report->add_option("--curve-out", report.curve_out, "Length/nDCG curve CSV");
    cmd_report->add_option("--buckets", report.bucket_count, "Length buckets")->capture_default_str();
    cmd_report->add_option("--format", format, "json|csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? rrd::kExitOk : rrd::kExitValidation;
    }

    return rrd::guarded(std::cerr, [&]() -> int {
        const auto fmt = rrd::report_format_from_string(format);
        if (*cmd_sample) {
            sample.backend = rrd::backend_kind_from_string(backend);
            sample.seed = seed;
            sample.k_samples = k;
            return rrd::run_sample_stage(sample, load_config(config_path), std::cerr);
        }
        if (*cmd_eval) {
            evaluate.format = fmt;
            return rrd::run_evaluate_stage(evaluate, std::cerr);
        }
        if (*cmd_corpus) {
            corpus.format = fmt;
            corpus.allow_empty = !strict_nonempty;
            return rrd::run_build_corpus_stage(corpus, load_config(config_path), std::cerr);
        }
        if (*cmd_analyze) {
            analyze.format = fmt;
            return rrd::run_analyze_stage(analyze, std::cerr);
        }
        report.format = fmt;
        return rrd::run_report_stage(report, std::cerr);
    });
}
