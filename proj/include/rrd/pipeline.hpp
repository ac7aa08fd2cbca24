#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrd/config.hpp"
#include "rrd/persistence.hpp"

namespace rrd {

/// Process exit codes shared by every stage.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitRuntime = 2,
};

enum class BackendKind { Mock, Http };

BackendKind backend_kind_from_string(const std::string& s);

struct SampleStageArgs {
    std::string topics_path;      // qid<TAB>text
    std::string run_path;         // TREC run with first-stage candidates
    std::string collection_path;  // docid<TAB>text
    std::string qrels_path;       // grades the mock backend ranks by; optional
    int depth = 20;
    std::string profile = "distill";
    BackendKind backend = BackendKind::Mock;
    std::optional<std::uint64_t> seed;
    std::optional<int> k_samples;
    std::string retriever_tag;
    std::string samples_out;
    std::string candidates_out;
};

/// Samples K trajectories per query and writes the sample and candidate
/// stores. Queries whose every request failed are skipped and summarized;
/// the stage then returns kExitRuntime.
int run_sample_stage(const SampleStageArgs& args, const PipelineConfig& config, std::ostream& log);

struct EvaluateStageArgs {
    std::string samples_path;
    std::string qrels_path;
    std::string report_out;
    std::string scored_out;  // optional scored sample store
    std::string model_tag;
    int bucket_count = 5;
    ReportFormat format = ReportFormat::Json;
};

int run_evaluate_stage(const EvaluateStageArgs& args, std::ostream& log);

struct BuildCorpusStageArgs {
    std::string samples_path;     // scored samples
    std::string candidates_path;  // written by the sample stage
    std::string corpus_out;
    std::string stats_out;
    bool allow_empty = true;
    ReportFormat format = ReportFormat::Json;
};

int run_build_corpus_stage(const BuildCorpusStageArgs& args, const PipelineConfig& config, std::ostream& log);

struct AnalyzeStageArgs {
    std::string samples_path;
    std::string report_out;
    std::string model_tag;
    ReportFormat format = ReportFormat::Json;
};

int run_analyze_stage(const AnalyzeStageArgs& args, std::ostream& log);

struct ReportStageArgs {
    std::vector<std::string> report_paths;
    std::string report_out;
    std::string curve_out;  // optional CSV of the length/nDCG curves
    int bucket_count = 5;
    ReportFormat format = ReportFormat::Json;
};

int run_report_stage(const ReportStageArgs& args, std::ostream& log);

/// Runs `fn`, mapping ValidationError/ParseError to kExitValidation and any
/// other failure to kExitRuntime, with the message written to `log`.
template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        log << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace rrd
