#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrd/backend.hpp"
#include "rrd/model.hpp"
#include "rrd/prompt.hpp"
#include "rrd/trace_parser.hpp"

namespace rrd {

/// Counts outstanding requests and blocks callers beyond the limit.
class InFlightLimiter {
public:
    explicit InFlightLimiter(int limit);

    void acquire();
    void release();

    int in_flight() const;
    int peak() const;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    int limit_;
    int in_flight_ = 0;
    int peak_ = 0;
};

/// Exponential backoff for transient backend failures.
struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{30000};
    /// Injectable for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;

    std::chrono::milliseconds backoff_before(int attempt) const;  // attempt >= 2
};

enum class RequestMode {
    Independent,  // K separate requests
    SingleN,      // one request asking for n = K choices
};

struct SamplerOptions {
    PromptTemplate prompt = default_prompt_template();
    DelimiterMarkers markers;
    RetryPolicy retry;
    RequestMode mode = RequestMode::Independent;
    /// Use the server's completion-token count when it reports one.
    bool use_endpoint_counts = true;
};

/// Every sample of a query failed at the backend.
class QueryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses one generation into a trajectory sample. Samples truncated at
/// max_tokens are kept but marked invalid.
TrajectorySample make_sample(const std::string& query_id, int sample_index, const GenerationResult& result,
                             const CandidateSet& candidates, const DelimiterMarkers& markers,
                             const std::string& prompt_hash, bool use_endpoint_counts = true);

/// Draws config.k_samples trajectories, at most config.max_in_flight at a
/// time. The result is ordered by sample_index whatever the completion order.
std::vector<TrajectorySample> sample_trajectories(const Query& query, const CandidateSet& candidates,
                                                  const SamplingConfig& config, GenerationBackend& backend,
                                                  const SamplerOptions& options = {},
                                                  InFlightLimiter* limiter = nullptr);

}  // namespace rrd
