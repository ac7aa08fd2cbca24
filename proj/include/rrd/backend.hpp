#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrd/model.hpp"
#include "rrd/prompt.hpp"

namespace rrd {

struct GenerationRequest {
    std::string query_id;
    int sample_index = 1;
    const CandidateSet* candidates = nullptr;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    double top_p = 0.95;
    int max_tokens = 8192;
    std::optional<std::uint64_t> seed;
    std::string model;
};

struct GenerationResult {
    std::string raw_text;
    std::optional<std::int64_t> endpoint_token_count;
    FinishReason finish_reason = FinishReason::Stop;
    std::int64_t latency_ms = 0;
};

/// A failed generation call. Transient failures (rate limits, 5xx, timeouts,
/// connection resets) are retried by the sampler; others are not.
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& what, bool transient) : std::runtime_error(what), transient_(transient) {}
    bool transient() const { return transient_; }

private:
    bool transient_;
};

class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;

    virtual GenerationResult generate(const GenerationRequest& request) = 0;

    /// `n` completions for one prompt. The default issues `n` calls with
    /// consecutive sample indices.
    virtual std::vector<GenerationResult> generate_n(const GenerationRequest& request, int n);

    /// Human-readable endpoint identity used in error messages.
    virtual std::string describe() const = 0;
};

/// Per-sample seed derived from the run seed, query and sample index.
std::uint64_t sample_seed(std::uint64_t seed, const std::string& query_id, int sample_index);

}  // namespace rrd
