#include "rrd/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

namespace rrd {

InFlightLimiter::InFlightLimiter(int limit) : limit_(limit) {
    if (limit < 1) throw ValidationError("in-flight limit must be >= 1");
}

void InFlightLimiter::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
    peak_ = std::max(peak_, in_flight_);
}

void InFlightLimiter::release() {
    {
        std::lock_guard lock(mu_);
        --in_flight_;
    }
    cv_.notify_one();
}

int InFlightLimiter::in_flight() const {
    std::lock_guard lock(mu_);
    return in_flight_;
}

int InFlightLimiter::peak() const {
    std::lock_guard lock(mu_);
    return peak_;
}

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
    const double scaled = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt - 2);
    return std::chrono::milliseconds(
        static_cast<std::int64_t>(std::min(scaled, static_cast<double>(max_backoff.count()))));
}

namespace {

struct Slot {
    std::optional<GenerationResult> result;
    std::string error;
};

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& call) -> decltype(call()) {
    const int attempts = std::max(policy.max_attempts, 1);
    for (int attempt = 1;; ++attempt) {
        try {
            return call();
        } catch (const BackendError& e) {
            if (!e.transient() || attempt >= attempts) throw;
        }
        const auto wait = policy.backoff_before(attempt + 1);
        if (policy.sleep) {
            policy.sleep(wait);
        } else {
            std::this_thread::sleep_for(wait);
        }
    }
}

class LimiterGuard {
public:
    explicit LimiterGuard(InFlightLimiter& l) : l_(l) { l_.acquire(); }
    ~LimiterGuard() { l_.release(); }
    LimiterGuard(const LimiterGuard&) = delete;
    LimiterGuard& operator=(const LimiterGuard&) = delete;

private:
    InFlightLimiter& l_;
};

TrajectorySample failed_sample(const std::string& query_id, int sample_index, const std::string& error,
                               const std::string& prompt_hash) {
    TrajectorySample s;
    s.query_id = query_id;
    s.sample_index = sample_index;
    s.valid = false;
    s.finish_reason = FinishReason::Error;
    s.error = error;
    s.prompt_hash = prompt_hash;
    return s;
}

}  // namespace

TrajectorySample make_sample(const std::string& query_id, int sample_index, const GenerationResult& result,
                             const CandidateSet& candidates, const DelimiterMarkers& markers,
                             const std::string& prompt_hash, bool use_endpoint_counts) {
    TrajectorySample s;
    s.query_id = query_id;
    s.sample_index = sample_index;
    s.raw_text = result.raw_text;
    s.finish_reason = result.finish_reason;
    s.prompt_hash = prompt_hash;

    const auto split = split_reasoning(result.raw_text, markers);
    s.reasoning_text = split.reasoning;
    s.split_mode = split.mode;
    for (auto& m : extract_rankings(result.raw_text, candidates)) s.ranking_sequence.push_back(std::move(m.ranking));

    if (use_endpoint_counts && result.endpoint_token_count) {
        s.token_len = count_tokens(result.raw_text, EndpointReported{*result.endpoint_token_count});
        s.token_provenance = TokenProvenance::EndpointReported;
    } else {
        s.token_len = count_tokens(result.raw_text, Approximate{});
        s.token_provenance = TokenProvenance::Approximated;
    }

    if (auto parsed = parse_final_ranking(result.raw_text, candidates)) {
        s.final_ranking = std::move(parsed->ranking);
        s.coverage = parsed->coverage;
        s.valid = result.finish_reason == FinishReason::Stop;
        if (!s.valid) s.error = "generation " + to_string(result.finish_reason) + " before a final answer";
    } else {
        s.valid = false;
        s.error = "no ranking pattern in output";
    }
    validate(s);
    return s;
}

std::vector<TrajectorySample> sample_trajectories(const Query& query, const CandidateSet& candidates,
                                                  const SamplingConfig& config, GenerationBackend& backend,
                                                  const SamplerOptions& options, InFlightLimiter* limiter) {
    validate(config);
    if (candidates.query_id() != query.id) {
        throw ValidationError("candidate set belongs to '" + candidates.query_id() + "', not '" + query.id + "'");
    }
    const std::string hash = prompt_hash(options.prompt);
    GenerationRequest base;
    base.query_id = query.id;
    base.candidates = &candidates;
    base.messages = build_prompt(query, candidates, options.prompt);
    base.temperature = config.temperature;
    base.top_p = config.top_p;
    base.max_tokens = config.max_tokens;
    base.seed = config.seed;
    base.model = config.model_name;

    InFlightLimiter own_limiter(config.max_in_flight);
    InFlightLimiter& accounting = limiter != nullptr ? *limiter : own_limiter;
    const int k = config.k_samples;
    std::vector<Slot> slots(static_cast<std::size_t>(k));

    if (options.mode == RequestMode::SingleN) {
        try {
            LimiterGuard guard(accounting);
            base.sample_index = 1;
            auto results = with_retries(options.retry, [&] { return backend.generate_n(base, k); });
            if (static_cast<int>(results.size()) != k) {
                throw BackendError("backend returned " + std::to_string(results.size()) + " of " +
                                       std::to_string(k) + " completions",
                                   false);
            }
            for (int i = 0; i < k; ++i) slots[i].result = std::move(results[i]);
        } catch (const std::exception& e) {
            for (auto& s : slots) s.error = e.what();
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next++; i < k; i = next++) {
                GenerationRequest req = base;
                req.sample_index = i + 1;
                try {
                    LimiterGuard guard(accounting);
                    slots[i].result = with_retries(options.retry, [&] { return backend.generate(req); });
                } catch (const std::exception& e) {
                    slots[i].error = e.what();
                }
            }
        };
        const int n_workers = std::min(k, config.max_in_flight);
        if (n_workers == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(static_cast<std::size_t>(n_workers));
            for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        }
    }

    std::vector<TrajectorySample> out;
    out.reserve(slots.size());
    int failures = 0;
    std::string last_error;
    for (int i = 0; i < k; ++i) {
        if (slots[i].result) {
            try {
                out.push_back(make_sample(query.id, i + 1, *slots[i].result, candidates, options.markers, hash,
                                           options.use_endpoint_counts));
                continue;
            } catch (const ValidationError& e) {
                slots[i].error = std::string("malformed endpoint response: ") + e.what();
            }
        }
        ++failures;
        last_error = slots[i].error;
        out.push_back(failed_sample(query.id, i + 1, slots[i].error, hash));
    }
    if (failures == k) {
        throw QueryError("query '" + query.id + "': all " + std::to_string(k) + " requests to " +
                         backend.describe() + " failed (last error: " + last_error + ")");
    }
    return out;
}

}  // namespace rrd
