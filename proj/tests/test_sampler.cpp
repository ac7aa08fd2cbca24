#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "rrd/metrics.hpp"
#include "rrd/mock_backend.hpp"
#include "rrd/prompt.hpp"
#include "rrd/sampler.hpp"
#include "rrd/trace_parser.hpp"
#include "test_support.hpp"

using namespace rrd;

namespace {

Qrels graded_oracle(const std::string& qid = "q1") {
    Qrels q;
    q.set(qid, "d1", 0);
    q.set(qid, "d2", 1);
    q.set(qid, "d3", 3);
    q.set(qid, "d4", 0);
    q.set(qid, "d5", 2);
    return q;
}

MockArchetype archetype(MockQuality quality, int filler, int restatements, int loops) {
    MockArchetype a;
    a.name = to_string(quality);
    a.quality = quality;
    a.filler_sentences = filler;
    a.restatements = restatements;
    a.revert_loops = loops;
    return a;
}

MockProfile single(MockArchetype a) {
    MockProfile p;
    p.archetypes = {std::move(a)};
    return p;
}

SamplingConfig config_k(int k, int in_flight = 4) {
    SamplingConfig c = distill_profile();
    c.k_samples = k;
    c.max_in_flight = in_flight;
    c.seed = 7;
    return c;
}

SamplerOptions no_sleep_options() {
    SamplerOptions o;
    o.retry.sleep = [](std::chrono::milliseconds) {};
    return o;
}

// Answers with "[i] > ..." after a random delay and records how many calls
// overlap.
class JitterBackend : public GenerationBackend {
public:
    GenerationResult generate(const GenerationRequest& req) override {
        const int now = ++active_;
        {
            std::lock_guard lock(mu_);
            peak_ = std::max(peak_, now);
            delay_ = std::uniform_int_distribution<int>(0, 3000)(rng_);
        }
        std::this_thread::sleep_for(std::chrono::microseconds(delay_));
        --active_;
        GenerationResult r;
        r.raw_text = "<think>sample " + std::to_string(req.sample_index) + "</think>\n[" +
                     std::to_string(req.sample_index % 3 + 1) + "] > [4]";
        return r;
    }
    std::string describe() const override { return "jitter://"; }
    int peak() const { return peak_; }

private:
    std::atomic<int> active_{0};
    std::mutex mu_;
    std::mt19937 rng_{3};
    int delay_ = 0;
    int peak_ = 0;
};

class ScriptedBackend : public GenerationBackend {
public:
    ScriptedBackend(int failures, bool transient) : failures_(failures), transient_(transient) {}

    GenerationResult generate(const GenerationRequest&) override {
        if (++calls_ <= failures_) throw BackendError("scripted failure", transient_);
        GenerationResult r;
        r.raw_text = "[2] > [1]";
        return r;
    }
    std::string describe() const override { return "http://dead.example:9/v1"; }
    int calls() const { return calls_; }

private:
    int failures_;
    bool transient_;
    std::atomic<int> calls_{0};
};

class CountingNBackend : public GenerationBackend {
public:
    GenerationResult generate(const GenerationRequest&) override {
        ++single_calls;
        return {};
    }
    std::vector<GenerationResult> generate_n(const GenerationRequest&, int n) override {
        ++batch_calls;
        last_n = n;
        std::vector<GenerationResult> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[i].raw_text = "[1] > [" + std::to_string(i % 2 + 2) + "]";
        return out;
    }
    std::string describe() const override { return "n://"; }

    int single_calls = 0;
    int batch_calls = 0;
    int last_n = 0;
};

std::string golden_dir() { return std::string(RRD_TEST_DATA_DIR) + "/golden"; }

}  // namespace

TEST(Prompt, Fnv1aKnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Prompt, BuildsSystemAndUserMessages) {
    const auto c = test::numbered_candidates(3);
    const auto msgs = build_prompt(Query("q1", "what is rrd"), c, default_prompt_template());
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_EQ(msgs[0].role, "system");
    EXPECT_EQ(msgs[1].role, "user");
    EXPECT_NE(msgs[1].content.find("[1] passage number 1\n[2] passage number 2\n[3] passage number 3"),
              std::string::npos);
    EXPECT_NE(msgs[1].content.find("Search Query: what is rrd"), std::string::npos);
    EXPECT_NE(msgs[1].content.find("provide you with 3 passages"), std::string::npos);
    EXPECT_EQ(msgs[1].content.find("{passages}"), std::string::npos);
}

TEST(Prompt, PlaceholderTextInsidePassagesIsLeftAlone) {
    const CandidateSet c("q1", {CandidateDoc("d1", "see {query} and {x}")});
    PromptTemplate t{"v", "sys", "{passages}|{query}|{other}"};
    const auto msgs = build_prompt(Query("q1", "Q {passages}"), c, t);
    EXPECT_EQ(msgs[1].content, "[1] see {query} and {x}|Q {passages}|{other}");
}

TEST(Prompt, MissingPlaceholderIsRejected) {
    const auto c = test::numbered_candidates(2);
    EXPECT_THROW(build_prompt(Query("q1", "x"), c, PromptTemplate{"v", "s", "{query} only"}), ValidationError);
    EXPECT_THROW(build_prompt(Query("q1", "x"), c, PromptTemplate{"v", "s", "{passages} only"}), ValidationError);
}

TEST(Prompt, ShippedTemplateMatchesDefault) {
    const auto loaded = load_prompt_template(std::string(RRD_SOURCE_DIR) + "/config/prompt_template.json");
    EXPECT_EQ(loaded, default_prompt_template());
    EXPECT_EQ(prompt_hash(loaded).size(), 16u);
    PromptTemplate other = loaded;
    other.version = "v2";
    EXPECT_NE(prompt_hash(other), prompt_hash(loaded));
}

TEST(Mock, IsDeterministicPerSeed) {
    const auto c = test::numbered_candidates(5);
    const auto profile = default_mock_profile();
    const auto a = mock_generate("q1", c, 3, 7, profile, graded_oracle());
    const auto b = mock_generate("q1", c, 3, 7, profile, graded_oracle());
    EXPECT_EQ(a.raw_text, b.raw_text);
    EXPECT_NE(a.raw_text, mock_generate("q1", c, 3, 8, profile, graded_oracle()).raw_text);
    EXPECT_NE(a.raw_text, mock_generate("q1", c, 4, 7, profile, graded_oracle()).raw_text);
}

TEST(Mock, MatchesGoldenTraces) {
    const auto c = test::numbered_candidates(5);
    MockBackend backend(default_mock_profile(), graded_oracle());
    const auto samples = sample_trajectories(Query("q1", "golden"), c, config_k(3), backend, no_sleep_options());
    std::string actual;
    for (const auto& s : samples) actual += "=== sample " + std::to_string(s.sample_index) + "\n" + s.raw_text + "\n";

    const std::string path = golden_dir() + "/mock_k3_seed7.txt";
    if (std::getenv("RRD_UPDATE_GOLDEN") != nullptr) test::write_text(path, actual);
    const std::string expected = test::read_text(path);
    ASSERT_FALSE(expected.empty()) << "missing golden file " << path << " (set RRD_UPDATE_GOLDEN=1)";
    EXPECT_EQ(actual, expected);
}

TEST(Mock, IdealArchetypeScoresOne) {
    const auto c = test::numbered_candidates(5);
    const auto oracle = graded_oracle();
    const auto r = mock_generate("q1", c, 1, 0, single(archetype(MockQuality::Ideal, 3, 2, 1)), oracle);
    const auto parsed = parse_final_ranking(r.raw_text, c);
    ASSERT_TRUE(parsed);
    EXPECT_EQ(ndcg_at_k(parsed->ranking, oracle, "q1"), 1.0);
    EXPECT_EQ(parsed->coverage, 1.0);
}

TEST(Mock, TiedArchetypeEmitsTieGroups) {
    const auto c = test::numbered_candidates(5);
    auto a = archetype(MockQuality::Ideal, 0, 0, 0);
    a.tie_equal_grades = true;
    const auto r = mock_generate("q1", c, 1, 0, single(a), graded_oracle());
    EXPECT_EQ(parse_final_ranking(r.raw_text, c)->ranking, test::grouped({{"d3"}, {"d5"}, {"d2"}, {"d1", "d4"}}));
}

TEST(Mock, RestatementsDriveRedundancy) {
    const auto c = test::numbered_candidates(6);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto plain = mock_generate("q1", c, 1, seed, single(archetype(MockQuality::Shuffled, 5, 0, 0)), {});
        const auto seq_plain = extract_rankings(plain.raw_text, c);
        ASSERT_EQ(seq_plain.size(), 1u);

        const auto verbose = mock_generate("q1", c, 1, seed, single(archetype(MockQuality::Shuffled, 5, 3, 2)), {});
        std::vector<Ranking> seq;
        for (const auto& m : extract_rankings(verbose.raw_text, c)) seq.push_back(m.ranking);
        ASSERT_EQ(seq.size(), 3u + 4u + 1u);
        EXPECT_EQ(tail_repeat_ratio({seq_plain[0].ranking}), 0.0);
        EXPECT_GT(tail_repeat_ratio(seq), 0.0);
        EXPECT_GT(multi_occurrence_ratio(seq), 0.0);
    }
}

TEST(Mock, UnparseableHasNoRanking) {
    const auto c = test::numbered_candidates(4);
    const auto r = mock_generate("q1", c, 1, 0, single(archetype(MockQuality::Unparseable, 4, 3, 1)), {});
    EXPECT_TRUE(extract_rankings(r.raw_text, c).empty());
}

TEST(Mock, FillerLengthensOutput) {
    const auto c = test::numbered_candidates(5);
    const auto shortp = single(archetype(MockQuality::Ideal, 2, 1, 0));
    const auto longp = single(archetype(MockQuality::Ideal, 40, 1, 0));
    for (int idx = 1; idx <= 10; ++idx) {
        const auto s = count_tokens(mock_generate("q1", c, idx, 1, shortp, {}).raw_text, Approximate{});
        const auto l = count_tokens(mock_generate("q1", c, idx, 1, longp, {}).raw_text, Approximate{});
        EXPECT_LT(s, l);
    }
}

TEST(Mock, SelectionModes) {
    MockProfile p;
    p.archetypes = {archetype(MockQuality::Ideal, 1, 0, 0), archetype(MockQuality::Reverse, 1, 0, 0),
                    archetype(MockQuality::Identity, 1, 0, 0)};
    for (int k = 1; k <= 9; ++k) EXPECT_EQ(mock_archetype_index("q", k, 0, p), static_cast<std::size_t>((k - 1) % 3));

    p.selection = MockSelection::Weighted;
    p.archetypes[0].weight = 3.0;
    p.archetypes[1].weight = 1.0;
    p.archetypes[2].weight = 0.0;
    std::map<std::size_t, int> counts;
    const int n = 4000;
    for (int k = 1; k <= n; ++k) ++counts[mock_archetype_index("q" + std::to_string(k % 17), k, 5, p)];
    EXPECT_EQ(counts[2], 0);
    EXPECT_NEAR(static_cast<double>(counts[0]) / n, 0.75, 0.03);

    p.archetypes[0].weight = 0.0;
    p.archetypes[1].weight = 0.0;
    EXPECT_THROW(validate(p), ValidationError);
    EXPECT_THROW(validate(MockProfile{}), ValidationError);
}

TEST(Mock, ReportsUsageWhenAsked) {
    const auto c = test::numbered_candidates(3);
    auto p = single(archetype(MockQuality::Ideal, 2, 0, 0));
    EXPECT_FALSE(mock_generate("q1", c, 1, 0, p, {}).endpoint_token_count);
    p.report_usage = true;
    const auto r = mock_generate("q1", c, 1, 0, p, {});
    ASSERT_TRUE(r.endpoint_token_count);
    EXPECT_EQ(*r.endpoint_token_count, count_tokens(r.raw_text, Approximate{}));
}

TEST(MakeSample, ParsesValidOutput) {
    const auto c = test::numbered_candidates(3);
    GenerationResult r;
    r.raw_text = "<think>[1] > [2]\nhmm</think>\n[2] > [1]";
    r.endpoint_token_count = 42;
    const auto s = make_sample("q1", 2, r, c, {}, "h");
    EXPECT_TRUE(s.valid);
    EXPECT_EQ(s.sample_index, 2);
    EXPECT_EQ(s.token_len, 42);
    EXPECT_EQ(s.token_provenance, TokenProvenance::EndpointReported);
    EXPECT_EQ(s.split_mode, SplitMode::Delimiter);
    EXPECT_EQ(s.reasoning_text, "[1] > [2]\nhmm");
    EXPECT_EQ(*s.final_ranking, Ranking::strict({"d2", "d1", "d3"}));
    EXPECT_NEAR(s.coverage, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(s.ranking_sequence.size(), 2u);

    const auto approx = make_sample("q1", 2, r, c, {}, "h", false);
    EXPECT_EQ(approx.token_provenance, TokenProvenance::Approximated);
    EXPECT_EQ(approx.token_len, count_tokens(r.raw_text, Approximate{}));
}

TEST(MakeSample, TruncatedAndUnparseableAreInvalid) {
    const auto c = test::numbered_candidates(3);
    GenerationResult r;
    r.raw_text = "thinking [1] > [2]";
    r.finish_reason = FinishReason::Length;
    const auto truncated = make_sample("q1", 1, r, c, {}, "h");
    EXPECT_FALSE(truncated.valid);
    EXPECT_FALSE(truncated.error.empty());

    r.finish_reason = FinishReason::Stop;
    r.raw_text = "no answer here";
    const auto none = make_sample("q1", 1, r, c, {}, "h");
    EXPECT_FALSE(none.valid);
    EXPECT_FALSE(none.final_ranking);
}

TEST(Sampler, SingleSampleProfile) {
    const auto c = test::numbered_candidates(5);
    MockBackend backend(default_mock_profile(), graded_oracle());
    auto cfg = eval_profile();
    const auto samples = sample_trajectories(Query("q1", "x"), c, cfg, backend);
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_EQ(samples[0].sample_index, 1);
    EXPECT_TRUE(samples[0].valid);
}

TEST(Sampler, RespectsInFlightLimitAndKeepsOrder) {
    const auto c = test::numbered_candidates(4);
    for (int limit : {1, 2, 3, 8}) {
        JitterBackend backend;
        InFlightLimiter limiter(limit);
        const auto samples =
            sample_trajectories(Query("q1", "x"), c, config_k(24, limit), backend, no_sleep_options(), &limiter);
        ASSERT_EQ(samples.size(), 24u);
        for (int i = 0; i < 24; ++i) {
            EXPECT_EQ(samples[i].sample_index, i + 1);
            EXPECT_NE(samples[i].raw_text.find("sample " + std::to_string(i + 1) + "<"), std::string::npos);
        }
        EXPECT_LE(backend.peak(), limit);
        EXPECT_LE(limiter.peak(), limit);
        EXPECT_EQ(limiter.in_flight(), 0);
        if (limit > 1) EXPECT_GT(limiter.peak(), 1);
    }
}

TEST(Sampler, RetriesTransientFailures) {
    const auto c = test::numbered_candidates(2);
    ScriptedBackend backend(2, true);
    std::vector<std::chrono::milliseconds> waits;
    SamplerOptions o;
    o.retry.sleep = [&](std::chrono::milliseconds d) { waits.push_back(d); };
    const auto samples = sample_trajectories(Query("q1", "x"), c, config_k(1, 1), backend, o);
    EXPECT_EQ(backend.calls(), 3);
    EXPECT_TRUE(samples[0].valid);
    ASSERT_EQ(waits.size(), 2u);
    EXPECT_EQ(waits[0].count(), 500);
    EXPECT_EQ(waits[1].count(), 1000);
}

TEST(Sampler, PermanentFailuresAreNotRetried) {
    const auto c = test::numbered_candidates(2);
    ScriptedBackend backend(1, false);
    const auto samples = sample_trajectories(Query("q1", "x"), c, config_k(2, 1), backend, no_sleep_options());
    EXPECT_EQ(backend.calls(), 2);
    EXPECT_FALSE(samples[0].valid);
    EXPECT_EQ(samples[0].finish_reason, FinishReason::Error);
    EXPECT_NE(samples[0].error.find("scripted failure"), std::string::npos);
    EXPECT_TRUE(samples[1].valid);
}

TEST(Sampler, AllFailuresRaiseQueryErrorNamingEndpoint) {
    const auto c = test::numbered_candidates(2);
    ScriptedBackend backend(1000, true);
    try {
        sample_trajectories(Query("q7", "x"), test::numbered_candidates(2, "q7"), config_k(3, 2), backend,
                            no_sleep_options());
        FAIL() << "expected QueryError";
    } catch (const QueryError& e) {
        EXPECT_NE(std::string(e.what()).find("http://dead.example:9/v1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("q7"), std::string::npos);
    }
    EXPECT_EQ(backend.calls(), 3 * 4);
}

TEST(Sampler, BackoffIsCapped) {
    RetryPolicy p;
    p.max_backoff = std::chrono::milliseconds(1500);
    EXPECT_EQ(p.backoff_before(2).count(), 500);
    EXPECT_EQ(p.backoff_before(3).count(), 1000);
    EXPECT_EQ(p.backoff_before(4).count(), 1500);
    EXPECT_EQ(p.backoff_before(10).count(), 1500);
}

TEST(Sampler, SingleNModeIssuesOneRequest) {
    const auto c = test::numbered_candidates(3);
    CountingNBackend backend;
    auto o = no_sleep_options();
    o.mode = RequestMode::SingleN;
    const auto samples = sample_trajectories(Query("q1", "x"), c, config_k(5), backend, o);
    EXPECT_EQ(backend.batch_calls, 1);
    EXPECT_EQ(backend.single_calls, 0);
    EXPECT_EQ(backend.last_n, 5);
    ASSERT_EQ(samples.size(), 5u);
    EXPECT_EQ(*samples[1].final_ranking, Ranking::strict({"d1", "d3", "d2"}));
}

TEST(Sampler, RejectsMismatchedCandidatesAndBadConfig) {
    MockBackend backend(default_mock_profile(), {});
    EXPECT_THROW(sample_trajectories(Query("q1", "x"), test::numbered_candidates(2, "q2"), config_k(1), backend),
                 ValidationError);
    EXPECT_THROW(sample_trajectories(Query("q1", "x"), test::numbered_candidates(2), config_k(0), backend),
                 ValidationError);
}

TEST(Sampler, AllSamplesCarryPromptHash) {
    const auto c = test::numbered_candidates(4);
    MockBackend backend(default_mock_profile(), graded_oracle());
    const auto samples = sample_trajectories(Query("q1", "x"), c, config_k(6), backend);
    for (const auto& s : samples) EXPECT_EQ(s.prompt_hash, prompt_hash(default_prompt_template()));
}
