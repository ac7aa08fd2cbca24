#include <gtest/gtest.h>

#include <random>

#include "rrd/distiller.hpp"
#include "test_support.hpp"

using namespace rrd;
using test::scored_sample;

namespace {

TrajectorySample invalid_sample(int index, std::int64_t len) {
    TrajectorySample s;
    s.query_id = "q1";
    s.sample_index = index;
    s.valid = false;
    s.token_len = len;
    s.error = "no ranking pattern in output";
    return s;
}

std::vector<int> indices(const std::vector<TrajectorySample>& xs) {
    std::vector<int> out;
    for (const auto& s : xs) out.push_back(s.sample_index);
    return out;
}

// Exact oracle over quarter-step scores and integer lengths: a sample is
// efficient iff n*s >= sum(s) and n*len < sum(len), evaluated in integers.
// E_q is found by enumerating every subset of the valid set and keeping the
// largest one whose members all pass.
struct Oracle {
    std::vector<int> efficient;
    std::optional<int> target;
};

Oracle exhaustive_filter(const std::vector<std::pair<int, std::int64_t>>& quarter_scores_and_lens,
                         const std::vector<bool>& valid) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        if (valid[i] && quarter_scores_and_lens[i].first > 0) pool.push_back(i);
    }
    Oracle out;
    if (pool.empty()) return out;
    std::int64_t sum_q = 0, sum_len = 0;
    for (auto i : pool) {
        sum_q += quarter_scores_and_lens[i].first;
        sum_len += quarter_scores_and_lens[i].second;
    }
    const auto n = static_cast<std::int64_t>(pool.size());
    auto passes = [&](std::size_t i) {
        return n * quarter_scores_and_lens[i].first >= sum_q && n * quarter_scores_and_lens[i].second < sum_len;
    };

    std::uint32_t best_mask = 0;
    int best_size = -1;
    for (std::uint32_t mask = 0; mask < (1u << pool.size()); ++mask) {
        bool ok = true;
        int size = 0;
        for (std::size_t b = 0; b < pool.size(); ++b) {
            if ((mask >> b) & 1u) {
                ok = ok && passes(pool[b]);
                ++size;
            }
        }
        if (ok && size > best_size) {
            best_size = size;
            best_mask = mask;
        }
    }
    for (std::size_t b = 0; b < pool.size(); ++b) {
        if ((best_mask >> b) & 1u) out.efficient.push_back(static_cast<int>(pool[b]) + 1);
    }

    // Target: the member no other member beats.
    for (int cand : out.efficient) {
        const auto& c = quarter_scores_and_lens[cand - 1];
        bool beaten = false;
        for (int other : out.efficient) {
            if (other == cand) continue;
            const auto& o = quarter_scores_and_lens[other - 1];
            if (o.second < c.second || (o.second == c.second && o.first > c.first) ||
                (o.second == c.second && o.first == c.first && other < cand)) {
                beaten = true;
            }
        }
        if (!beaten) {
            EXPECT_FALSE(out.target) << "oracle found two unbeaten members";
            out.target = cand;
        }
    }
    return out;
}

QueryInput input_for(const std::string& qid, std::vector<TrajectorySample> samples) {
    for (auto& s : samples) s.query_id = qid;
    return {Query(qid, "query " + qid), test::numbered_candidates(2, qid), std::move(samples)};
}

}  // namespace

TEST(ValidSubset, KeepsValidPositiveInOrder) {
    const std::vector<TrajectorySample> samples = {scored_sample(1, 0.8, 10), scored_sample(2, 0.0, 10),
                                                   invalid_sample(3, 10)};
    EXPECT_EQ(indices(valid_subset(samples)), std::vector<int>{1});
    EXPECT_TRUE(valid_subset({invalid_sample(1, 5), invalid_sample(2, 6)}).empty());
    const std::vector<TrajectorySample> good = {scored_sample(2, 0.3, 10), scored_sample(1, 0.9, 20)};
    EXPECT_EQ(indices(valid_subset(good)), (std::vector<int>{2, 1}));
}

TEST(ValidSubset, UnscoredValidSampleIsAnError) {
    auto s = scored_sample(1, 0.5, 10);
    s.score.reset();
    EXPECT_THROW(valid_subset({s}), ValidationError);
}

TEST(QueryStats, WorkedExample) {
    const std::vector<TrajectorySample> v = {scored_sample(1, 0.8, 100), scored_sample(2, 0.8, 300),
                                             scored_sample(3, 0.5, 120)};
    const auto m = query_stats(v);
    EXPECT_EQ(m.mean_score, 0.7000000000000001);
    EXPECT_EQ(m.mean_len, 173.33333333333334);
    EXPECT_NEAR(m.mean_score, 0.7, 1e-12);

    const auto e = efficient_set(v, m);
    ASSERT_EQ(indices(e), std::vector<int>{1});
    EXPECT_EQ(*e[0].score, 0.8);
    EXPECT_EQ(e[0].token_len, 100);
    EXPECT_EQ(select_target(e)->sample_index, 1);
}

TEST(QueryStats, SingletonAndEmpty) {
    const auto m = query_stats({scored_sample(1, 0.6, 200)});
    EXPECT_EQ(m.mean_score, 0.6);
    EXPECT_EQ(m.mean_len, 200.0);
    EXPECT_THROW(query_stats({}), ValidationError);
}

TEST(EfficientSet, DegenerateCasesAreEmpty) {
    const std::vector<TrajectorySample> one = {scored_sample(1, 0.6, 200)};
    EXPECT_TRUE(efficient_set(one, query_stats(one)).empty());
    const std::vector<TrajectorySample> same = {scored_sample(1, 0.6, 200), scored_sample(2, 0.6, 200),
                                                scored_sample(3, 0.6, 200)};
    EXPECT_TRUE(efficient_set(same, query_stats(same)).empty());
}

TEST(SelectTarget, ArgminAndTieBreak) {
    EXPECT_EQ(select_target({scored_sample(1, 0.5, 120), scored_sample(2, 0.5, 100)})->sample_index, 2);
    EXPECT_FALSE(select_target({}));
    EXPECT_EQ(select_target({scored_sample(1, 0.7, 100), scored_sample(2, 0.9, 100)})->sample_index, 2);
    EXPECT_EQ(select_target({scored_sample(4, 0.9, 100), scored_sample(2, 0.9, 100)})->sample_index, 2);
}

TEST(Filter, MatchesExhaustiveChecker) {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<std::pair<int, std::int64_t>> data(n);
        std::vector<bool> valid(n);
        std::vector<TrajectorySample> samples;
        for (std::size_t i = 0; i < n; ++i) {
            data[i] = {static_cast<int>(rng() % 5), 50 * static_cast<std::int64_t>(1 + rng() % 6)};
            valid[i] = rng() % 6 != 0;
            auto s = valid[i] ? scored_sample(static_cast<int>(i) + 1, data[i].first / 4.0, data[i].second)
                              : invalid_sample(static_cast<int>(i) + 1, data[i].second);
            samples.push_back(s);
        }
        const Oracle oracle = exhaustive_filter(data, valid);
        const auto sv = valid_subset(samples);
        if (sv.empty()) {
            ASSERT_TRUE(oracle.efficient.empty());
            continue;
        }
        const auto means = query_stats(sv);
        const auto e = efficient_set(sv, means);
        ASSERT_EQ(indices(e), oracle.efficient);
        for (const auto& s : e) {
            ASSERT_GE(*s.score, means.mean_score);
            ASSERT_LT(static_cast<double>(s.token_len), means.mean_len);
        }
        for (const auto& s : sv) {
            const bool in_e = std::find(oracle.efficient.begin(), oracle.efficient.end(), s.sample_index) !=
                              oracle.efficient.end();
            if (!in_e) ASSERT_TRUE(*s.score < means.mean_score || static_cast<double>(s.token_len) >= means.mean_len);
        }
        const auto target = select_target(e);
        ASSERT_EQ(target.has_value(), oracle.target.has_value());
        if (target) ASSERT_EQ(target->sample_index, *oracle.target);

        // Samples outside the valid set do not move the statistics or the target.
        std::vector<TrajectorySample> pruned;
        for (const auto& s : samples) {
            if (s.valid && *s.score > 0.0) pruned.push_back(s);
        }
        const auto pruned_means = query_stats(valid_subset(pruned));
        ASSERT_EQ(pruned_means.mean_score, means.mean_score);
        ASSERT_EQ(pruned_means.mean_len, means.mean_len);
        const auto pruned_target = select_target(efficient_set(valid_subset(pruned), pruned_means));
        ASSERT_EQ(pruned_target.has_value(), target.has_value());
        if (target) ASSERT_EQ(pruned_target->sample_index, target->sample_index);

        // A perfect one-token sample always becomes the target.
        auto with_best = sv;
        with_best.push_back(scored_sample(1000, 1.0, 1));
        const auto best = select_target(efficient_set(with_best, query_stats(with_best)));
        ASSERT_TRUE(best);
        ASSERT_EQ(best->sample_index, 1000);
    }
}

TEST(BuildCorpus, RetentionAndOrdering) {
    std::map<std::string, QueryInput> per_query;
    per_query.emplace("q2", input_for("q2", {scored_sample(1, 0.8, 100), scored_sample(2, 0.8, 300),
                                             scored_sample(3, 0.5, 120)}));
    per_query.emplace("q1", input_for("q1", {scored_sample(1, 0.6, 200), invalid_sample(2, 50)}));
    const auto result = build_corpus(per_query);
    EXPECT_EQ(result.retention_rate, 0.5);
    ASSERT_EQ(result.corpus.size(), 1u);
    EXPECT_EQ(result.corpus[0].query.id, "q2");
    EXPECT_EQ(result.corpus[0].target_sample_index, 1);
    EXPECT_EQ(result.corpus[0].target_len, 100);
    EXPECT_EQ(result.corpus[0].target_text, "trace 1");

    ASSERT_EQ(result.stats.size(), 2u);
    EXPECT_EQ(result.stats[0].query_id, "q1");
    EXPECT_EQ(result.stats[0].n_sampled, 2);
    EXPECT_EQ(result.stats[0].n_valid, 1);
    EXPECT_FALSE(result.stats[0].retained);
    EXPECT_EQ(result.stats[1].efficient_indices, std::vector<int>{1});
    EXPECT_TRUE(result.stats[1].retained);
}

TEST(BuildCorpus, NothingRetained) {
    std::map<std::string, QueryInput> per_query;
    per_query.emplace("q1", input_for("q1", {invalid_sample(1, 10)}));
    per_query.emplace("q2", input_for("q2", {scored_sample(1, 0.0, 10)}));
    const auto result = build_corpus(per_query);
    EXPECT_TRUE(result.corpus.empty());
    EXPECT_EQ(result.retention_rate, 0.0);
    EXPECT_EQ(result.stats.size(), 2u);
    EXPECT_EQ(build_corpus({}).retention_rate, 0.0);
}

TEST(BuildCorpus, IsAPureFunction) {
    std::map<std::string, QueryInput> per_query;
    per_query.emplace("q1", input_for("q1", {scored_sample(1, 0.9, 80), scored_sample(2, 0.4, 300),
                                             scored_sample(3, 0.9, 80)}));
    const auto a = build_corpus(per_query);
    const auto b = build_corpus(per_query);
    EXPECT_EQ(a.stats, b.stats);
    ASSERT_EQ(a.corpus.size(), 1u);
    EXPECT_EQ(a.corpus[0].target_sample_index, 1);
    EXPECT_EQ(b.corpus[0].target_sample_index, 1);
}

TEST(ScoreSamples, ScoresValidAndClearsInvalid) {
    Qrels q;
    q.set("q1", "d2", 1);
    auto inv = invalid_sample(2, 10);
    inv.score = 0.3;
    auto valid = scored_sample(1, 0.0, 10);
    valid.final_ranking = Ranking::strict({"d2", "d1"});
    const auto scored = score_samples({valid, inv}, q);
    EXPECT_EQ(*scored[0].score, 1.0);
    EXPECT_FALSE(scored[1].score);

    const auto custom = score_samples({valid}, q, [](const Ranking&, const Qrels&, const std::string&) { return 0.25; });
    EXPECT_EQ(*custom[0].score, 0.25);
}
