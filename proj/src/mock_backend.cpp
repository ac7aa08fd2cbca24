#include "rrd/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string_view>

#include "rrd/trace_parser.hpp"

namespace rrd {

namespace {

constexpr std::array<std::string_view, 12> kFiller = {
    "Passage [{a}] mentions the topic only in passing.",
    "Passage [{a}] gives a fairly direct answer to the question.",
    "I should double-check whether [{a}] is more specific than [{b}].",
    "[{a}] and [{b}] cover overlapping ground.",
    "Let me reread the query to make sure I understand what is being asked.",
    "The key aspect of the query seems to be the definition itself.",
    "Some passages only repeat partial context without adding new evidence.",
    "Passage [{a}] looks off-topic.",
    "It is worth comparing the level of detail across the passages.",
    "Hmm, the wording in [{a}] is vague.",
    "[{a}] adds some contextual detail.",
    "Overall the strongest evidence comes from a small number of passages.",
};

constexpr std::array<std::string_view, 3> kLeadIns = {
    "So the order would be: ",
    "A tentative ranking: ",
    "Putting this together: ",
};

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    // Uniform-ish integer in [0, n). Modulo reduction keeps the stream
    // identical across standard libraries.
    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 rng_;
};

std::string fill(std::string_view pattern, std::size_t a, std::size_t b) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern.compare(i, 3, "{a}") == 0) {
            out += std::to_string(a);
            i += 2;
        } else if (pattern.compare(i, 3, "{b}") == 0) {
            out += std::to_string(b);
            i += 2;
        } else {
            out.push_back(pattern[i]);
        }
    }
    return out;
}

std::string filler(Draw& draw, std::size_t n_docs) {
    const auto pattern = kFiller[draw.below(kFiller.size())];
    const std::size_t a = draw.below(n_docs) + 1;
    const std::size_t b = draw.below(n_docs) + 1;
    return fill(pattern, a, b);
}

std::vector<std::size_t> ideal_positions(const CandidateSet& candidates, const Qrels& oracle) {
    std::vector<std::size_t> pos(candidates.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t x, std::size_t y) {
        return oracle.grade(candidates.query_id(), candidates.docs()[x].doc_id) >
               oracle.grade(candidates.query_id(), candidates.docs()[y].doc_id);
    });
    return pos;
}

Ranking final_ranking_for(const MockArchetype& arch, const CandidateSet& candidates, const Qrels& oracle, Draw& draw) {
    std::vector<std::size_t> pos;
    switch (arch.quality) {
        case MockQuality::Ideal:
        case MockQuality::Unparseable:
            pos = ideal_positions(candidates, oracle);
            break;
        case MockQuality::Reverse:
            pos = ideal_positions(candidates, oracle);
            std::reverse(pos.begin(), pos.end());
            break;
        case MockQuality::Identity:
            pos.resize(candidates.size());
            for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
            break;
        case MockQuality::Shuffled:
            pos.resize(candidates.size());
            for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
            for (std::size_t i = pos.size(); i > 1; --i) std::swap(pos[i - 1], pos[draw.below(i)]);
            break;
    }

    std::vector<std::vector<std::string>> groups;
    int prev_grade = -1;
    for (const std::size_t p : pos) {
        const auto& id = candidates.docs()[p].doc_id;
        const int g = oracle.grade(candidates.query_id(), id);
        if (arch.tie_equal_grades && !groups.empty() && g == prev_grade) {
            groups.back().push_back(id);
        } else {
            groups.push_back({id});
        }
        prev_grade = g;
    }
    return Ranking(std::move(groups));
}

Ranking perturbed(const Ranking& base, int swaps, Draw& draw) {
    auto order = base.flatten();
    for (int s = 0; s < swaps && order.size() >= 2; ++s) {
        const std::size_t i = draw.below(order.size() - 1);
        std::swap(order[i], order[i + 1]);
    }
    return Ranking::strict(order);
}

}  // namespace

MockQuality mock_quality_from_string(const std::string& s) {
    if (s == "ideal") return MockQuality::Ideal;
    if (s == "reverse") return MockQuality::Reverse;
    if (s == "identity") return MockQuality::Identity;
    if (s == "shuffled") return MockQuality::Shuffled;
    if (s == "unparseable") return MockQuality::Unparseable;
    throw ValidationError("unknown mock quality '" + s + "'");
}

std::string to_string(MockQuality q) {
    switch (q) {
        case MockQuality::Ideal: return "ideal";
        case MockQuality::Reverse: return "reverse";
        case MockQuality::Identity: return "identity";
        case MockQuality::Shuffled: return "shuffled";
        case MockQuality::Unparseable: return "unparseable";
    }
    return "ideal";
}

void validate(const MockProfile& p) {
    if (p.archetypes.empty()) throw ValidationError("mock profile needs at least one archetype");
    double total = 0.0;
    for (const auto& a : p.archetypes) {
        if (a.weight < 0.0) throw ValidationError("mock archetype '" + a.name + "' has a negative weight");
        if (a.filler_sentences < 0 || a.filler_jitter < 0 || a.restatements < 0 || a.revert_loops < 0) {
            throw ValidationError("mock archetype '" + a.name + "' has a negative verbosity setting");
        }
        total += a.weight;
    }
    if (p.selection == MockSelection::Weighted && total <= 0.0) {
        throw ValidationError("weighted mock profile needs a positive total weight");
    }
}

MockProfile default_mock_profile() {
    MockProfile p;
    MockArchetype a;
    a.name = "balanced";
    a.quality = MockQuality::Shuffled;
    a.filler_sentences = 6;
    a.filler_jitter = 6;
    a.restatements = 2;
    a.revert_loops = 1;
    p.archetypes.push_back(a);
    p.selection = MockSelection::Cycle;
    return p;
}

std::size_t mock_archetype_index(const std::string& query_id, int sample_index, std::uint64_t seed,
                                 const MockProfile& profile) {
    const std::size_t n = profile.archetypes.size();
    if (profile.selection == MockSelection::Cycle) {
        return static_cast<std::size_t>(std::max(sample_index - 1, 0)) % n;
    }
    Draw draw(sample_seed(seed, query_id, sample_index) ^ 0x9e3779b97f4a7c15ULL);
    double total = 0.0;
    for (const auto& a : profile.archetypes) total += a.weight;
    double u = draw.unit() * total;
    for (std::size_t i = 0; i < n; ++i) {
        if (u < profile.archetypes[i].weight) return i;
        u -= profile.archetypes[i].weight;
    }
    return n - 1;
}

GenerationResult mock_generate(const std::string& query_id, const CandidateSet& candidates, int sample_index,
                               std::uint64_t seed, const MockProfile& profile, const Qrels& oracle) {
    validate(profile);
    const auto& arch = profile.archetypes[mock_archetype_index(query_id, sample_index, seed, profile)];
    Draw draw(sample_seed(seed, query_id, sample_index));
    const std::size_t n = candidates.size();

    const Ranking final = final_ranking_for(arch, candidates, oracle, draw);
    const int n_filler = arch.filler_sentences + static_cast<int>(draw.below(static_cast<std::size_t>(arch.filler_jitter) + 1));

    std::string text;
    if (profile.think_markers) text += "<think>\n";
    text += "Let me go through the " + std::to_string(n) + " passages one by one.\n";
    // Spread filler evenly ahead of each ranking statement.
    const bool parseable = arch.quality != MockQuality::Unparseable;
    const int statements = parseable ? arch.restatements + 2 * arch.revert_loops : 0;
    const int per_slot = n_filler / (statements + 1);
    int remaining = n_filler;
    auto emit_filler = [&](int count) {
        for (int i = 0; i < count && remaining > 0; ++i, --remaining) text += filler(draw, n) + "\n";
    };

    if (parseable) {
        for (int j = 1; j <= arch.restatements; ++j) {
            emit_filler(per_slot);
            const Ranking draft = j == arch.restatements ? final : perturbed(final, arch.restatements - j, draw);
            text += std::string(kLeadIns[draw.below(kLeadIns.size())]) + render_ranking(draft, candidates) + "\n";
        }
        for (int l = 0; l < arch.revert_loops; ++l) {
            emit_filler(per_slot);
            text += "But I should double-check in case another passage is more specific.\n";
            text += "So maybe: " + render_ranking(perturbed(final, 1, draw), candidates) + "\n";
            emit_filler(per_slot);
            text += "Wait, let me reconsider; the earlier reasoning still holds.\n";
            text += "So the ranking would be: " + render_ranking(final, candidates) + "\n";
        }
    }
    emit_filler(remaining);

    if (profile.think_markers) text += "</think>\n\n";
    if (parseable) {
        text += render_ranking(final, candidates);
    } else {
        text += "I am unable to settle on an ordering of these passages.";
    }

    GenerationResult r;
    r.raw_text = std::move(text);
    if (profile.report_usage) r.endpoint_token_count = count_tokens(r.raw_text, Approximate{});
    r.finish_reason = FinishReason::Stop;
    r.latency_ms = 0;
    return r;
}

MockBackend::MockBackend(MockProfile profile, Qrels oracle, std::uint64_t default_seed)
    : profile_(std::move(profile)), oracle_(std::move(oracle)), default_seed_(default_seed) {
    validate(profile_);
}

GenerationResult MockBackend::generate(const GenerationRequest& request) {
    if (request.candidates == nullptr) throw BackendError("mock backend needs the candidate set", false);
    return mock_generate(request.query_id, *request.candidates, request.sample_index,
                         request.seed.value_or(default_seed_), profile_, oracle_);
}

}  // namespace rrd
