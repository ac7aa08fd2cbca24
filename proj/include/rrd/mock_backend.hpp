#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrd/backend.hpp"
#include "rrd/model.hpp"

namespace rrd {

/// Order of the final ranking a mock trace ends with.
enum class MockQuality {
    Ideal,        // candidates sorted by grade, descending
    Reverse,      // the ideal order reversed
    Identity,     // first-stage order
    Shuffled,     // seeded random permutation
    Unparseable,  // no ranking statement at all
};

MockQuality mock_quality_from_string(const std::string& s);
std::string to_string(MockQuality q);

/// One kind of synthetic trace. Verbosity comes from filler sentences,
/// intermediate ranking restatements that converge on the final ranking, and
/// revert loops that state a perturbed ranking and then return to the final.
struct MockArchetype {
    std::string name;
    double weight = 1.0;
    MockQuality quality = MockQuality::Ideal;
    int filler_sentences = 4;
    int filler_jitter = 0;  // up to this many extra sentences, drawn per sample
    int restatements = 0;
    int revert_loops = 0;
    bool tie_equal_grades = false;
};

enum class MockSelection {
    Cycle,     // sample k uses archetype (k - 1) mod |archetypes|
    Weighted,  // seeded draw by weight
};

struct MockProfile {
    std::vector<MockArchetype> archetypes;
    MockSelection selection = MockSelection::Cycle;
    bool report_usage = false;  // attach an endpoint-style token count
    bool think_markers = true;
};

void validate(const MockProfile& p);

/// A single balanced archetype; handy default for smoke runs.
MockProfile default_mock_profile();

/// Deterministic synthetic reasoning trace. Seeded by
/// sample_seed(seed, query_id, sample_index); `oracle` supplies the grades
/// that define the ideal order.
GenerationResult mock_generate(const std::string& query_id, const CandidateSet& candidates, int sample_index,
                               std::uint64_t seed, const MockProfile& profile, const Qrels& oracle);

/// Index of the archetype a given sample draws.
std::size_t mock_archetype_index(const std::string& query_id, int sample_index, std::uint64_t seed,
                                 const MockProfile& profile);

class MockBackend : public GenerationBackend {
public:
    MockBackend(MockProfile profile, Qrels oracle, std::uint64_t default_seed = 0);

    GenerationResult generate(const GenerationRequest& request) override;
    std::string describe() const override { return "mock://deterministic"; }

private:
    MockProfile profile_;
    Qrels oracle_;
    std::uint64_t default_seed_;
};

}  // namespace rrd
