#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rrd/model.hpp"

namespace rrd {

/// A ranking statement located in generated text. `begin`/`end` are byte
/// offsets of the whole matched pattern, half-open.
struct RankingPatternMatch {
    std::size_t begin = 0;
    std::size_t end = 0;
    Ranking ranking;
};

/// Universe-free view of one maximal "[a] > [b] = [c]" pattern: aliases as
/// written, with `tied_to_previous[i]` true when item i followed an '='.
struct RawPattern {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<std::uint64_t> aliases;
    std::vector<bool> out_of_range;  // alias too large to represent
    std::vector<bool> tied_to_previous;
};

/// Every maximal bracket pattern in `text`, in text order. Single bracketed
/// numbers are reported too (with one alias); callers filter by size.
std::vector<RawPattern> scan_patterns(std::string_view text);

/// Ranking statements in `text` with at least two in-universe items.
/// Aliases outside [1, |universe|] are dropped; a repeated alias keeps its
/// first position. Two surviving neighbours are tied only when every
/// operator between them in the source was '='.
std::vector<RankingPatternMatch> extract_rankings(std::string_view text, const CandidateSet& universe);

struct FinalRanking {
    Ranking ranking;  // total over the universe after repair
    double coverage = 0.0;
};

/// The last ranking statement, with unmentioned candidates appended in
/// candidate order as singleton groups. nullopt when no statement exists.
std::optional<FinalRanking> parse_final_ranking(std::string_view text, const CandidateSet& universe);

struct DelimiterMarkers {
    std::string open = "<think>";
    std::string close = "</think>";
};

struct SplitTrace {
    std::string reasoning;
    std::string answer;
    SplitMode mode = SplitMode::None;
};

/// Separates reasoning from the answer. With markers present the reasoning
/// is the delimited content; a lone close marker (the open one is often part
/// of the chat template) delimits everything before it. Otherwise the split
/// falls at the start of the last ranking pattern.
SplitTrace split_reasoning(std::string_view raw_text, const DelimiterMarkers& markers = {});

/// Renders a ranking as "[a] > [b] = [c]" using the universe's 1-based aliases.
std::string render_ranking(const Ranking& ranking, const CandidateSet& universe);

struct EndpointReported {
    std::int64_t count = 0;
};
struct Approximate {};
using TokenCountMode = std::variant<EndpointReported, Approximate>;

/// Endpoint-reported counts pass through (negative counts throw
/// ValidationError). The approximation counts maximal runs of one character
/// class among letters, digits and punctuation; whitespace separates runs and
/// bytes >= 0x80 count as letters.
std::int64_t count_tokens(std::string_view text, const TokenCountMode& mode);

}  // namespace rrd
