#include "rrd/trace_parser.hpp"

#include <limits>
#include <unordered_set>

namespace rrd {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Item {
    std::size_t end = 0;
    std::uint64_t alias = 0;
    bool overflow = false;
};

// Parses "[digits]" starting at `pos`.
std::optional<Item> parse_item(std::string_view text, std::size_t pos) {
    if (pos >= text.size() || text[pos] != '[') return std::nullopt;
    std::size_t i = pos + 1;
    Item item;
    const std::size_t digits_begin = i;
    while (i < text.size() && is_digit(text[i])) {
        const auto d = static_cast<std::uint64_t>(text[i] - '0');
        if (item.alias > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
            item.overflow = true;
        } else if (!item.overflow) {
            item.alias = item.alias * 10 + d;
        }
        ++i;
    }
    if (i == digits_begin || i >= text.size() || text[i] != ']') return std::nullopt;
    item.end = i + 1;
    return item;
}

std::size_t skip_space(std::string_view text, std::size_t pos) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    return pos;
}

enum class CharClass { Space, Letter, Digit, Punct };

CharClass classify(unsigned char c) {
    if (is_space(static_cast<char>(c))) return CharClass::Space;
    if (c >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return CharClass::Letter;
    if (c >= '0' && c <= '9') return CharClass::Digit;
    return CharClass::Punct;
}

std::optional<RankingPatternMatch> to_match(const RawPattern& raw, const CandidateSet& universe) {
    std::vector<std::vector<std::string>> groups;
    std::unordered_set<std::uint64_t> seen;
    std::size_t kept = 0;
    bool split_since_kept = false;
    for (std::size_t i = 0; i < raw.aliases.size(); ++i) {
        if (i > 0 && !raw.tied_to_previous[i]) split_since_kept = true;
        if (raw.out_of_range[i]) continue;
        const std::string* doc = universe.doc_for_alias(raw.aliases[i]);
        if (doc == nullptr || !seen.insert(raw.aliases[i]).second) continue;
        if (groups.empty() || split_since_kept) {
            groups.push_back({*doc});
        } else {
            groups.back().push_back(*doc);
        }
        split_since_kept = false;
        ++kept;
    }
    if (kept < 2) return std::nullopt;
    return RankingPatternMatch{raw.begin, raw.end, Ranking(std::move(groups))};
}

}  // namespace

std::vector<RawPattern> scan_patterns(std::string_view text) {
    std::vector<RawPattern> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find('[', pos);
        if (open == std::string_view::npos) break;
        auto first = parse_item(text, open);
        if (!first) {
            pos = open + 1;
            continue;
        }
        RawPattern p;
        p.begin = open;
        p.end = first->end;
        p.aliases.push_back(first->alias);
        p.out_of_range.push_back(first->overflow);
        p.tied_to_previous.push_back(false);
        while (true) {
            const std::size_t op_pos = skip_space(text, p.end);
            if (op_pos >= text.size() || (text[op_pos] != '>' && text[op_pos] != '=')) break;
            auto next = parse_item(text, skip_space(text, op_pos + 1));
            if (!next) break;
            p.aliases.push_back(next->alias);
            p.out_of_range.push_back(next->overflow);
            p.tied_to_previous.push_back(text[op_pos] == '=');
            p.end = next->end;
        }
        pos = p.end;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RankingPatternMatch> extract_rankings(std::string_view text, const CandidateSet& universe) {
    std::vector<RankingPatternMatch> out;
    for (const auto& raw : scan_patterns(text)) {
        if (auto m = to_match(raw, universe)) out.push_back(std::move(*m));
    }
    return out;
}

std::optional<FinalRanking> parse_final_ranking(std::string_view text, const CandidateSet& universe) {
    auto matches = extract_rankings(text, universe);
    if (matches.empty()) return std::nullopt;

    auto groups = matches.back().ranking.groups();
    const std::size_t mentioned = matches.back().ranking.item_count();
    std::unordered_set<std::string> present;
    for (const auto& g : groups) present.insert(g.begin(), g.end());
    for (const auto& doc : universe.docs()) {
        if (!present.count(doc.doc_id)) groups.push_back({doc.doc_id});
    }
    return FinalRanking{Ranking(std::move(groups)),
                        static_cast<double>(mentioned) / static_cast<double>(universe.size())};
}

SplitTrace split_reasoning(std::string_view raw_text, const DelimiterMarkers& markers) {
    SplitTrace out;
    if (!markers.close.empty()) {
        const auto open = markers.open.empty() ? std::string_view::npos : raw_text.find(markers.open);
        const auto search_from = open == std::string_view::npos ? 0 : open + markers.open.size();
        const auto close = raw_text.find(markers.close, search_from);
        if (close != std::string_view::npos) {
            const auto after = raw_text.substr(close + markers.close.size());
            if (open != std::string_view::npos) {
                out.reasoning = std::string(raw_text.substr(search_from, close - search_from));
                out.answer = std::string(raw_text.substr(0, open)) + std::string(after);
            } else {
                out.reasoning = std::string(raw_text.substr(0, close));
                out.answer = std::string(after);
            }
            out.mode = SplitMode::Delimiter;
            return out;
        }
    }

    const auto patterns = scan_patterns(raw_text);
    for (auto it = patterns.rbegin(); it != patterns.rend(); ++it) {
        if (it->aliases.size() >= 2) {
            out.reasoning = std::string(raw_text.substr(0, it->begin));
            out.answer = std::string(raw_text.substr(it->begin));
            out.mode = SplitMode::Fallback;
            return out;
        }
    }
    out.reasoning = std::string(raw_text);
    out.mode = SplitMode::None;
    return out;
}

std::string render_ranking(const Ranking& ranking, const CandidateSet& universe) {
    std::string out;
    bool first_group = true;
    for (const auto& group : ranking.groups()) {
        if (!first_group) out += " > ";
        first_group = false;
        bool first_item = true;
        for (const auto& id : group) {
            if (!first_item) out += " = ";
            first_item = false;
            const auto alias = universe.alias_of(id);
            if (alias == 0) throw ValidationError("doc_id '" + id + "' is not a candidate");
            out += "[" + std::to_string(alias) + "]";
        }
    }
    return out;
}

std::int64_t count_tokens(std::string_view text, const TokenCountMode& mode) {
    if (const auto* reported = std::get_if<EndpointReported>(&mode)) {
        if (reported->count < 0) {
            throw ValidationError("endpoint reported a negative token count (" + std::to_string(reported->count) +
                                  ")");
        }
        return reported->count;
    }
    std::int64_t runs = 0;
    CharClass prev = CharClass::Space;
    for (const char c : text) {
        const CharClass cls = classify(static_cast<unsigned char>(c));
        if (cls != CharClass::Space && cls != prev) ++runs;
        prev = cls;
    }
    return runs;
}

}  // namespace rrd
