#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rrd/model.hpp"

namespace rrd {

struct ChatMessage {
    std::string role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Versioned listwise prompt. `user` must contain the `{passages}` and
/// `{query}` placeholders; `{num_passages}` is optional.
struct PromptTemplate {
    std::string version;
    std::string system;
    std::string user;

    friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

/// The template shipped as config/prompt_template.json.
PromptTemplate default_prompt_template();

PromptTemplate load_prompt_template(const std::string& path);

/// Stable 16-hex-digit fingerprint of a template (FNV-1a 64).
std::string prompt_hash(const PromptTemplate& tmpl);

/// System + user message pair. Passages are listed as "[i] text" in
/// candidate order. Placeholders are expanded in one pass, so placeholder-like
/// text inside passages or the query is left untouched.
std::vector<ChatMessage> build_prompt(const Query& query, const CandidateSet& candidates, const PromptTemplate& tmpl);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace rrd
