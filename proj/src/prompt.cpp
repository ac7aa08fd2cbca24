#include "rrd/prompt.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rrd {

PromptTemplate default_prompt_template() {
    PromptTemplate t;
    t.version = "listwise-reasoning-v1";
    t.system =
        "You are RankLLM, an intelligent assistant that ranks passages by their relevance to a search query. "
        "Think through the passages before answering.";
    t.user =
        "I will provide you with {num_passages} passages, each indicated by a numerical identifier in square "
        "brackets.\n\n{passages}\n\nSearch Query: {query}\n\nRank the {num_passages} passages above by their "
        "relevance to the search query. End your answer with the ranking using the identifiers, most relevant "
        "first, in the form [2] > [1] > [3]. Passages that are equally relevant may be tied with =, as in "
        "[2] > [1] = [3].";
    return t;
}

PromptTemplate load_prompt_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open prompt template '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("prompt template '" + path + "' is not valid JSON: " + e.what());
    }
    PromptTemplate t;
    try {
        t.version = j.at("version").get<std::string>();
        t.system = j.at("system").get<std::string>();
        t.user = j.at("user").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("prompt template '" + path + "': " + e.what());
    }
    return t;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string prompt_hash(const PromptTemplate& tmpl) {
    std::string blob = tmpl.version;
    blob.push_back('\0');
    blob += tmpl.system;
    blob.push_back('\0');
    blob += tmpl.user;
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(fnv1a64(blob)));
    return std::string(buf.data());
}

std::vector<ChatMessage> build_prompt(const Query& query, const CandidateSet& candidates, const PromptTemplate& tmpl) {
    for (const char* required : {"{passages}", "{query}"}) {
        if (tmpl.user.find(required) == std::string::npos) {
            throw ValidationError("prompt template '" + tmpl.version + "' is missing the " + required +
                                  " placeholder");
        }
    }

    std::ostringstream passages;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i > 0) passages << '\n';
        passages << '[' << (i + 1) << "] " << candidates.docs()[i].text;
    }
    const std::string passage_block = passages.str();
    const std::string count = std::to_string(candidates.size());

    std::string user;
    user.reserve(tmpl.user.size() + passage_block.size() + query.text.size());
    std::size_t pos = 0;
    while (pos < tmpl.user.size()) {
        const auto open = tmpl.user.find('{', pos);
        if (open == std::string::npos) {
            user.append(tmpl.user, pos, std::string::npos);
            break;
        }
        user.append(tmpl.user, pos, open - pos);
        const auto close = tmpl.user.find('}', open);
        const std::string name = close == std::string::npos ? "" : tmpl.user.substr(open + 1, close - open - 1);
        if (name == "passages") {
            user += passage_block;
        } else if (name == "query") {
            user += query.text;
        } else if (name == "num_passages") {
            user += count;
        } else {
            user.push_back('{');
            pos = open + 1;
            continue;
        }
        pos = close + 1;
    }
    return {{"system", tmpl.system}, {"user", std::move(user)}};
}

}  // namespace rrd
