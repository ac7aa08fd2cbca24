#include "rrd/http_backend.hpp"

#include <httplib.h>

namespace rrd {

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("endpoint url '" + url + "' has no scheme");
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https") {
        throw ValidationError("endpoint url '" + url + "' must use http or https");
    }
    const auto host_begin = scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    const std::string authority = url.substr(host_begin, path_begin == std::string::npos ? std::string::npos
                                                                                          : path_begin - host_begin);
    out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    const auto colon = authority.rfind(':');
    if (colon != std::string::npos && authority.find(']') == std::string::npos) {
        out.host = authority.substr(0, colon);
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("endpoint url '" + url + "' has an invalid port");
        }
    } else {
        out.host = authority;
        out.port = out.scheme == "https" ? 443 : 80;
    }
    if (out.host.empty()) throw ValidationError("endpoint url '" + url + "' has no host");
    return out;
}

nlohmann::json chat_request_body(const GenerationRequest& request, int n) {
    nlohmann::json body;
    body["model"] = request.model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    body["max_tokens"] = request.max_tokens;
    if (n > 1) body["n"] = n;
    if (request.seed) {
        // Many servers reject seeds beyond 31 bits.
        body["seed"] = sample_seed(*request.seed, request.query_id, request.sample_index) & 0x7fffffffULL;
    }
    return body;
}

std::vector<GenerationResult> parse_chat_response(const std::string& body, int expected_n) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed endpoint response: ") + e.what(), false);
    }
    try {
        const auto& choices = j.at("choices");
        if (!choices.is_array() || static_cast<int>(choices.size()) != expected_n) {
            throw BackendError("malformed endpoint response: expected " + std::to_string(expected_n) + " choice(s)",
                               false);
        }
        std::vector<GenerationResult> out;
        for (const auto& c : choices) {
            GenerationResult r;
            const auto& content = c.at("message").at("content");
            r.raw_text = content.is_null() ? std::string() : content.get<std::string>();
            const std::string finish = c.contains("finish_reason") && c["finish_reason"].is_string()
                                           ? c["finish_reason"].get<std::string>()
                                           : "stop";
            r.finish_reason = finish == "length" ? FinishReason::Length : FinishReason::Stop;
            out.push_back(std::move(r));
        }
        if (expected_n == 1 && j.contains("usage") && j["usage"].contains("completion_tokens")) {
            const auto tokens = j["usage"]["completion_tokens"].get<std::int64_t>();
            if (tokens < 0) throw BackendError("malformed endpoint response: negative completion_tokens", false);
            out[0].endpoint_token_count = tokens;
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed endpoint response: ") + e.what(), false);
    }
}

bool is_transient_status(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

HttpChatBackend::HttpChatBackend(HttpBackendOptions options)
    : options_(std::move(options)), url_(parse_url(options_.endpoint_url)) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url_.scheme == "https") throw ValidationError("this build has no TLS support; use an http endpoint");
#endif
}

GenerationResult HttpChatBackend::generate(const GenerationRequest& request) {
    return std::move(post(request, 1).front());
}

std::vector<GenerationResult> HttpChatBackend::generate_n(const GenerationRequest& request, int n) {
    return post(request, n);
}

std::vector<GenerationResult> HttpChatBackend::post(const GenerationRequest& request, int n) {
    const std::string base = url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port);
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(std::chrono::seconds(60));

    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    GenerationRequest req = request;
    if (req.model.empty()) req.model = options_.model;
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(url_.path, headers, chat_request_body(req, n).dump(), "application/json");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

    if (!res) {
        throw BackendError(options_.endpoint_url + ": " + httplib::to_string(res.error()), true);
    }
    if (res->status != 200) {
        throw BackendError(options_.endpoint_url + ": HTTP " + std::to_string(res->status),
                           is_transient_status(res->status));
    }
    auto out = parse_chat_response(res->body, n);
    for (auto& r : out) r.latency_ms = elapsed;
    return out;
}

}  // namespace rrd
