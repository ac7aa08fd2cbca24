#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrd/backend.hpp"

namespace rrd {

struct HttpBackendOptions {
    /// Full URL of the chat-completions route, e.g.
    /// http://localhost:8000/v1/chat/completions
    std::string endpoint_url;
    std::string model;
    std::string api_key;  // sent as a bearer token when non-empty
    std::chrono::seconds timeout{600};
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

ParsedUrl parse_url(const std::string& url);

/// Request body for a chat-completions call; `n` > 1 asks for several choices.
nlohmann::json chat_request_body(const GenerationRequest& request, int n = 1);

/// Decodes a chat-completions response body into `expected_n` results.
/// Throws BackendError (non-transient) when the body is malformed. Usage
/// counts are only attributed when the response holds a single choice.
std::vector<GenerationResult> parse_chat_response(const std::string& body, int expected_n);

/// Maps an HTTP status to whether a retry can help.
bool is_transient_status(int status);

/// OpenAI-style chat-completions client.
class HttpChatBackend : public GenerationBackend {
public:
    explicit HttpChatBackend(HttpBackendOptions options);

    GenerationResult generate(const GenerationRequest& request) override;
    std::vector<GenerationResult> generate_n(const GenerationRequest& request, int n) override;
    std::string describe() const override { return options_.endpoint_url; }

private:
    std::vector<GenerationResult> post(const GenerationRequest& request, int n);

    HttpBackendOptions options_;
    ParsedUrl url_;
};

}  // namespace rrd
