#include "rrd/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace rrd {

using nlohmann::json;

namespace {

std::string interpolate_string(const std::string& s) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = s.find("${", pos);
        if (open == std::string::npos) {
            out.append(s, pos, std::string::npos);
            return out;
        }
        const auto close = s.find('}', open + 2);
        if (close == std::string::npos) throw ValidationError("unterminated ${...} in config value '" + s + "'");
        out.append(s, pos, open - pos);
        const std::string name = s.substr(open + 2, close - open - 2);
        const char* value = std::getenv(name.c_str());
        if (value == nullptr) throw ValidationError("config references unset environment variable '" + name + "'");
        out += value;
        pos = close + 1;
    }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

SamplingConfig parse_profile(const json& j, SamplingConfig base) {
    read_opt(j, "k_samples", base.k_samples);
    read_opt(j, "temperature", base.temperature);
    read_opt(j, "top_p", base.top_p);
    read_opt(j, "max_tokens", base.max_tokens);
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    validate(base);
    return base;
}

}  // namespace

SamplingConfig PipelineConfig::profile(const std::string& name) const {
    auto it = profiles.find(name);
    if (it == profiles.end()) throw ValidationError("unknown sampling profile '" + name + "'");
    SamplingConfig c = it->second;
    c.endpoint_url = endpoint_url;
    c.model_name = model_name;
    c.max_in_flight = max_in_flight;
    if (!c.seed) c.seed = seed;
    validate(c);
    return c;
}

SamplerOptions PipelineConfig::sampler_options() const {
    SamplerOptions o;
    o.prompt = prompt;
    o.markers = markers;
    o.retry = retry;
    o.mode = request_mode;
    o.use_endpoint_counts = use_endpoint_counts;
    return o;
}

PipelineConfig default_pipeline_config() {
    PipelineConfig c;
    c.endpoint_url = "http://localhost:8000/v1/chat/completions";
    c.profiles["distill"] = distill_profile();
    c.profiles["eval"] = eval_profile();
    c.prompt = default_prompt_template();
    c.mock = default_mock_profile();
    return c;
}

json interpolate_env(const json& j) {
    if (j.is_string()) return interpolate_string(j.get<std::string>());
    if (j.is_object()) {
        json out = json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = interpolate_env(it.value());
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(interpolate_env(v));
        return out;
    }
    return j;
}

MockProfile parse_mock_profile(const json& j) {
    MockProfile p;
    if (j.contains("selection")) {
        const auto sel = j.at("selection").get<std::string>();
        if (sel == "cycle") {
            p.selection = MockSelection::Cycle;
        } else if (sel == "weighted") {
            p.selection = MockSelection::Weighted;
        } else {
            throw ValidationError("mock selection must be 'cycle' or 'weighted', got '" + sel + "'");
        }
    }
    read_opt(j, "report_usage", p.report_usage);
    read_opt(j, "think_markers", p.think_markers);
    for (const auto& a : j.at("archetypes")) {
        MockArchetype arch;
        arch.name = a.value("name", std::string("archetype"));
        read_opt(a, "weight", arch.weight);
        if (a.contains("quality")) arch.quality = mock_quality_from_string(a.at("quality").get<std::string>());
        read_opt(a, "filler_sentences", arch.filler_sentences);
        read_opt(a, "filler_jitter", arch.filler_jitter);
        read_opt(a, "restatements", arch.restatements);
        read_opt(a, "revert_loops", arch.revert_loops);
        read_opt(a, "tie_equal_grades", arch.tie_equal_grades);
        p.archetypes.push_back(std::move(arch));
    }
    validate(p);
    return p;
}

PipelineConfig parse_pipeline_config(const json& raw, const std::string& base_dir) {
    PipelineConfig c = default_pipeline_config();
    try {
        const json j = interpolate_env(raw);
        if (j.contains("endpoint")) {
            const auto& e = j.at("endpoint");
            read_opt(e, "url", c.endpoint_url);
            read_opt(e, "model", c.model_name);
            read_opt(e, "api_key_env", c.api_key_env);
            if (e.contains("timeout_s")) c.timeout = std::chrono::seconds(e.at("timeout_s").get<int>());
            read_opt(e, "max_in_flight", c.max_in_flight);
            if (e.contains("request_mode")) {
                const auto mode = e.at("request_mode").get<std::string>();
                if (mode == "independent") {
                    c.request_mode = RequestMode::Independent;
                } else if (mode == "single_n") {
                    c.request_mode = RequestMode::SingleN;
                } else {
                    throw ValidationError("request_mode must be 'independent' or 'single_n', got '" + mode + "'");
                }
            }
        }
        if (j.contains("profiles")) {
            for (const auto& [name, p] : j.at("profiles").items()) {
                auto base = c.profiles.count(name) ? c.profiles.at(name) : distill_profile();
                c.profiles[name] = parse_profile(p, base);
            }
        }
        if (j.contains("prompt_template")) {
            std::filesystem::path p = j.at("prompt_template").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            if (!std::filesystem::exists(p)) throw ValidationError("prompt template '" + p.string() + "' does not exist");
            c.prompt_template_path = p.string();
            c.prompt = load_prompt_template(c.prompt_template_path);
        }
        if (j.contains("tokenizer")) {
            const auto mode = j.at("tokenizer").get<std::string>();
            if (mode == "auto") {
                c.use_endpoint_counts = true;
            } else if (mode == "approximate") {
                c.use_endpoint_counts = false;
            } else {
                throw ValidationError("tokenizer must be 'auto' or 'approximate', got '" + mode + "'");
            }
        }
        if (j.contains("think_markers")) {
            read_opt(j.at("think_markers"), "open", c.markers.open);
            read_opt(j.at("think_markers"), "close", c.markers.close);
        }
        if (j.contains("retry")) {
            const auto& r = j.at("retry");
            read_opt(r, "max_attempts", c.retry.max_attempts);
            if (r.contains("initial_backoff_ms")) c.retry.initial_backoff = std::chrono::milliseconds(r.at("initial_backoff_ms").get<int>());
            read_opt(r, "multiplier", c.retry.multiplier);
            if (r.contains("max_backoff_ms")) c.retry.max_backoff = std::chrono::milliseconds(r.at("max_backoff_ms").get<int>());
            if (c.retry.max_attempts < 1) throw ValidationError("retry.max_attempts must be >= 1");
        }
        if (j.contains("mock")) c.mock = parse_mock_profile(j.at("mock"));
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid config: ") + e.what());
    }
    if (c.max_in_flight < 1) throw ValidationError("endpoint.max_in_flight must be >= 1");
    for (const auto& [name, p] : c.profiles) validate(p);
    return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_pipeline_config(j, dir.empty() ? "." : dir.string());
}

}  // namespace rrd
