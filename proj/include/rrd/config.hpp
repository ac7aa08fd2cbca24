#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "rrd/mock_backend.hpp"
#include "rrd/model.hpp"
#include "rrd/prompt.hpp"
#include "rrd/sampler.hpp"
#include "rrd/trace_parser.hpp"

namespace rrd {

/// Everything the CLI stages read from the config file.
struct PipelineConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env;
    std::chrono::seconds timeout{600};
    int max_in_flight = 4;
    RequestMode request_mode = RequestMode::Independent;

    /// "distill" and "eval" are always present.
    std::map<std::string, SamplingConfig> profiles;

    PromptTemplate prompt;
    std::string prompt_template_path;  // empty when the built-in template is used
    bool use_endpoint_counts = true;
    DelimiterMarkers markers;
    RetryPolicy retry;
    MockProfile mock;
    std::optional<std::uint64_t> seed;

    /// Profile with endpoint fields filled in. Throws on an unknown name.
    SamplingConfig profile(const std::string& name) const;
    SamplerOptions sampler_options() const;
};

/// Defaults: distill (K=16, temperature 0.7, top_p 0.95, 8192 tokens) and
/// eval (K=1, temperature 0.5, top_p 0.95) profiles, built-in prompt and
/// the default mock profile.
PipelineConfig default_pipeline_config();

/// Replaces every ${NAME} in string values with the environment variable.
/// Unset variables throw ValidationError.
nlohmann::json interpolate_env(const nlohmann::json& j);

/// Parses a config document. Relative file references resolve against
/// `base_dir`.
PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::string& base_dir = ".");

PipelineConfig load_pipeline_config(const std::string& path);

MockProfile parse_mock_profile(const nlohmann::json& j);

}  // namespace rrd
