#include "rrd/backend.hpp"

namespace rrd {

std::vector<GenerationResult> GenerationBackend::generate_n(const GenerationRequest& request, int n) {
    std::vector<GenerationResult> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    GenerationRequest r = request;
    for (int i = 0; i < n; ++i) {
        r.sample_index = request.sample_index + i;
        out.push_back(generate(r));
    }
    return out;
}

std::uint64_t sample_seed(std::uint64_t seed, const std::string& query_id, int sample_index) {
    std::string blob = std::to_string(seed);
    blob.push_back('\x1f');
    blob += query_id;
    blob.push_back('\x1f');
    blob += std::to_string(sample_index);
    return fnv1a64(blob);
}

}  // namespace rrd
