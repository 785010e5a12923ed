#include "bioace/gateway/endpoint.hpp"

namespace bioace::gateway {

std::string_view to_string(Capability c) {
    switch (c) {
    case Capability::embed: return "embed";
    case Capability::generate: return "generate";
    case Capability::nli: return "nli";
    case Capability::score: return "score";
    case Capability::rerank: return "rerank";
    }
    return "";
}

std::optional<Capability> parse_capability(std::string_view s) {
    for (auto c : {Capability::embed, Capability::generate, Capability::nli, Capability::score, Capability::rerank}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::string EndpointConfig::key() const {
    return std::string(to_string(capability)) + "|" + base_url + "|" + model_id;
}

}  // namespace bioace::gateway
