#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace bioace::gateway {

enum class Capability { embed, generate, nli, score, rerank };

std::string_view to_string(Capability c);
std::optional<Capability> parse_capability(std::string_view s);

/// Wire dialect of a generation endpoint.
enum class PromptStyle { completion, chat };

struct EndpointConfig {
    std::string base_url;  ///< full POST URL, e.g. http://localhost:8080/v1/embeddings
    std::string model_id;
    Capability capability = Capability::embed;
    std::size_t max_in_flight = 4;
    double timeout_seconds = 60.0;
    double temperature = 0.0;  ///< generation only
    PromptStyle style = PromptStyle::completion;
    std::string api_key;

    /// Identity of the endpoint for concurrency limiting and dimension tracking.
    std::string key() const;
};

}  // namespace bioace::gateway
