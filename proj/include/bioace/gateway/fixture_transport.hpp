#pragma once

#include <filesystem>

#include <json.hpp>

#include "bioace/gateway/transport.hpp"

namespace bioace::gateway {

/// File-backed transport that answers every capability from canned data.
///
/// Fixture file layout (every section optional):
///
///   {
///     "embed":    {"vectors": {"<text>": [..]}, "fallback": "hashed", "dim": 64},
///     "generate": {"rules": [{"contains": ["..."], "response": "..."},
///                            {"contains": ["..."], "echo_after": "Text: ", "split_sentences": true}],
///                  "default": "..."},
///     "nli":      {"rules": [{"premise_contains": "..", "hypothesis_contains": "..",
///                             "probs": {"support": .., "refute": .., "insufficient": ..}}],
///                  "fallback": "lexical"},
///     "score":    {"rules": [{"claim_contains": "..", "reference_contains": "..", "score": ..}],
///                  "fallback": "lexical"},
///     "rerank":   {"rules": [{"document_contains": "..", "score": ..}], "fallback": "lexical"},
///     "raw":      [{"capability": "nli", "contains": "..", "response": {...}}]
///   }
///
/// Rules are tried in order, first match wins. "raw" entries are matched
/// against the serialized request before anything else and returned verbatim,
/// which lets tests inject malformed responses. The lexical fallbacks score
/// token overlap, so a fixture only needs to pin the cases a test cares about.
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(nlohmann::json fixture);
    static FixtureTransport from_file(const std::filesystem::path& path);

    nlohmann::json post(const EndpointConfig& endpoint, const nlohmann::json& request) override;

private:
    nlohmann::json embed(const nlohmann::json& request) const;
    nlohmann::json generate(const nlohmann::json& request) const;
    nlohmann::json nli(const nlohmann::json& request) const;
    nlohmann::json score(const nlohmann::json& request) const;
    nlohmann::json rerank(const nlohmann::json& request) const;

    nlohmann::json fixture_;
};

/// Deterministic feature-hashed bag-of-words embedding used by the fixture fallback.
std::vector<double> hashed_embedding(std::string_view text, std::size_t dim);

/// Fraction of the query's tokens that also occur in `text` (0 when the query has none).
double token_overlap(std::string_view query, std::string_view text);

}  // namespace bioace::gateway
