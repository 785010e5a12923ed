#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "bioace/gateway/endpoint.hpp"
#include "bioace/gateway/gateway.hpp"

namespace bioace::gateway {

/// Endpoint configuration file (JSON):
///
///   {
///     "fixture": "fixture.json",            // optional: serve canned responses instead of HTTP
///     "cache_dir": "cache",                 // optional
///     "endpoints": {
///       "embed":    {"base_url": "...", "model_id": "...", "max_in_flight": 4, "timeout": 60},
///       "generate": {"base_url": "...", "model_id": "...", "temperature": 0, "style": "chat"},
///       "nli": {...}, "score": {...}, "rerank": {...}
///     },
///     "nugget_thresholds": {"<embedding model id>": 0.6035}
///   }
///
/// Relative paths resolve against the config file's directory. Environment
/// variables BIOACE_<CAPABILITY>_BASE_URL and BIOACE_<CAPABILITY>_API_KEY
/// override the file (e.g. BIOACE_EMBED_BASE_URL).
struct GatewayConfig {
    std::map<Capability, EndpointConfig> endpoints;
    std::optional<std::filesystem::path> fixture;
    std::optional<std::filesystem::path> cache_dir;
    std::map<std::string, double> nugget_thresholds;

    /// Defaults for every capability (model ids per capability, localhost URLs).
    static GatewayConfig defaults();

    const EndpointConfig& endpoint(Capability c) const;
};

GatewayConfig load_gateway_config(const std::filesystem::path& path);
void apply_environment_overrides(GatewayConfig& config);

std::shared_ptr<ModelGateway> make_gateway(const GatewayConfig& config, RetryPolicy retry = {});

}  // namespace bioace::gateway
