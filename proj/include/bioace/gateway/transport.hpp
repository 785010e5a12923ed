#pragma once

#include <json.hpp>

#include "bioace/gateway/endpoint.hpp"

namespace bioace::gateway {

/// Moves one JSON request to an endpoint and returns its JSON response.
/// Network-level failures throw Error(EndpointUnavailable); undecodable bodies
/// throw Error(MalformedResponse).
class Transport {
public:
    virtual ~Transport() = default;
    virtual nlohmann::json post(const EndpointConfig& endpoint, const nlohmann::json& request) = 0;
};

/// JSON over HTTP(S) using the common inference-server conventions.
class HttpTransport final : public Transport {
public:
    nlohmann::json post(const EndpointConfig& endpoint, const nlohmann::json& request) override;
};

}  // namespace bioace::gateway
