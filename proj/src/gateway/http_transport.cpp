#include "bioace/gateway/transport.hpp"

#include <regex>

#include <httplib.h>

#include "bioace/error.hpp"

namespace bioace::gateway {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) fail(ErrorKind::EndpointUnavailable, "invalid endpoint URL \"" + url + "\"");
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

nlohmann::json HttpTransport::post(const EndpointConfig& endpoint, const nlohmann::json& request) {
    const auto url = split_url(endpoint.base_url);
    httplib::Client client(url.origin);
    const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
    const auto usecs = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

    auto res = client.Post(url.path, headers, request.dump(), "application/json");
    if (!res) {
        fail(ErrorKind::EndpointUnavailable,
             endpoint.base_url + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        fail(ErrorKind::EndpointUnavailable, endpoint.base_url + ": HTTP " + std::to_string(res->status));
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::MalformedResponse, endpoint.base_url + ": response is not JSON: " + e.what());
    }
}

}  // namespace bioace::gateway
