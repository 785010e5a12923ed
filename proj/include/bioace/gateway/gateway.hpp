#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bioace/gateway/cache.hpp"
#include "bioace/gateway/endpoint.hpp"
#include "bioace/gateway/labels.hpp"
#include "bioace/gateway/transport.hpp"
#include "bioace/gateway/types.hpp"

namespace bioace::gateway {

struct RetryPolicy {
    /// Sleep before each network retry; its length is the number of retries.
    std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(4)};
};

struct GatewayStats {
    std::size_t network_requests = 0;
    std::size_t cache_hits = 0;
};

/// Cached, concurrency-limited client for every model capability. Safe to
/// share between threads.
class ModelGateway {
public:
    explicit ModelGateway(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache = nullptr,
                          RetryPolicy retry = {});
    ~ModelGateway();

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts, const EndpointConfig& endpoint);
    std::string generate_text(const std::string& prompt, const EndpointConfig& endpoint);
    std::string generate_label(const std::string& prompt, const LabelSet& allowed, const EndpointConfig& endpoint);
    NliResult nli(const std::string& premise, const std::string& hypothesis, const EndpointConfig& endpoint);
    double score_pair(const std::string& claim, const std::string& reference, const EndpointConfig& endpoint);
    std::vector<RerankedDoc> rerank(const std::string& query, const std::vector<RerankCandidate>& candidates,
                                    const EndpointConfig& endpoint);

    GatewayStats stats() const;

private:
    class Limiter;

    nlohmann::json cached_call(const EndpointConfig& endpoint, const std::string& canonical_input,
                               const nlohmann::json& request,
                               const std::function<void(const nlohmann::json&)>& validate = {});
    nlohmann::json network_call(const EndpointConfig& endpoint, const nlohmann::json& request);
    Limiter& limiter_for(const EndpointConfig& endpoint);
    void check_dimension(const EndpointConfig& endpoint, std::size_t dim);

    std::shared_ptr<Transport> transport_;
    std::shared_ptr<ResponseCache> cache_;
    RetryPolicy retry_;

    std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Limiter>> limiters_;
    std::map<std::string, std::size_t> dims_;
    std::atomic<std::size_t> network_requests_{0};
    std::atomic<std::size_t> cache_hits_{0};
};

void require_capability(const EndpointConfig& endpoint, Capability expected);

}  // namespace bioace::gateway
