#include "bioace/gateway/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "bioace/error.hpp"
#include "bioace/gateway/fixture_transport.hpp"

namespace bioace::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Capability kAll[] = {Capability::embed, Capability::generate, Capability::nli, Capability::score,
                               Capability::rerank};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

GatewayConfig GatewayConfig::defaults() {
    GatewayConfig c;
    auto add = [&](Capability cap, std::string url, std::string model) {
        EndpointConfig e;
        e.capability = cap;
        e.base_url = std::move(url);
        e.model_id = std::move(model);
        c.endpoints[cap] = std::move(e);
    };
    add(Capability::embed, "http://localhost:8080/v1/embeddings", "sup-simcse-roberta-large");
    add(Capability::generate, "http://localhost:8000/v1/completions", "Llama-3.3-70B-Instruct");
    add(Capability::nli, "http://localhost:8081/nli", "roberta-large-mnli");
    add(Capability::score, "http://localhost:8082/score", "alignscore");
    // No default reranker model exists; this slot must be configured for topk runs.
    add(Capability::rerank, "http://localhost:8083/rerank", "unspecified-reranker");
    return c;
}

const EndpointConfig& GatewayConfig::endpoint(Capability c) const {
    auto it = endpoints.find(c);
    if (it == endpoints.end()) fail(ErrorKind::PreconditionFailed, "no endpoint configured for " + std::string(to_string(c)));
    return it->second;
}

GatewayConfig load_gateway_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedRecordError(path.filename().string(), 1, "<json>", e.what());
    }
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    const auto file = path.filename().string();

    auto config = GatewayConfig::defaults();
    try {
        if (j.contains("fixture")) config.fixture = resolve(j["fixture"].get<std::string>());
        if (j.contains("cache_dir")) config.cache_dir = resolve(j["cache_dir"].get<std::string>());
        const auto endpoints = j.value("endpoints", json::object());
        for (const auto& [name, value] : endpoints.items()) {
            auto cap = parse_capability(name);
            if (!cap) throw MalformedRecordError(file, 1, "endpoints." + name, "unknown capability");
            auto& e = config.endpoints[*cap];
            e.capability = *cap;
            e.base_url = value.value("base_url", e.base_url);
            e.model_id = value.value("model_id", e.model_id);
            e.max_in_flight = value.value("max_in_flight", e.max_in_flight);
            e.timeout_seconds = value.value("timeout", e.timeout_seconds);
            e.temperature = value.value("temperature", e.temperature);
            e.api_key = value.value("api_key", e.api_key);
            const auto style = value.value("style", std::string("completion"));
            if (style != "completion" && style != "chat")
                throw MalformedRecordError(file, 1, "endpoints." + name + ".style", "expected completion or chat");
            e.style = style == "chat" ? PromptStyle::chat : PromptStyle::completion;
            if (e.max_in_flight < 1)
                throw MalformedRecordError(file, 1, "endpoints." + name + ".max_in_flight", "must be >= 1");
        }
        const auto thresholds = j.value("nugget_thresholds", json::object());
        for (const auto& [model, t] : thresholds.items())
            config.nugget_thresholds[model] = t.get<double>();
    } catch (const json::type_error& e) {
        throw MalformedRecordError(file, 1, "<config>", e.what());
    }
    apply_environment_overrides(config);
    return config;
}

void apply_environment_overrides(GatewayConfig& config) {
    for (auto cap : kAll) {
        const auto prefix = "BIOACE_" + upper(to_string(cap));
        auto& e = config.endpoints[cap];
        e.capability = cap;
        if (const char* url = std::getenv((prefix + "_BASE_URL").c_str())) e.base_url = url;
        if (const char* key = std::getenv((prefix + "_API_KEY").c_str())) e.api_key = key;
    }
}

std::shared_ptr<ModelGateway> make_gateway(const GatewayConfig& config, RetryPolicy retry) {
    std::shared_ptr<Transport> transport;
    if (config.fixture) {
        transport = std::make_shared<FixtureTransport>(FixtureTransport::from_file(*config.fixture));
    } else {
        transport = std::make_shared<HttpTransport>();
    }
    auto cache = config.cache_dir ? std::make_shared<ResponseCache>(*config.cache_dir) : std::make_shared<ResponseCache>();
    return std::make_shared<ModelGateway>(std::move(transport), std::move(cache), std::move(retry));
}

}  // namespace bioace::gateway
