#include "bioace/gateway/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include "bioace/error.hpp"
#include "bioace/util/text.hpp"

namespace bioace::gateway {

using nlohmann::json;

class ModelGateway::Limiter {
public:
    explicit Limiter(std::size_t slots) : free_(std::max<std::size_t>(1, slots)) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return free_ > 0; });
        --free_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++free_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t free_;
};

namespace {

[[noreturn]] void malformed(const EndpointConfig& endpoint, const std::string& what) {
    fail(ErrorKind::MalformedResponse, endpoint.model_id + " (" + std::string(to_string(endpoint.capability)) +
                                           "): " + what);
}

double finite_number(const EndpointConfig& endpoint, const json& v, const std::string& what) {
    if (!v.is_number()) malformed(endpoint, what + " is not a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) malformed(endpoint, what + " is not finite");
    return x;
}

std::string completion_text(const EndpointConfig& endpoint, const json& r) {
    try {
        if (r.contains("choices") && r["choices"].is_array() && !r["choices"].empty()) {
            const auto& c = r["choices"][0];
            if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
            if (c.contains("message") && c["message"].contains("content")) return c["message"]["content"].get<std::string>();
        }
        for (const char* key : {"text", "response", "content", "output"}) {
            if (r.contains(key) && r[key].is_string()) return r[key].get<std::string>();
        }
    } catch (const json::exception& e) {
        malformed(endpoint, e.what());
    }
    malformed(endpoint, "no completion text in response");
}

enum class NliClass { support, refute, insufficient };

std::optional<NliClass> nli_class(std::string_view label) {
    const auto key = text::to_lower(text::trim(label));
    if (key == "support" || key == "supports" || key == "entailment" || key == "entail") return NliClass::support;
    if (key == "refute" || key == "refutes" || key == "contradiction" || key == "contradict") return NliClass::refute;
    if (key == "insufficient" || key == "insufficient information" || key == "neutral" ||
        key == "not enough info" || key == "nei")
        return NliClass::insufficient;
    return std::nullopt;
}

NliResult parse_nli(const EndpointConfig& endpoint, const json& r) {
    std::optional<double> probs[3];
    auto assign = [&](std::string_view label, const json& value) {
        if (auto c = nli_class(label)) {
            auto& slot = probs[static_cast<int>(*c)];
            if (slot) malformed(endpoint, "duplicate NLI class \"" + std::string(label) + "\"");
            slot = finite_number(endpoint, value, "NLI probability");
        }
    };
    const json* body = &r;
    for (const char* key : {"probabilities", "scores", "probs"}) {
        if (r.contains(key)) {
            body = &r[key];
            break;
        }
    }
    if (body->is_object()) {
        for (auto it = body->begin(); it != body->end(); ++it) assign(it.key(), it.value());
    } else if (body->is_array()) {
        for (const auto& item : *body) {
            if (!item.is_object() || !item.contains("label") || !item["label"].is_string() || !item.contains("score"))
                malformed(endpoint, "NLI list entries need label and score");
            assign(item["label"].get<std::string>(), item["score"]);
        }
    } else {
        malformed(endpoint, "unrecognized NLI response shape");
    }
    for (int i = 0; i < 3; ++i) {
        if (!probs[i]) malformed(endpoint, "NLI response is missing a class");
        if (*probs[i] < 0.0) malformed(endpoint, "negative NLI probability");
    }
    const double total = *probs[0] + *probs[1] + *probs[2];
    if (!(total > 0.0)) malformed(endpoint, "NLI probabilities sum to zero");
    NliResult out{*probs[0], *probs[1], *probs[2]};
    if (std::abs(total - 1.0) > 1e-6) {
        out.p_support /= total;
        out.p_refute /= total;
        out.p_insufficient /= total;
    }
    return out;
}

}  // namespace

void require_capability(const EndpointConfig& endpoint, Capability expected) {
    if (endpoint.capability != expected) {
        fail(ErrorKind::PreconditionFailed, "endpoint " + endpoint.model_id + " has capability " +
                                                std::string(to_string(endpoint.capability)) + ", expected " +
                                                std::string(to_string(expected)));
    }
}

ModelGateway::ModelGateway(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache,
                           RetryPolicy retry)
    : transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      retry_(std::move(retry)) {}

ModelGateway::~ModelGateway() = default;

GatewayStats ModelGateway::stats() const { return {network_requests_.load(), cache_hits_.load()}; }

ModelGateway::Limiter& ModelGateway::limiter_for(const EndpointConfig& endpoint) {
    std::lock_guard lock(mutex_);
    auto& slot = limiters_[endpoint.key()];
    if (!slot) slot = std::make_unique<Limiter>(endpoint.max_in_flight);
    return *slot;
}

void ModelGateway::check_dimension(const EndpointConfig& endpoint, std::size_t dim) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = dims_.emplace(endpoint.key(), dim);
    if (!inserted && it->second != dim) {
        fail(ErrorKind::DimensionMismatch, endpoint.model_id + " returned a " + std::to_string(dim) +
                                               "-dim vector after " + std::to_string(it->second) + "-dim ones");
    }
}

json ModelGateway::network_call(const EndpointConfig& endpoint, const json& request) {
    auto& limiter = limiter_for(endpoint);
    for (std::size_t attempt = 0;; ++attempt) {
        try {
            struct Slot {
                Limiter& limiter;
                explicit Slot(Limiter& l) : limiter(l) { limiter.acquire(); }
                ~Slot() { limiter.release(); }
            } slot(limiter);
            ++network_requests_;
            return transport_->post(endpoint, request);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EndpointUnavailable || attempt >= retry_.backoff.size()) throw;
        }
        std::this_thread::sleep_for(retry_.backoff[attempt]);
    }
}

json ModelGateway::cached_call(const EndpointConfig& endpoint, const std::string& canonical_input,
                               const json& request, const std::function<void(const json&)>& validate) {
    if (auto hit = cache_->get(endpoint.capability, endpoint.model_id, canonical_input)) {
        ++cache_hits_;
        return *hit;
    }
    auto response = network_call(endpoint, request);
    // Responses that fail to parse never reach the cache.
    if (validate) validate(response);
    cache_->put(endpoint.capability, endpoint.model_id, canonical_input, response);
    return response;
}

std::vector<EmbeddingVector> ModelGateway::embed_batch(const std::vector<std::string>& texts,
                                                       const EndpointConfig& endpoint) {
    require_capability(endpoint, Capability::embed);
    if (texts.empty()) fail(ErrorKind::EmptyInput, "embed_batch called with no texts");

    std::vector<std::string> canon(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (texts[i].empty()) fail(ErrorKind::EmptyInput, "embed_batch text #" + std::to_string(i) + " is empty");
        canon[i] = text::nfc(texts[i]);
    }

    auto key_of = [](const std::string& c) { return json{{"input", c}}.dump(); };
    std::unordered_map<std::string, std::vector<double>> resolved;
    std::vector<std::string> missing;
    std::set<std::string> queued;
    for (const auto& c : canon) {
        if (resolved.count(c) || queued.count(c)) continue;
        if (auto hit = cache_->get(Capability::embed, endpoint.model_id, key_of(c))) {
            ++cache_hits_;
            resolved.emplace(c, hit->get<std::vector<double>>());
        } else {
            missing.push_back(c);
            queued.insert(c);
        }
    }

    if (!missing.empty()) {
        const auto response = network_call(endpoint, json{{"model", endpoint.model_id}, {"input", missing}});
        if (!response.contains("data") || !response["data"].is_array() || response["data"].size() != missing.size())
            malformed(endpoint, "embedding response has the wrong number of vectors");
        std::vector<const json*> ordered(missing.size(), nullptr);
        for (std::size_t i = 0; i < missing.size(); ++i) {
            const auto& item = response["data"][i];
            const std::size_t at = item.contains("index") ? item["index"].get<std::size_t>() : i;
            if (at >= missing.size() || ordered[at]) malformed(endpoint, "embedding response indices are not a permutation");
            ordered[at] = &item;
        }
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (!ordered[i]->contains("embedding") || !(*ordered[i])["embedding"].is_array())
                malformed(endpoint, "embedding entry without vector");
            std::vector<double> v;
            for (const auto& x : (*ordered[i])["embedding"]) v.push_back(finite_number(endpoint, x, "embedding value"));
            if (v.empty()) malformed(endpoint, "empty embedding");
            check_dimension(endpoint, v.size());
            cache_->put(Capability::embed, endpoint.model_id, key_of(missing[i]), v);
            resolved.emplace(missing[i], std::move(v));
        }
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& c : canon) {
        const auto& v = resolved.at(c);
        check_dimension(endpoint, v.size());
        out.push_back({v});
    }
    return out;
}

std::string ModelGateway::generate_text(const std::string& prompt, const EndpointConfig& endpoint) {
    require_capability(endpoint, Capability::generate);
    const auto canon = text::nfc(prompt);
    const bool chat = endpoint.style == PromptStyle::chat;
    json request{{"model", endpoint.model_id}, {"temperature", endpoint.temperature}};
    if (chat) {
        request["messages"] = json::array({{{"role", "user"}, {"content", canon}}});
    } else {
        request["prompt"] = canon;
    }
    const auto input = json{{"prompt", canon}, {"temperature", endpoint.temperature}, {"style", chat ? "chat" : "completion"}}.dump();
    const auto check = [&](const json& r) { completion_text(endpoint, r); };
    return completion_text(endpoint, cached_call(endpoint, input, request, check));
}

std::string ModelGateway::generate_label(const std::string& prompt, const LabelSet& allowed,
                                         const EndpointConfig& endpoint) {
    if (allowed.empty()) fail(ErrorKind::PreconditionFailed, "generate_label needs a non-empty label set");
    const auto first = generate_text(prompt, endpoint);
    if (auto label = allowed.match(first)) return *label;
    const auto retry = generate_text(prompt + "\n\nAnswer with exactly one of: " + allowed.listing() + ".", endpoint);
    if (auto label = allowed.match(retry)) return *label;
    throw UnparsableLabelError(retry, "first attempt \"" + first + "\"");
}

NliResult ModelGateway::nli(const std::string& premise, const std::string& hypothesis, const EndpointConfig& endpoint) {
    require_capability(endpoint, Capability::nli);
    const auto p = text::nfc(premise);
    const auto h = text::nfc(hypothesis);
    const auto input = json{{"premise", p}, {"hypothesis", h}}.dump();
    const auto check = [&](const json& r) { parse_nli(endpoint, r); };
    return parse_nli(endpoint, cached_call(endpoint, input,
                                           json{{"model", endpoint.model_id}, {"premise", p}, {"hypothesis", h}}, check));
}

double ModelGateway::score_pair(const std::string& claim, const std::string& reference,
                                const EndpointConfig& endpoint) {
    require_capability(endpoint, Capability::score);
    const auto c = text::nfc(claim);
    const auto r = text::nfc(reference);
    const auto input = json{{"claim", c}, {"reference", r}}.dump();
    const auto parse = [&](const json& response) {
        if (!response.is_object() || !response.contains("score")) malformed(endpoint, "score response without score");
        return finite_number(endpoint, response["score"], "score");
    };
    return parse(cached_call(endpoint, input, json{{"model", endpoint.model_id}, {"claim", c}, {"reference", r}},
                             [&](const json& response) { parse(response); }));
}

std::vector<RerankedDoc> ModelGateway::rerank(const std::string& query, const std::vector<RerankCandidate>& candidates,
                                              const EndpointConfig& endpoint) {
    require_capability(endpoint, Capability::rerank);
    if (candidates.empty()) fail(ErrorKind::PreconditionFailed, "rerank called with no candidates");
    const auto q = text::nfc(query);
    std::vector<std::string> docs;
    docs.reserve(candidates.size());
    for (const auto& c : candidates) docs.push_back(text::nfc(c.text));
    const auto input = json{{"query", q}, {"documents", docs}}.dump();
    const auto parse = [&](const json& response) {
        if (!response.contains("results") || !response["results"].is_array())
            malformed(endpoint, "rerank response without results");
        std::vector<std::optional<double>> scores(candidates.size());
        for (const auto& r : response["results"]) {
            if (!r.is_object() || !r.contains("index") || !r["index"].is_number_integer())
                malformed(endpoint, "rerank result without index");
            const auto idx = r["index"].get<long long>();
            if (idx < 0 || static_cast<std::size_t>(idx) >= candidates.size() || scores[idx])
                malformed(endpoint, "rerank indices are not a permutation of the candidates");
            const json& s = r.contains("relevance_score") ? r["relevance_score"] : r.value("score", json());
            scores[idx] = finite_number(endpoint, s, "rerank score");
        }
        for (const auto& s : scores) {
            if (!s) malformed(endpoint, "rerank response omits a candidate");
        }
        return scores;
    };
    const auto scores = parse(cached_call(endpoint, input,
                                          json{{"model", endpoint.model_id}, {"query", q}, {"documents", docs}},
                                          [&](const json& response) { parse(response); }));
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return *scores[a] > *scores[b]; });
    std::vector<RerankedDoc> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back({candidates[i].pmid, *scores[i]});
    return out;
}

}  // namespace bioace::gateway
