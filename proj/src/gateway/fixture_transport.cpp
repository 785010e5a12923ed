#include "bioace/gateway/fixture_transport.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "bioace/core/segmenter.hpp"
#include "bioace/error.hpp"
#include "bioace/retrieval/tokenizer.hpp"
#include "bioace/util/text.hpp"

namespace bioace::gateway {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> hash_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || std::isalnum(c)) {
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool contains(std::string_view hay, const json& needle) {
    if (needle.is_string()) return hay.find(needle.get<std::string>()) != std::string_view::npos;
    if (needle.is_array()) {
        for (const auto& n : needle) {
            if (!n.is_string() || hay.find(n.get<std::string>()) == std::string_view::npos) return false;
        }
        return true;
    }
    return needle.is_null();
}

std::string prompt_of(const json& request) {
    if (request.contains("prompt")) return request["prompt"].get<std::string>();
    if (request.contains("messages") && !request["messages"].empty())
        return request["messages"].back().at("content").get<std::string>();
    fail(ErrorKind::MalformedResponse, "fixture: generation request without prompt");
}

[[noreturn]] void no_canned(std::string_view capability, std::string_view what) {
    fail(ErrorKind::MalformedResponse,
         "fixture has no canned " + std::string(capability) + " response for " + std::string(what.substr(0, 120)));
}

}  // namespace

std::vector<double> hashed_embedding(std::string_view text, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    auto tokens = hash_tokens(text);
    if (tokens.empty()) tokens.emplace_back(text);
    for (const auto& t : tokens) {
        const auto h = fnv1a(t);
        v[h % dim] += (h >> 63) ? -1.0 : 1.0;
    }
    bool zero = true;
    for (double x : v) zero = zero && x == 0.0;
    // Opposite-signed collisions can cancel out; keep the vector usable.
    if (zero) v[fnv1a(text) % dim] = 1.0;
    return v;
}

double token_overlap(std::string_view query, std::string_view text) {
    const auto q = retrieval::tokenize(query);
    if (q.empty()) return 0.0;
    const auto t = retrieval::tokenize(text);
    const std::set<std::string> qs(q.begin(), q.end());
    const std::set<std::string> ts(t.begin(), t.end());
    std::size_t hit = 0;
    for (const auto& w : qs) hit += ts.count(w);
    return static_cast<double>(hit) / static_cast<double>(qs.size());
}

FixtureTransport::FixtureTransport(json fixture) : fixture_(std::move(fixture)) {
    if (!fixture_.is_object()) fail(ErrorKind::MalformedRecord, "fixture must be a JSON object");
}

FixtureTransport FixtureTransport::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open fixture " + path.string());
    try {
        return FixtureTransport(json::parse(in));
    } catch (const json::parse_error& e) {
        throw MalformedRecordError(path.filename().string(), 1, "<json>", e.what());
    }
}

json FixtureTransport::post(const EndpointConfig& endpoint, const json& request) {
    if (auto raw = fixture_.find("raw"); raw != fixture_.end()) {
        const auto dumped = request.dump();
        for (const auto& entry : *raw) {
            if (entry.value("capability", "") != to_string(endpoint.capability)) continue;
            if (contains(dumped, entry.value("contains", json()))) return entry.at("response");
        }
    }
    switch (endpoint.capability) {
    case Capability::embed: return embed(request);
    case Capability::generate: return generate(request);
    case Capability::nli: return nli(request);
    case Capability::score: return score(request);
    case Capability::rerank: return rerank(request);
    }
    fail(ErrorKind::MalformedResponse, "fixture: unknown capability");
}

json FixtureTransport::embed(const json& request) const {
    const auto section = fixture_.value("embed", json::object());
    const auto vectors = section.value("vectors", json::object());
    const bool hashed = section.value("fallback", "") == "hashed";
    const auto dim = section.value("dim", std::size_t{64});
    json data = json::array();
    std::size_t i = 0;
    for (const auto& t : request.at("input")) {
        const auto text = t.get<std::string>();
        json embedding;
        if (auto it = vectors.find(text); it != vectors.end()) {
            embedding = *it;
        } else if (hashed) {
            embedding = hashed_embedding(text, dim);
        } else {
            no_canned("embed", text);
        }
        data.push_back({{"index", i++}, {"embedding", std::move(embedding)}});
    }
    return {{"data", std::move(data)}};
}

json FixtureTransport::generate(const json& request) const {
    const auto prompt = prompt_of(request);
    const auto section = fixture_.value("generate", json::object());
    std::string text;
    bool found = false;
    for (const auto& rule : section.value("rules", json::array())) {
        if (!contains(prompt, rule.value("contains", json()))) continue;
        if (rule.contains("echo_after")) {
            const auto marker = rule["echo_after"].get<std::string>();
            const auto pos = prompt.rfind(marker);
            auto tail = pos == std::string::npos ? std::string_view(prompt)
                                                 : std::string_view(prompt).substr(pos + marker.size());
            tail = text::trim(tail);
            text = rule.value("split_sentences", false) ? text::join(core::segment_sentences(tail), "\n")
                                                        : std::string(tail);
        } else {
            text = rule.at("response").get<std::string>();
        }
        found = true;
        break;
    }
    if (!found) {
        if (!section.contains("default")) no_canned("generate", prompt);
        text = section["default"].get<std::string>();
    }
    if (request.contains("messages")) return {{"choices", json::array({{{"message", {{"content", text}}}}})}};
    return {{"choices", json::array({{{"text", text}}})}};
}

json FixtureTransport::nli(const json& request) const {
    const auto premise = request.at("premise").get<std::string>();
    const auto hypothesis = request.at("hypothesis").get<std::string>();
    const auto section = fixture_.value("nli", json::object());
    for (const auto& rule : section.value("rules", json::array())) {
        if (contains(premise, rule.value("premise_contains", json())) &&
            contains(hypothesis, rule.value("hypothesis_contains", json()))) {
            return {{"probabilities", rule.at("probs")}};
        }
    }
    if (section.value("fallback", "") != "lexical") no_canned("nli", hypothesis);
    const double s = token_overlap(hypothesis, premise);
    const double support = 0.05 + 0.9 * s;
    return {{"probabilities", {{"support", support}, {"refute", 0.05}, {"insufficient", std::max(0.0, 1.0 - support - 0.05)}}}};
}

json FixtureTransport::score(const json& request) const {
    const auto claim = request.at("claim").get<std::string>();
    const auto reference = request.at("reference").get<std::string>();
    const auto section = fixture_.value("score", json::object());
    for (const auto& rule : section.value("rules", json::array())) {
        if (contains(claim, rule.value("claim_contains", json())) &&
            contains(reference, rule.value("reference_contains", json()))) {
            return {{"score", rule.at("score")}};
        }
    }
    if (section.value("fallback", "") != "lexical") no_canned("score", claim);
    return {{"score", token_overlap(claim, reference)}};
}

json FixtureTransport::rerank(const json& request) const {
    const auto query = request.at("query").get<std::string>();
    const auto section = fixture_.value("rerank", json::object());
    const bool lexical = section.value("fallback", "") == "lexical";
    json results = json::array();
    std::size_t i = 0;
    for (const auto& d : request.at("documents")) {
        const auto doc = d.get<std::string>();
        std::optional<double> score;
        for (const auto& rule : section.value("rules", json::array())) {
            if (contains(doc, rule.value("document_contains", json())) &&
                contains(query, rule.value("query_contains", json()))) {
                score = rule.at("score").get<double>();
                break;
            }
        }
        if (!score) {
            if (!lexical) no_canned("rerank", doc);
            score = token_overlap(query, doc);
        }
        results.push_back({{"index", i++}, {"relevance_score", *score}});
    }
    return {{"results", std::move(results)}};
}

}  // namespace bioace::gateway
