#include "bioace/gateway/cache.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "bioace/error.hpp"
#include "bioace/util/digest.hpp"

namespace bioace::gateway {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::atomic<unsigned long> g_tmp_counter{0};

}  // namespace

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {}

std::string ResponseCache::digest(Capability capability, const std::string& model_id,
                                  const std::string& canonical_input) {
    std::string material;
    material.reserve(canonical_input.size() + model_id.size() + 16);
    material += to_string(capability);
    material += '\0';
    material += model_id;
    material += '\0';
    material += canonical_input;
    return sha256_hex(material);
}

fs::path ResponseCache::entry_path(Capability capability, const std::string& digest) const {
    return *dir_ / std::string(to_string(capability)) / digest.substr(0, 2) / (digest + ".json");
}

std::optional<nlohmann::json> ResponseCache::get(Capability capability, const std::string& model_id,
                                                 const std::string& canonical_input) {
    const auto key = digest(capability, model_id, canonical_input);
    {
        std::lock_guard lock(mutex_);
        if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;

    std::ifstream in(entry_path(capability, key), std::ios::binary);
    if (!in) return std::nullopt;
    nlohmann::json entry;
    try {
        entry = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    // Digest verification: the stored input must hash back to the file's key.
    if (!entry.is_object() || entry.value("key", "") != key || !entry.contains("response") ||
        !entry.contains("input") || !entry["input"].is_string() ||
        digest(capability, model_id, entry["input"].get<std::string>()) != key ||
        entry["input"].get<std::string>() != canonical_input) {
        return std::nullopt;
    }
    std::lock_guard lock(mutex_);
    return memory_.emplace(key, entry["response"]).first->second;
}

void ResponseCache::put(Capability capability, const std::string& model_id, const std::string& canonical_input,
                        const nlohmann::json& response) {
    const auto key = digest(capability, model_id, canonical_input);
    {
        std::lock_guard lock(mutex_);
        memory_.emplace(key, response);
    }
    if (!dir_) return;

    const auto path = entry_path(capability, key);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::IoError, "cannot create cache directory " + path.parent_path().string());

    nlohmann::json entry{{"key", key},
                         {"capability", std::string(to_string(capability))},
                         {"model", model_id},
                         {"input", canonical_input},
                         {"response", response},
                         {"created_at", utc_timestamp()}};
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << "." << g_tmp_counter.fetch_add(1);
    const auto tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::IoError, "cannot write cache entry " + tmp.string());
        out << entry.dump() << '\n';
        if (!out) fail(ErrorKind::IoError, "cannot write cache entry " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::IoError, "cannot publish cache entry " + path.string());
    }
}

}  // namespace bioace::gateway
