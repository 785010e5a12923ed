#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "bioace/gateway/endpoint.hpp"

namespace bioace::gateway {

/// Content-addressed response cache. Entries live in memory for the process
/// lifetime and, when a directory is configured, on disk at
/// <dir>/<capability>/<first two hex digits>/<digest>.json.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path dir);

    static std::string digest(Capability capability, const std::string& model_id,
                              const std::string& canonical_input);

    std::optional<nlohmann::json> get(Capability capability, const std::string& model_id,
                                      const std::string& canonical_input);
    void put(Capability capability, const std::string& model_id, const std::string& canonical_input,
             const nlohmann::json& response);

    std::filesystem::path entry_path(Capability capability, const std::string& digest) const;
    const std::optional<std::filesystem::path>& directory() const { return dir_; }

private:
    std::optional<std::filesystem::path> dir_;
    std::mutex mutex_;
    std::unordered_map<std::string, nlohmann::json> memory_;
};

}  // namespace bioace::gateway
