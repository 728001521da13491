#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

namespace docroute {

enum class CacheMode { off, record, replay };

CacheMode cache_mode_from_string(const std::string& s);

/// Record/replay cache for provider calls, keyed by (role, canonicalized
/// request hash). Backed by an append-only line-delimited file of
/// {key, role, response} records. Replay mode never touches the network;
/// a replay miss is an error naming the missing key. Writes are
/// serialized; reads are safe under the same lock.
class CacheStore {
public:
    CacheStore(std::filesystem::path file, CacheMode mode);

    CacheMode mode() const { return mode_; }

    /// Canonical key: role + FNV-1a64 of the request serialized with
    /// sorted object keys, so field order never changes the key.
    static std::string key_for(const std::string& role, const nlohmann::json& request);

    std::optional<std::string> lookup(const std::string& key) const;

    /// Appends to the backing file (record mode) and updates the in-memory
    /// table. Re-recording an existing key is a no-op.
    void store(const std::string& key, const std::string& role, const std::string& response);

    /// Replay-mode miss helper: throws an error identifying the key.
    [[noreturn]] void miss(const std::string& key, const std::string& role) const;

    std::size_t size() const;

private:
    std::filesystem::path file_;
    CacheMode mode_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> responses_;
};

} // namespace docroute
