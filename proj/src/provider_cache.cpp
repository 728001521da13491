#include <docroute/provider_cache.hpp>

#include <docroute/errors.hpp>
#include <docroute/util.hpp>

#include <fstream>

namespace docroute {

CacheMode cache_mode_from_string(const std::string& s) {
    if (s == "off")
        return CacheMode::off;
    if (s == "record")
        return CacheMode::record;
    if (s == "replay")
        return CacheMode::replay;
    throw UsageError("unknown cache mode: " + s + " (expected off|record|replay)");
}

CacheStore::CacheStore(std::filesystem::path file, CacheMode mode)
    : file_(std::move(file)), mode_(mode) {
    if (mode_ == CacheMode::off)
        return;
    std::ifstream in(file_, std::ios::binary);
    if (!in) {
        if (mode_ == CacheMode::replay)
            throw Error("replay cache not found: " + file_.string());
        return; // record mode starts a fresh file
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.contains("key") || !entry.contains("response"))
            throw FormatError("corrupt cache line in " + file_.string());
        responses_[entry["key"].get<std::string>()] = entry["response"].get<std::string>();
    }
}

std::string CacheStore::key_for(const std::string& role, const nlohmann::json& request) {
    // nlohmann::json objects iterate in sorted key order, so dump() is
    // already a canonical form.
    return role + ":" + to_hex(fnv1a64(role + "\n" + request.dump()));
}

std::optional<std::string> CacheStore::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = responses_.find(key);
    if (it == responses_.end())
        return std::nullopt;
    return it->second;
}

void CacheStore::store(const std::string& key, const std::string& role,
                       const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (responses_.count(key))
        return;
    responses_[key] = response;
    if (mode_ != CacheMode::record)
        return;
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    if (!out)
        throw Error("cannot append to cache: " + file_.string());
    nlohmann::json entry = {{"key", key}, {"role", role}, {"response", response}};
    out << entry.dump() << '\n';
}

void CacheStore::miss(const std::string& key, const std::string& role) const {
    throw ProviderError("replay cache miss for role " + role + ", key " + key);
}

std::size_t CacheStore::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return responses_.size();
}

} // namespace docroute
