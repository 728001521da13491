#include <docroute/config.hpp>

#include <docroute/errors.hpp>

#include <cstdlib>
#include <fstream>
#include <set>

namespace docroute {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        // retrieval (Appendix-style names)
        "chunk_size", "overlap", "embed_dim", "bm25_k1", "bm25_b", "fts_top_k", "sem_top_k",
        "dist_threshold", "rrf_k", "rerank_max_candidates", "cum_threshold", "cliff_threshold",
        "context_limit", "default_year", "year_min", "year_max",
        // providers
        "base_url", "api_key", "embed_model", "chat_model", "rerank_model", "judge_model",
        "embed_batch_size", "temperature", "max_retries", "timeout_seconds",
        "attachment_cap_bytes", "rewrite_prompt_path", "parse_prompt_path",
        "generate_prompt_path", "judge_prompt_path",
        // cache / evaluation
        "cache_mode", "cache_path", "std_mode", "judge_retries", "parallelism"};
    return keys;
}

} // namespace

ConfigMap parse_config_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw UsageError("config file not found: " + file.string());
    ConfigMap values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + " is not key = value: " +
                             line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw UsageError("unknown config key: " + key);
        values[key] = value;
    }
    return values;
}

std::optional<std::string> resolve_setting(const std::string& key, const ConfigMap& file_values) {
    std::string env_key = "DOCROUTE_";
    for (char c : key)
        env_key.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
    if (const char* env = std::getenv(env_key.c_str()))
        return std::string(env);
    auto it = file_values.find(key);
    if (it != file_values.end())
        return it->second;
    return std::nullopt;
}

std::size_t to_size(const std::string& key, const std::string& value) {
    try {
        return static_cast<std::size_t>(std::stoull(value));
    } catch (const std::exception&) {
        throw UsageError("config key " + key + " expects an unsigned integer, got: " + value);
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw UsageError("config key " + key + " expects a number, got: " + value);
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        return std::stoi(value);
    } catch (const std::exception&) {
        throw UsageError("config key " + key + " expects an integer, got: " + value);
    }
}

void apply_retrieval_settings(RetrievalConfig& cfg, const ConfigMap& file_values) {
    auto size_of = [&](const char* key, std::size_t& field) {
        if (auto v = resolve_setting(key, file_values))
            field = to_size(key, *v);
    };
    auto double_of = [&](const char* key, double& field) {
        if (auto v = resolve_setting(key, file_values))
            field = to_double(key, *v);
    };
    auto int_of = [&](const char* key, int& field) {
        if (auto v = resolve_setting(key, file_values))
            field = to_int(key, *v);
    };
    size_of("chunk_size", cfg.chunk_size);
    size_of("overlap", cfg.overlap);
    size_of("embed_dim", cfg.embed_dim);
    double_of("bm25_k1", cfg.bm25_k1);
    double_of("bm25_b", cfg.bm25_b);
    size_of("fts_top_k", cfg.fts_top_k);
    size_of("sem_top_k", cfg.sem_top_k);
    double_of("dist_threshold", cfg.dist_threshold);
    double_of("rrf_k", cfg.rrf_k);
    size_of("rerank_max_candidates", cfg.rerank_max_candidates);
    double_of("cum_threshold", cfg.cum_threshold);
    double_of("cliff_threshold", cfg.cliff_threshold);
    size_of("context_limit", cfg.context_limit);
    int_of("default_year", cfg.default_year);
    int_of("year_min", cfg.year_min);
    int_of("year_max", cfg.year_max);
}

} // namespace docroute
