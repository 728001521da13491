#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace docroute {

/// Retrieval hyperparameters. The built-in defaults are the production
/// configuration; everything is overridable via config file, environment
/// variable or CLI flag (flag > env > file > default).
struct RetrievalConfig {
    std::size_t chunk_size = 2500;
    std::size_t overlap = 1250;
    std::size_t embed_dim = 1024;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    std::size_t fts_top_k = 20;
    std::size_t sem_top_k = 30;
    double dist_threshold = 2.0;
    double rrf_k = 60.0;
    std::size_t rerank_max_candidates = 30;
    double cum_threshold = 0.45;
    double cliff_threshold = 0.15;
    std::size_t context_limit = 10;
    int default_year = 2023;
    int year_min = 1990;
    int year_max = 2035;
};

/// Simple `key = value` config file; '#' starts a comment. Unknown keys
/// are rejected so typos fail loudly.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_file(const std::filesystem::path& file);

/// Lookup with the documented precedence: explicit value (CLI) beats the
/// DOCROUTE_<KEY> environment variable, which beats the config file, which
/// beats the built-in default.
std::optional<std::string> resolve_setting(const std::string& key, const ConfigMap& file_values);

/// Applies any recognized retrieval keys from file/environment onto cfg.
/// Returns the list of keys it consumed (for unknown-key checking).
void apply_retrieval_settings(RetrievalConfig& cfg, const ConfigMap& file_values);

std::size_t to_size(const std::string& key, const std::string& value);
double to_double(const std::string& key, const std::string& value);
int to_int(const std::string& key, const std::string& value);

} // namespace docroute
