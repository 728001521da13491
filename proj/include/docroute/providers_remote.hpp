#pragma once

#include <docroute/provider_cache.hpp>
#include <docroute/providers.hpp>

#include <memory>
#include <string>

#include <json.hpp>

namespace docroute {

/// Connection and model settings for the remote providers. Credentials are
/// normally supplied through DOCROUTE_* environment variables; see config.
struct RemoteConfig {
    std::string base_url;    // e.g. http://127.0.0.1:8901
    std::string api_key;     // sent as a bearer token when non-empty
    std::string embed_model = "text-embedding-3-small";
    std::string chat_model = "gpt-4.1";
    std::string rerank_model = "jina-reranker-v2";
    std::string judge_model = "gpt-4.1";
    std::size_t embed_dimension = 1024;
    std::size_t embed_batch_size = 32;
    double temperature = 0.0;
    int max_retries = 3;
    int timeout_seconds = 60;
    std::size_t attachment_cap_bytes = 32 * 1024 * 1024;

    // Optional prompt-template override files; built-in defaults otherwise.
    std::string rewrite_prompt_path;
    std::string parse_prompt_path;
    std::string generate_prompt_path;
    std::string judge_prompt_path;
};

/// Thin HTTP JSON client shared by all remote providers. Applies the
/// record/replay cache when one is attached: replay mode answers entirely
/// from the cache, record mode appends each fresh response. Transient
/// transport failures are retried with exponential backoff before a
/// non-retryable ProviderError is raised.
class RemoteClient {
public:
    RemoteClient(RemoteConfig config, std::shared_ptr<CacheStore> cache = nullptr);
    ~RemoteClient();

    nlohmann::json post(const std::string& role, const std::string& path,
                        const nlohmann::json& body);

    const RemoteConfig& config() const { return config_; }

private:
    std::string transport_post(const std::string& path, const std::string& body);

    RemoteConfig config_;
    std::shared_ptr<CacheStore> cache_;
};

/// POST /v1/embeddings; responses are re-normalized to unit length.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(std::shared_ptr<RemoteClient> client) : client_(std::move(client)) {}

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return client_->config().embed_dimension; }

private:
    std::shared_ptr<RemoteClient> client_;
};

/// POST /v1/chat/completions with a JSON response format. A malformed
/// response falls back to the local rewrite behavior with a warning.
class RemoteQueryRewriter : public QueryRewriter {
public:
    explicit RemoteQueryRewriter(std::shared_ptr<RemoteClient> client)
        : client_(std::move(client)) {}

    QueryRewrite rewrite(const std::string& query) override;

private:
    std::shared_ptr<RemoteClient> client_;
};

/// POST /v1/chat/completions requesting schema {tickers: string[],
/// years: int[]} under constrained decoding. A schema violation is treated
/// as empty metadata (routes to fallback), never a crash.
class RemoteMetadataParser : public MetadataParser {
public:
    explicit RemoteMetadataParser(std::shared_ptr<RemoteClient> client)
        : client_(std::move(client)) {}

    RoutingMetadata parse(const std::string& query) override;

private:
    std::shared_ptr<RemoteClient> client_;
};

/// POST /v1/rerank (cross-encoder service schema).
class RemoteReranker : public Reranker {
public:
    explicit RemoteReranker(std::shared_ptr<RemoteClient> client) : client_(std::move(client)) {}

    std::vector<RerankResult>
    rerank(const std::string& query,
           const std::vector<std::pair<std::uint32_t, std::string>>& candidates) override;

private:
    std::shared_ptr<RemoteClient> client_;
};

/// POST /v1/chat/completions. Chunk context is concatenated into the user
/// message; file attachments are carried base64-encoded (pdf) or inlined
/// (txt). Attachments over the size cap fail before transmission.
class RemoteGenerator : public Generator {
public:
    explicit RemoteGenerator(std::shared_ptr<RemoteClient> client) : client_(std::move(client)) {}

    std::string generate(const std::string& query, const GenerationContext& context) override;

private:
    std::shared_ptr<RemoteClient> client_;
};

/// POST /v1/chat/completions with a structured {score, justification}
/// response; out-of-range scores are clamped into [1, 10] with a warning.
class RemoteJudge : public Judge {
public:
    explicit RemoteJudge(std::shared_ptr<RemoteClient> client) : client_(std::move(client)) {}

    JudgeResult judge(const std::string& query, const std::string& answer,
                      const std::string& reference) override;

private:
    std::shared_ptr<RemoteClient> client_;
};

ProviderSet make_remote_providers(std::shared_ptr<RemoteClient> client);

} // namespace docroute
