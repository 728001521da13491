#include <docroute/providers_remote.hpp>

#include <docroute/errors.hpp>
#include <docroute/providers_local.hpp>
#include <docroute/util.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace docroute {

namespace {

constexpr const char* kRewritePrompt =
    "Rewrite the user query for document retrieval. Respond with JSON "
    "{\"clarified_query\": string, \"keywords\": string[]}.";

constexpr const char* kParsePrompt =
    "Extract the company ticker symbols and fiscal years referenced in the "
    "user query. Respond with JSON {\"tickers\": string[], \"years\": int[]}. "
    "Use empty arrays when nothing is referenced.";

constexpr const char* kGeneratePrompt =
    "Answer the user question based solely on the provided context. If the "
    "context does not contain the answer, say so.";

constexpr const char* kJudgePrompt =
    "Score the candidate answer against the reference answer on a 1-10 "
    "integer scale (1 = completely incorrect or unrelated, 5 = partially "
    "correct with significant missing information, 8 = substantively correct "
    "with minor omissions, 10 = fully correct and complete). Respond with "
    "JSON {\"score\": int, \"justification\": string}.";

std::string load_prompt(const std::string& path, const char* fallback) {
    if (path.empty())
        return fallback;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("prompt template not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string message_content(const nlohmann::json& response) {
    if (!response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty())
        throw ProviderError("malformed chat response: missing choices");
    const auto& msg = response["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw ProviderError("malformed chat response: missing message content");
    return msg["message"]["content"].get<std::string>();
}

} // namespace

// ---------------------------------------------------------------------------
// RemoteClient
// ---------------------------------------------------------------------------

RemoteClient::RemoteClient(RemoteConfig config, std::shared_ptr<CacheStore> cache)
    : config_(std::move(config)), cache_(std::move(cache)) {}

RemoteClient::~RemoteClient() = default;

std::string RemoteClient::transport_post(const std::string& path, const std::string& body) {
    if (config_.base_url.empty())
        throw ProviderError("remote provider base_url is not configured");
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(path, headers, body, "application/json");
    if (!res)
        throw ProviderError("transport failure: " + httplib::to_string(res.error()),
                            /*retryable=*/true);
    if (res->status == 429 || res->status >= 500)
        throw ProviderError("server error " + std::to_string(res->status) + " from " + path,
                            /*retryable=*/true);
    if (res->status != 200)
        throw ProviderError("request failed with status " + std::to_string(res->status) + ": " +
                            res->body);
    return res->body;
}

nlohmann::json RemoteClient::post(const std::string& role, const std::string& path,
                                  const nlohmann::json& body) {
    const bool caching = cache_ && cache_->mode() != CacheMode::off;
    std::string key;
    if (caching) {
        key = CacheStore::key_for(role, body);
        if (auto hit = cache_->lookup(key))
            return nlohmann::json::parse(*hit);
        if (cache_->mode() == CacheMode::replay)
            cache_->miss(key, role);
    }

    std::string payload = body.dump();
    std::string response;
    int attempt = 0;
    for (;;) {
        try {
            response = transport_post(path, payload);
            break;
        } catch (const ProviderError& e) {
            if (!e.retryable || attempt >= config_.max_retries)
                throw ProviderError(std::string(e.what()) + " (role " + role + ", " +
                                    std::to_string(attempt + 1) + " attempts)");
            std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
            ++attempt;
        }
    }

    if (caching)
        cache_->store(key, role, response);
    return nlohmann::json::parse(response, nullptr, false);
}

// ---------------------------------------------------------------------------
// RemoteEmbedder
// ---------------------------------------------------------------------------

std::vector<std::vector<float>> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    const auto& cfg = client_->config();
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (std::size_t offset = 0; offset < texts.size(); offset += cfg.embed_batch_size) {
        std::size_t end = std::min(offset + cfg.embed_batch_size, texts.size());
        nlohmann::json body = {
            {"model", cfg.embed_model},
            {"dimensions", cfg.embed_dimension},
            {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(offset),
                                               texts.begin() + static_cast<std::ptrdiff_t>(end))}};
        auto response = client_->post("embed", "/v1/embeddings", body);
        if (!response.contains("data") || !response["data"].is_array() ||
            response["data"].size() != end - offset)
            throw ProviderError("malformed embeddings response");
        for (const auto& item : response["data"]) {
            if (!item.contains("embedding") || !item["embedding"].is_array())
                throw ProviderError("malformed embeddings response: missing embedding");
            std::vector<float> v = item["embedding"].get<std::vector<float>>();
            if (v.size() != cfg.embed_dimension)
                throw ProviderError("embedding dimension mismatch: got " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(cfg.embed_dimension));
            double norm = 0.0;
            for (float x : v)
                norm += static_cast<double>(x) * static_cast<double>(x);
            norm = std::sqrt(norm);
            if (norm <= 0.0)
                throw ProviderError("embedding has zero norm");
            for (float& x : v)
                x = static_cast<float>(x / norm);
            out.push_back(std::move(v));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// RemoteQueryRewriter
// ---------------------------------------------------------------------------

QueryRewrite RemoteQueryRewriter::rewrite(const std::string& query) {
    if (query.empty())
        throw ProviderError("rewrite_query: empty query");
    const auto& cfg = client_->config();
    nlohmann::json body = {
        {"model", cfg.chat_model},
        {"temperature", cfg.temperature},
        {"response_format", {{"type", "json_object"}}},
        {"messages",
         {{{"role", "system"}, {"content", load_prompt(cfg.rewrite_prompt_path, kRewritePrompt)}},
          {{"role", "user"}, {"content", query}}}}};
    auto response = client_->post("rewrite", "/v1/chat/completions", body);

    try {
        auto parsed = nlohmann::json::parse(message_content(response));
        QueryRewrite rw;
        rw.clarified_query = parsed.at("clarified_query").get<std::string>();
        rw.keywords = parsed.at("keywords").get<std::vector<std::string>>();
        if (rw.clarified_query.empty() || rw.keywords.empty())
            throw ProviderError("degenerate rewrite");
        return rw;
    } catch (const std::exception& e) {
        std::cerr << "warning: rewrite response malformed (" << e.what()
                  << "); falling back to local rewrite\n";
        return LocalQueryRewriter().rewrite(query);
    }
}

// ---------------------------------------------------------------------------
// RemoteMetadataParser
// ---------------------------------------------------------------------------

RoutingMetadata RemoteMetadataParser::parse(const std::string& query) {
    if (query.empty())
        throw ProviderError("parse_metadata: empty query");
    const auto& cfg = client_->config();
    nlohmann::json schema = {
        {"type", "object"},
        {"properties",
         {{"tickers", {{"type", "array"}, {"items", {{"type", "string"}}}}},
          {"years", {{"type", "array"}, {"items", {{"type", "integer"}}}}}}},
        {"required", {"tickers", "years"}},
        {"additionalProperties", false}};
    nlohmann::json body = {
        {"model", cfg.chat_model},
        {"temperature", cfg.temperature},
        {"response_format",
         {{"type", "json_schema"},
          {"json_schema", {{"name", "routing_metadata"}, {"strict", true}, {"schema", schema}}}}},
        {"messages",
         {{{"role", "system"}, {"content", load_prompt(cfg.parse_prompt_path, kParsePrompt)}},
          {{"role", "user"}, {"content", query}}}}};
    auto response = client_->post("parse", "/v1/chat/completions", body);

    RoutingMetadata meta;
    try {
        auto parsed = nlohmann::json::parse(message_content(response));
        auto tickers = parsed.at("tickers").get<std::vector<std::string>>();
        auto years = parsed.at("years").get<std::vector<int>>();
        for (auto& t : tickers) {
            for (char& c : t)
                if (c >= 'a' && c <= 'z')
                    c = static_cast<char>(c - 'a' + 'A');
            if (!t.empty() &&
                std::find(meta.tickers.begin(), meta.tickers.end(), t) == meta.tickers.end())
                meta.tickers.push_back(t);
        }
        for (int y : years)
            if (std::find(meta.years.begin(), meta.years.end(), y) == meta.years.end())
                meta.years.push_back(y);
    } catch (const std::exception& e) {
        // Schema violations route to the fallback, never crash.
        std::cerr << "warning: metadata response violates schema (" << e.what()
                  << "); treating as empty metadata\n";
        return RoutingMetadata{};
    }
    return meta;
}

// ---------------------------------------------------------------------------
// RemoteReranker
// ---------------------------------------------------------------------------

std::vector<RerankResult>
RemoteReranker::rerank(const std::string& query,
                       const std::vector<std::pair<std::uint32_t, std::string>>& candidates) {
    if (candidates.empty())
        throw ProviderError("rerank: empty candidate list");
    const auto& cfg = client_->config();
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& [chunk_id, text] : candidates)
        docs.push_back(text);
    nlohmann::json body = {{"model", cfg.rerank_model},
                           {"query", query},
                           {"documents", docs},
                           {"top_n", candidates.size()}};
    auto response = client_->post("rerank", "/v1/rerank", body);
    if (!response.contains("results") || !response["results"].is_array())
        throw ProviderError("malformed rerank response");

    std::vector<RerankResult> out;
    out.reserve(candidates.size());
    for (const auto& item : response["results"]) {
        if (!item.contains("index") || !item.contains("relevance_score"))
            throw ProviderError("malformed rerank response entry");
        std::size_t idx = item["index"].get<std::size_t>();
        if (idx >= candidates.size())
            throw ProviderError("rerank response index out of range");
        out.push_back({candidates[idx].first, item["relevance_score"].get<double>()});
    }
    if (out.size() != candidates.size())
        throw ProviderError("rerank response is missing candidates");
    std::sort(out.begin(), out.end(), [](const RerankResult& a, const RerankResult& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    return out;
}

// ---------------------------------------------------------------------------
// RemoteGenerator
// ---------------------------------------------------------------------------

std::string RemoteGenerator::generate(const std::string& query, const GenerationContext& context) {
    if (context.empty())
        throw ProviderError("generate: no context");
    const auto& cfg = client_->config();
    for (const auto& f : context.files) {
        std::size_t size = f.is_pdf ? f.bytes.size() : f.text.size();
        if (size > cfg.attachment_cap_bytes)
            throw ProviderError("generate: attachment " + f.name + " exceeds size cap (" +
                                std::to_string(size) + " > " +
                                std::to_string(cfg.attachment_cap_bytes) + " bytes)");
    }

    nlohmann::json content = nlohmann::json::array();
    std::ostringstream prompt;
    prompt << "Question: " << query << "\n\nContext:\n";
    for (const auto& [chunk_id, text] : context.chunks)
        prompt << "[chunk " << chunk_id << "]\n" << text << "\n\n";
    for (const auto& f : context.files) {
        if (f.is_pdf) {
            content.push_back({{"type", "file"},
                               {"file",
                                {{"filename", f.name},
                                 {"file_data", "data:application/pdf;base64," +
                                                   base64_encode(std::span<const std::uint8_t>(
                                                       f.bytes.data(), f.bytes.size()))}}}});
        } else {
            prompt << "[file " << f.name << "]\n" << f.text << "\n\n";
        }
    }
    content.push_back({{"type", "text"}, {"text", prompt.str()}});

    nlohmann::json body = {
        {"model", cfg.chat_model},
        {"temperature", cfg.temperature},
        {"messages",
         {{{"role", "system"}, {"content", load_prompt(cfg.generate_prompt_path, kGeneratePrompt)}},
          {{"role", "user"}, {"content", content}}}}};
    auto response = client_->post("generate", "/v1/chat/completions", body);
    return message_content(response);
}

// ---------------------------------------------------------------------------
// RemoteJudge
// ---------------------------------------------------------------------------

JudgeResult RemoteJudge::judge(const std::string& query, const std::string& answer,
                               const std::string& reference) {
    if (query.empty() || answer.empty() || reference.empty())
        throw ProviderError("judge: empty input");
    const auto& cfg = client_->config();
    std::ostringstream user;
    user << "Question: " << query << "\n\nReference answer: " << reference
         << "\n\nCandidate answer: " << answer;
    nlohmann::json body = {
        {"model", cfg.judge_model},
        {"temperature", cfg.temperature},
        {"response_format", {{"type", "json_object"}}},
        {"messages",
         {{{"role", "system"}, {"content", load_prompt(cfg.judge_prompt_path, kJudgePrompt)}},
          {{"role", "user"}, {"content", user.str()}}}}};
    auto response = client_->post("judge", "/v1/chat/completions", body);

    auto parsed = nlohmann::json::parse(message_content(response), nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("score") ||
        !parsed["score"].is_number_integer())
        throw ProviderError("malformed judge response", /*retryable=*/true);

    JudgeResult result;
    result.score = parsed["score"].get<int>();
    if (parsed.contains("justification") && parsed["justification"].is_string())
        result.justification = parsed["justification"].get<std::string>();
    if (result.score < 1 || result.score > 10) {
        std::cerr << "warning: judge score " << result.score << " outside [1,10]; clamping\n";
        result.score = std::clamp(result.score, 1, 10);
    }
    return result;
}

ProviderSet make_remote_providers(std::shared_ptr<RemoteClient> client) {
    ProviderSet set;
    set.embedder = std::make_shared<RemoteEmbedder>(client);
    set.rewriter = std::make_shared<RemoteQueryRewriter>(client);
    set.parser = std::make_shared<RemoteMetadataParser>(client);
    set.reranker = std::make_shared<RemoteReranker>(client);
    set.generator = std::make_shared<RemoteGenerator>(client);
    return set;
}

} // namespace docroute
