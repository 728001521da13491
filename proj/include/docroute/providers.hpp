#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace docroute {

/// Output of the query-rewrite step: a clarified query for semantic search
/// and extracted keywords for lexical search.
struct QueryRewrite {
    std::string clarified_query;
    std::vector<std::string> keywords;
};

/// Document-identifying metadata extracted from a query. Tickers are
/// uppercased, deduplicated, order-preserving; years deduplicated.
struct RoutingMetadata {
    std::vector<std::string> tickers;
    std::vector<int> years;
};

struct JudgeResult {
    int score = 1; // integer in [1, 10]
    std::string justification;
};

struct FileAttachment {
    std::string name;
    std::string text;                // plain-text content ("" for pdf)
    std::vector<std::uint8_t> bytes; // raw bytes, base64-encoded on the wire
    bool is_pdf = false;
};

/// Context handed to the generator: either ordered chunk texts (CBR/HDRR)
/// or file attachments (SFR).
struct GenerationContext {
    std::vector<std::pair<std::uint32_t, std::string>> chunks; // (chunk_id, text)
    std::vector<FileAttachment> files;

    bool empty() const { return chunks.empty() && files.empty(); }
};

struct RerankResult {
    std::uint32_t chunk_id = 0;
    double score = 0.0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    /// One unit-norm vector per input text.
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dimension() const = 0;
};

class QueryRewriter {
public:
    virtual ~QueryRewriter() = default;
    virtual QueryRewrite rewrite(const std::string& query) = 0;
};

class MetadataParser {
public:
    virtual ~MetadataParser() = default;
    virtual RoutingMetadata parse(const std::string& query) = 0;
};

class Reranker {
public:
    virtual ~Reranker() = default;
    /// One score per candidate, higher = more relevant; output sorted
    /// descending, ties by ascending chunk_id.
    virtual std::vector<RerankResult>
    rerank(const std::string& query,
           const std::vector<std::pair<std::uint32_t, std::string>>& candidates) = 0;
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const std::string& query, const GenerationContext& context) = 0;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeResult judge(const std::string& query, const std::string& answer,
                              const std::string& reference) = 0;
};

struct ProviderSet {
    std::shared_ptr<Embedder> embedder;
    std::shared_ptr<QueryRewriter> rewriter;
    std::shared_ptr<MetadataParser> parser;
    std::shared_ptr<Reranker> reranker;
    std::shared_ptr<Generator> generator;
};

} // namespace docroute
