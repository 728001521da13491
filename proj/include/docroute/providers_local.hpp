#pragma once

#include <docroute/providers.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace docroute {

/// Symbol -> aliases table used by the local metadata parser. Stored on
/// disk as TICKER<TAB>alias lines; a symbol may appear on multiple lines.
/// Symbols themselves always match.
class TickerLexicon {
public:
    void register_symbol(const std::string& ticker);
    void register_alias(const std::string& ticker, const std::string& alias);

    const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

    void save(const std::filesystem::path& file) const;
    static TickerLexicon load(const std::filesystem::path& file);

private:
    // ticker -> lowercased aliases (the ticker itself is matched implicitly)
    std::map<std::string, std::vector<std::string>> entries_;
};

/// All local providers are pure functions of their inputs (plus the
/// lexicon): repeated calls agree exactly, which makes the full pipeline
/// hermetic and byte-reproducible.

/// Token feature hashing into `dimension` buckets, L2-normalized.
/// tf-linear before normalization, so repeated text embeds parallel.
class LocalEmbedder : public Embedder {
public:
    explicit LocalEmbedder(std::size_t dimension = 1024) : dim_(dimension) {}

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
};

/// Clarified query = input verbatim; keywords = tokens minus a small fixed
/// stop-list, falling back to the full token list when everything was a
/// stop-word (and to the raw query when it has no tokens at all).
class LocalQueryRewriter : public QueryRewriter {
public:
    QueryRewrite rewrite(const std::string& query) override;
};

/// Whole-word, case-insensitive lexicon matching (symbols and aliases)
/// plus 4-digit year extraction within [year_min, year_max]. Tickers are
/// returned in order of first occurrence.
class LocalMetadataParser : public MetadataParser {
public:
    explicit LocalMetadataParser(TickerLexicon lexicon, int year_min = 1990, int year_max = 2035)
        : lexicon_(std::move(lexicon)), year_min_(year_min), year_max_(year_max) {}

    RoutingMetadata parse(const std::string& query) override;

private:
    TickerLexicon lexicon_;
    int year_min_;
    int year_max_;
};

/// Deterministic lexical stand-in for a cross-encoder: token-set Jaccard
/// similarity between query and chunk text.
class LocalReranker : public Reranker {
public:
    std::vector<RerankResult>
    rerank(const std::string& query,
           const std::vector<std::pair<std::uint32_t, std::string>>& candidates) override;
};

/// Canonical digest answer: the query followed by the ordered chunks
/// (id + text) or file attachments (name + text for txt) it received.
/// Echoing the context verbatim keeps the digest deterministic while
/// letting the local judge's token-overlap rubric discriminate answers.
class LocalGenerator : public Generator {
public:
    explicit LocalGenerator(std::size_t attachment_cap_bytes = 32 * 1024 * 1024)
        : attachment_cap_(attachment_cap_bytes) {}

    std::string generate(const std::string& query, const GenerationContext& context) override;

private:
    std::size_t attachment_cap_;
};

/// Harness stub, not a quality claim: maps the unique-token coverage of
/// the reference by the answer to the bands {<0.1 -> 1, <0.5 -> 5,
/// <0.9 -> 8, else 10}.
class LocalJudge : public Judge {
public:
    JudgeResult judge(const std::string& query, const std::string& answer,
                      const std::string& reference) override;
};

ProviderSet make_local_providers(const TickerLexicon& lexicon, std::size_t embed_dim = 1024);

} // namespace docroute
