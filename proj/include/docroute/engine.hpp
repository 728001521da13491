#pragma once

#include <docroute/config.hpp>
#include <docroute/corpus.hpp>
#include <docroute/index.hpp>
#include <docroute/providers.hpp>
#include <docroute/retrieval.hpp>

#include <string>
#include <vector>

namespace docroute {

enum class Paradigm { CBR, SFR, HDRR };

std::string_view paradigm_name(Paradigm p);
Paradigm paradigm_from_string(const std::string& name);

/// Full audit trail of one hybrid retrieval: the two first-stage lists,
/// the fused candidates, the reranked order and the selected prefix length.
struct HybridResult {
    QueryRewrite rewrite;
    std::vector<std::pair<std::uint32_t, double>> fts_hits; // (chunk, bm25 score)
    std::vector<std::pair<std::uint32_t, double>> sem_hits; // (chunk, distance)
    std::vector<RankedCandidate> reranked;                  // fused candidates in rerank order
    std::size_t selected_count = 0;

    std::vector<RankedCandidate> selected() const {
        return {reranked.begin(),
                reranked.begin() + static_cast<std::ptrdiff_t>(selected_count)};
    }
};

struct PipelineResult {
    Paradigm paradigm = Paradigm::CBR;
    std::string answer;
    std::vector<std::uint32_t> routed_docs;
    bool used_fallback = false;       // HDRR only: routing yielded full-corpus scope
    bool default_year_retry = false;  // SFR/HDRR: the year ladder fired
    std::vector<RankedCandidate> selected_chunks; // empty for SFR
    std::size_t token_estimate = 0;   // context characters / 4
    HybridResult audit;               // empty for SFR
};

/// Offline phase: scan -> chunk -> embed -> dual index. Only txt documents
/// are chunked and indexed; pdf documents stay in the store as opaque
/// attachments for SFR. Embedding runs in batches; row order is by
/// chunk_id, so rebuilds of an unchanged corpus are byte-identical.
IndexBundle build_index(const CorpusStore& store, Embedder& embedder,
                        const RetrievalConfig& cfg);

/// Read-only composition of store, indexes and providers. Safe for
/// concurrent queries: document texts are materialized at construction and
/// everything else is immutable.
class Engine {
public:
    Engine(CorpusStore store, IndexBundle bundle, ProviderSet providers, RetrievalConfig cfg);

    /// rewrite -> scoped lexical + semantic search -> RRF -> rerank ->
    /// adaptive cutoffs. Provider/stage failures propagate as
    /// PipelineError with the stage name attached.
    HybridResult hybrid_retrieve(const std::string& query, const RetrievalScope& scope) const;

    PipelineResult run_cbr(const std::string& query) const;
    PipelineResult run_sfr(const std::string& query) const;
    PipelineResult run_hdrr(const std::string& query) const;
    PipelineResult run(Paradigm paradigm, const std::string& query) const;

    std::string chunk_text(std::uint32_t chunk_id) const;
    const CorpusStore& store() const { return store_; }
    const IndexBundle& bundle() const { return bundle_; }
    const RetrievalConfig& config() const { return cfg_; }
    const ProviderSet& providers() const { return providers_; }

private:
    GenerationContext chunk_context(const HybridResult& hr) const;

    CorpusStore store_;
    IndexBundle bundle_;
    ProviderSet providers_;
    RetrievalConfig cfg_;
    std::vector<std::string> doc_texts_; // indexed by doc_id ("" for pdf)
};

} // namespace docroute
