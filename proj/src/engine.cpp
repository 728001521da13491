#include <docroute/engine.hpp>

#include <docroute/errors.hpp>
#include <docroute/routing.hpp>
#include <docroute/text.hpp>

#include <algorithm>
#include <filesystem>
#include <map>

namespace docroute {

namespace {

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw; // already tagged further down
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

} // namespace

std::string_view paradigm_name(Paradigm p) {
    switch (p) {
    case Paradigm::CBR:
        return "cbr";
    case Paradigm::SFR:
        return "sfr";
    case Paradigm::HDRR:
        return "hdrr";
    }
    return "cbr";
}

Paradigm paradigm_from_string(const std::string& name) {
    if (name == "cbr" || name == "CBR")
        return Paradigm::CBR;
    if (name == "sfr" || name == "SFR")
        return Paradigm::SFR;
    if (name == "hdrr" || name == "HDRR")
        return Paradigm::HDRR;
    throw UsageError("unknown pipeline: " + name + " (expected cbr|sfr|hdrr)");
}

IndexBundle build_index(const CorpusStore& store, Embedder& embedder,
                        const RetrievalConfig& cfg) {
    IndexBundle bundle;
    std::vector<Chunk> chunks;
    for (const auto& rec : store.documents()) {
        if (rec.format != DocFormat::txt)
            continue;
        std::string text = store.read_text(rec);
        for (auto& c : chunk_document(text, cfg.chunk_size, cfg.overlap)) {
            c.doc_id = rec.doc_id;
            c.chunk_id = static_cast<std::uint32_t>(chunks.size());
            bundle.catalog.push_back(
                {rec.doc_id, c.seq, static_cast<std::uint64_t>(c.start),
                 static_cast<std::uint64_t>(c.end)});
            chunks.push_back(std::move(c));
        }
    }

    bundle.lexical = LexicalIndex::build(chunks, {cfg.bm25_k1, cfg.bm25_b});

    std::vector<std::uint32_t> ids(chunks.size());
    std::vector<std::uint32_t> docs(chunks.size());
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        ids[i] = chunks[i].chunk_id;
        docs[i] = chunks[i].doc_id;
        texts.push_back(chunks[i].text);
    }
    // Providers batch internally; rows land in chunk_id order either way.
    std::vector<std::vector<float>> vectors =
        chunks.empty() ? std::vector<std::vector<float>>{} : embedder.embed(texts);
    bundle.vectors = VectorIndex::build(embedder.dimension(), std::move(ids), std::move(docs),
                                        vectors);
    return bundle;
}

Engine::Engine(CorpusStore store, IndexBundle bundle, ProviderSet providers, RetrievalConfig cfg)
    : store_(std::move(store)), bundle_(std::move(bundle)), providers_(std::move(providers)),
      cfg_(cfg) {
    doc_texts_.resize(store_.documents().size());
    for (const auto& rec : store_.documents())
        if (rec.format == DocFormat::txt)
            doc_texts_[rec.doc_id] = store_.read_text(rec);
}

std::string Engine::chunk_text(std::uint32_t chunk_id) const {
    if (chunk_id >= bundle_.catalog.size())
        throw Error("unknown chunk_id " + std::to_string(chunk_id));
    const ChunkRef& ref = bundle_.catalog[chunk_id];
    const std::string& doc = doc_texts_[ref.doc_id];
    return doc.substr(ref.start, ref.end - ref.start);
}

HybridResult Engine::hybrid_retrieve(const std::string& query, const RetrievalScope& scope) const {
    HybridResult hr;
    hr.rewrite = stage("rewrite_query", [&] { return providers_.rewriter->rewrite(query); });

    // Remote rewriters may return multi-word keywords; the index matches
    // single terms, so flatten through the shared tokenizer first.
    std::vector<std::string> keywords;
    for (const auto& kw : hr.rewrite.keywords)
        for (auto& term : tokenize(kw))
            keywords.push_back(std::move(term));

    auto fts = stage("lexical_search", [&] {
        return bundle_.lexical.search(keywords, scope, cfg_.fts_top_k);
    });
    for (const auto& hit : fts)
        hr.fts_hits.emplace_back(hit.chunk_id, hit.score);

    auto qvec = stage("embed_query", [&] {
        return providers_.embedder->embed({hr.rewrite.clarified_query})[0];
    });
    auto sem = stage("vector_search", [&] {
        return bundle_.vectors.search(qvec, scope, cfg_.sem_top_k, cfg_.dist_threshold);
    });
    for (const auto& hit : sem)
        hr.sem_hits.emplace_back(hit.chunk_id, hit.distance);

    std::vector<std::uint32_t> fts_ids, sem_ids;
    for (const auto& [id, s] : hr.fts_hits)
        fts_ids.push_back(id);
    for (const auto& [id, d] : hr.sem_hits)
        sem_ids.push_back(id);
    auto fused = rrf_fuse(fts_ids, sem_ids, cfg_.rrf_k, cfg_.rerank_max_candidates);
    if (fused.empty())
        return hr;

    std::vector<std::pair<std::uint32_t, std::string>> candidates;
    candidates.reserve(fused.size());
    for (const auto& c : fused)
        candidates.emplace_back(c.chunk_id, chunk_text(c.chunk_id));
    auto scores = stage("rerank", [&] {
        return providers_.reranker->rerank(hr.rewrite.clarified_query, candidates);
    });
    if (scores.size() != fused.size())
        throw PipelineError("rerank", "score count does not match candidate count");

    // Order fused candidates by the reranker's output order.
    std::map<std::uint32_t, RankedCandidate> by_id;
    for (const auto& c : fused)
        by_id[c.chunk_id] = c;
    hr.reranked.reserve(scores.size());
    std::vector<std::pair<std::uint32_t, double>> score_pairs;
    for (const auto& s : scores) {
        auto it = by_id.find(s.chunk_id);
        if (it == by_id.end())
            throw PipelineError("rerank", "unknown chunk_id in rerank output");
        RankedCandidate c = it->second;
        c.rerank_score = s.score;
        hr.reranked.push_back(std::move(c));
        score_pairs.emplace_back(s.chunk_id, s.score);
    }
    hr.selected_count = stage("apply_cutoffs", [&] {
        return cutoff_length(score_pairs, cfg_.cum_threshold, cfg_.cliff_threshold,
                             cfg_.context_limit);
    });
    return hr;
}

GenerationContext Engine::chunk_context(const HybridResult& hr) const {
    GenerationContext ctx;
    for (std::size_t i = 0; i < hr.selected_count; ++i) {
        std::uint32_t id = hr.reranked[i].chunk_id;
        ctx.chunks.emplace_back(id, chunk_text(id));
    }
    return ctx;
}

PipelineResult Engine::run_cbr(const std::string& query) const {
    PipelineResult result;
    result.paradigm = Paradigm::CBR;
    result.audit = hybrid_retrieve(query, RetrievalScope::full_corpus());
    GenerationContext ctx = chunk_context(result.audit);
    result.answer = stage("generate", [&] { return providers_.generator->generate(query, ctx); });
    result.selected_chunks = result.audit.selected();
    for (const auto& [id, text] : ctx.chunks)
        result.token_estimate += text.size();
    result.token_estimate /= 4;
    return result;
}

PipelineResult Engine::run_sfr(const std::string& query) const {
    PipelineResult result;
    result.paradigm = Paradigm::SFR;
    auto meta = stage("parse_metadata", [&] { return providers_.parser->parse(query); });
    auto resolved = resolve_files_detailed(meta, store_, cfg_.default_year);
    result.default_year_retry = resolved.default_year_retry;
    if (resolved.records.empty())
        throw PipelineError("resolve_files", "no document resolved");

    GenerationContext ctx;
    std::size_t context_chars = 0;
    for (const auto& rec : resolved.records) {
        result.routed_docs.push_back(rec.doc_id);
        FileAttachment file;
        file.name = std::filesystem::path(rec.rel_path).filename().string();
        if (rec.format == DocFormat::txt) {
            file.text = store_.read_text(rec);
            context_chars += file.text.size();
        } else {
            file.is_pdf = true;
            file.bytes = store_.read_bytes(rec);
            context_chars += file.bytes.size();
        }
        ctx.files.push_back(std::move(file));
    }
    result.answer = stage("generate", [&] { return providers_.generator->generate(query, ctx); });
    result.token_estimate = context_chars / 4;
    return result;
}

PipelineResult Engine::run_hdrr(const std::string& query) const {
    PipelineResult result;
    result.paradigm = Paradigm::HDRR;
    auto meta = stage("parse_metadata", [&] { return providers_.parser->parse(query); });
    auto resolved = resolve_doc_ids_detailed(meta, store_, cfg_.default_year);
    result.routed_docs = resolved.doc_ids;
    result.default_year_retry = resolved.default_year_retry;

    RetrievalScope scope = make_scope(resolved.doc_ids);
    result.used_fallback = scope.is_full();

    result.audit = hybrid_retrieve(query, scope);
    GenerationContext ctx = chunk_context(result.audit);
    result.answer = stage("generate", [&] { return providers_.generator->generate(query, ctx); });
    result.selected_chunks = result.audit.selected();
    for (const auto& [id, text] : ctx.chunks)
        result.token_estimate += text.size();
    result.token_estimate /= 4;
    return result;
}

PipelineResult Engine::run(Paradigm paradigm, const std::string& query) const {
    switch (paradigm) {
    case Paradigm::CBR:
        return run_cbr(query);
    case Paradigm::SFR:
        return run_sfr(query);
    case Paradigm::HDRR:
        return run_hdrr(query);
    }
    throw UsageError("unknown paradigm");
}

} // namespace docroute
