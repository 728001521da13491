#pragma once

#include <docroute/eval.hpp>
#include <docroute/providers_local.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace docroute {

/// Knobs for the synthetic corpus generator. Documents follow a shared
/// organizational template: `sections` sections of `sentences_per_section`
/// sentence slots, of which round(boilerplate_ratio * slots) are shared
/// verbatim across companies and the rest are entity-specific (company
/// name plus synthetic filler). The last slot of every section plants a
/// fact: an anonymous sentence carrying a numeric value drawn from a
/// per-company disjoint range. Analogous sections of different companies
/// therefore differ only in their planted values, which is what makes
/// chunk-level retrieval confusable across documents at high ratios.
struct SyntheticSpec {
    int n_companies = 10;
    std::vector<int> years = {2023};
    double boilerplate_ratio = 0.9;
    int sections = 10;
    std::uint64_t seed = 1;
    int sentences_per_section = 12;
    // Used only to verify that a confusable instance exists (ratio >= 0.8).
    std::size_t embed_dim = 1024;
    std::size_t chunk_size = 2500;
    std::size_t overlap = 1250;
};

struct SyntheticDoc {
    std::string ticker;
    std::string company; // display name, single distinctive token
    int year = 0;
    std::string text;
};

struct SyntheticCorpus {
    std::vector<SyntheticDoc> docs; // sorted by (year, ticker)
    std::vector<EvalQuery> queries; // one per (company, year, section)
    TickerLexicon lexicon;
    int salt = 0; // section re-seeds needed before a confusable instance existed
    bool confusable_verified = false;
};

/// Deterministic given spec.seed: same spec, byte-identical corpus and
/// query set. For boilerplate_ratio >= 0.8 the generator verifies with the
/// local embedder that at least one gold chunk's nearest neighbor lies in
/// a different company's document, re-seeding sections until one does.
SyntheticCorpus generate_corpus(const SyntheticSpec& spec);

/// Writes `{year}/{TICKER}.txt` files plus dataset.jsonl and lexicon.tsv.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& root);

} // namespace docroute
