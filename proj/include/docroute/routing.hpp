#pragma once

#include <docroute/corpus.hpp>
#include <docroute/index.hpp>
#include <docroute/providers.hpp>

#include <vector>

namespace docroute {

struct ResolveOutcome {
    std::vector<DocumentRecord> records;
    bool default_year_retry = false; // the whole cross product was re-run with the default year
};

/// Resolve extracted metadata to documents. Empty years are replaced by
/// [default_year]; each (ticker, year) of the cross product is looked up
/// (pdf preferred over txt at scan time). When nothing at all resolves and
/// the years used were not already [default_year], the whole cross product
/// is retried once with the default year. Returns deduplicated records in
/// (ticker, year) iteration order; an empty result is a value, not an
/// error — it triggers the downstream fallback.
ResolveOutcome resolve_files_detailed(const RoutingMetadata& meta, const CorpusStore& store,
                                      int default_year = 2023);

std::vector<DocumentRecord> resolve_files(const RoutingMetadata& meta, const CorpusStore& store,
                                          int default_year = 2023);

/// Exact-path resolution first; any (ticker, year) still unresolved is
/// retried by matching the ticker against filename stems case-insensitively
/// within the year's records. Same default-year ladder as resolve_files.
struct ResolveIdsOutcome {
    std::vector<std::uint32_t> doc_ids;
    bool default_year_retry = false;
};

ResolveIdsOutcome resolve_doc_ids_detailed(const RoutingMetadata& meta, const CorpusStore& store,
                                           int default_year = 2023);

std::vector<std::uint32_t> resolve_doc_ids_with_filename_fallback(const RoutingMetadata& meta,
                                                                  const CorpusStore& store,
                                                                  int default_year = 2023);

/// Empty records mean full-corpus search (the routing fallback); otherwise
/// the scope is the documents' id set.
RetrievalScope make_scope(const std::vector<DocumentRecord>& records);
RetrievalScope make_scope(const std::vector<std::uint32_t>& doc_ids);

} // namespace docroute
