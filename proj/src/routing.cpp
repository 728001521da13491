#include <docroute/routing.hpp>

#include <docroute/text.hpp>

#include <algorithm>
#include <set>

namespace docroute {

namespace {

std::vector<int> effective_years(const RoutingMetadata& meta, int default_year) {
    if (meta.years.empty())
        return {default_year};
    return meta.years;
}

std::vector<DocumentRecord> lookup_cross_product(const std::vector<std::string>& tickers,
                                                 const std::vector<int>& years,
                                                 const CorpusStore& store) {
    std::vector<DocumentRecord> out;
    std::set<std::uint32_t> seen;
    for (const auto& ticker : tickers) {
        for (int year : years) {
            const DocumentRecord* rec = store.lookup(ticker, year);
            if (rec && seen.insert(rec->doc_id).second)
                out.push_back(*rec);
        }
    }
    return out;
}

} // namespace

ResolveOutcome resolve_files_detailed(const RoutingMetadata& meta, const CorpusStore& store,
                                      int default_year) {
    ResolveOutcome outcome;
    std::vector<int> years = effective_years(meta, default_year);
    outcome.records = lookup_cross_product(meta.tickers, years, store);
    if (outcome.records.empty() && years != std::vector<int>{default_year}) {
        outcome.records = lookup_cross_product(meta.tickers, {default_year}, store);
        outcome.default_year_retry = true;
    }
    return outcome;
}

std::vector<DocumentRecord> resolve_files(const RoutingMetadata& meta, const CorpusStore& store,
                                          int default_year) {
    return resolve_files_detailed(meta, store, default_year).records;
}

namespace {

/// One resolution pass over a fixed year list: exact (ticker, year) lookup
/// first, then case-insensitive filename-stem matching within the year.
std::vector<std::uint32_t> resolve_pass(const std::vector<std::string>& tickers,
                                        const std::vector<int>& years, const CorpusStore& store) {
    std::vector<std::uint32_t> out;
    std::set<std::uint32_t> seen;
    for (const auto& ticker : tickers) {
        for (int year : years) {
            const DocumentRecord* rec = store.lookup(ticker, year);
            if (!rec) {
                std::string wanted = to_lower_ascii(ticker);
                for (const auto& candidate : store.documents()) {
                    if (candidate.fiscal_year == year &&
                        to_lower_ascii(candidate.ticker) == wanted) {
                        rec = &candidate;
                        break;
                    }
                }
            }
            if (rec && seen.insert(rec->doc_id).second)
                out.push_back(rec->doc_id);
        }
    }
    return out;
}

} // namespace

ResolveIdsOutcome resolve_doc_ids_detailed(const RoutingMetadata& meta, const CorpusStore& store,
                                           int default_year) {
    ResolveIdsOutcome outcome;
    std::vector<int> years = effective_years(meta, default_year);
    outcome.doc_ids = resolve_pass(meta.tickers, years, store);
    if (outcome.doc_ids.empty() && years != std::vector<int>{default_year}) {
        outcome.doc_ids = resolve_pass(meta.tickers, {default_year}, store);
        outcome.default_year_retry = true;
    }
    return outcome;
}

std::vector<std::uint32_t> resolve_doc_ids_with_filename_fallback(const RoutingMetadata& meta,
                                                                  const CorpusStore& store,
                                                                  int default_year) {
    return resolve_doc_ids_detailed(meta, store, default_year).doc_ids;
}

RetrievalScope make_scope(const std::vector<DocumentRecord>& records) {
    if (records.empty())
        return RetrievalScope::full_corpus();
    std::vector<std::uint32_t> ids;
    ids.reserve(records.size());
    for (const auto& rec : records)
        ids.push_back(rec.doc_id);
    return RetrievalScope::document_set(std::move(ids));
}

RetrievalScope make_scope(const std::vector<std::uint32_t>& doc_ids) {
    if (doc_ids.empty())
        return RetrievalScope::full_corpus();
    return RetrievalScope::document_set(doc_ids);
}

} // namespace docroute
