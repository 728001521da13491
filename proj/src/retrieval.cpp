#include <docroute/retrieval.hpp>

#include <docroute/errors.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace docroute {

std::vector<RankedCandidate> rrf_fuse(const std::vector<std::uint32_t>& fts_list,
                                      const std::vector<std::uint32_t>& sem_list, double k_const,
                                      std::size_t cap) {
    std::map<std::uint32_t, RankedCandidate> by_id;
    for (std::size_t i = 0; i < fts_list.size(); ++i) {
        auto& c = by_id[fts_list[i]];
        if (c.fts_rank)
            throw UsageError("rrf_fuse: duplicate chunk_id in fts list");
        c.chunk_id = fts_list[i];
        c.fts_rank = i + 1;
    }
    for (std::size_t i = 0; i < sem_list.size(); ++i) {
        auto& c = by_id[sem_list[i]];
        if (c.sem_rank)
            throw UsageError("rrf_fuse: duplicate chunk_id in sem list");
        c.chunk_id = sem_list[i];
        c.sem_rank = i + 1;
    }

    std::vector<RankedCandidate> fused;
    fused.reserve(by_id.size());
    for (auto& [id, c] : by_id) {
        c.rrf_score = 0.0;
        if (c.fts_rank)
            c.rrf_score += 1.0 / (k_const + static_cast<double>(*c.fts_rank));
        if (c.sem_rank)
            c.rrf_score += 1.0 / (k_const + static_cast<double>(*c.sem_rank));
        fused.push_back(c);
    }
    std::sort(fused.begin(), fused.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.rrf_score != b.rrf_score)
            return a.rrf_score > b.rrf_score;
        return a.chunk_id < b.chunk_id;
    });
    if (fused.size() > cap)
        fused.resize(cap);
    return fused;
}

std::size_t cutoff_length(const std::vector<std::pair<std::uint32_t, double>>& reranked,
                          double cum_threshold, double cliff_threshold, std::size_t max_chunks) {
    const std::size_t n = reranked.size();
    if (n == 0)
        return 0;
    for (std::size_t i = 1; i < n; ++i)
        if (reranked[i].second > reranked[i - 1].second)
            throw UsageError("cutoff_length: scores must be sorted descending");

    // Cumulative cutoff on normalized scores.
    double min_score = reranked.back().second;
    double shift = min_score < 0.0 ? -min_score : 0.0;
    double total = 0.0;
    for (const auto& [id, s] : reranked)
        total += s + shift;
    std::size_t cum_cut = n;
    if (total <= 0.0) {
        // All scores equal after shifting: uniform mass.
        cum_cut = static_cast<std::size_t>(
            std::max(1.0, std::ceil(cum_threshold * static_cast<double>(n))));
        cum_cut = std::min(cum_cut, n);
    } else {
        double running = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            running += (reranked[i].second + shift) / total;
            if (running >= cum_threshold) {
                cum_cut = i + 1;
                break;
            }
        }
    }

    // Cliff cutoff on raw scores.
    std::size_t cliff_cut = n;
    double top = reranked.front().second;
    for (std::size_t i = 0; i < n; ++i) {
        if (top - reranked[i].second > cliff_threshold) {
            cliff_cut = i; // excludes this chunk and everything after
            break;
        }
    }

    std::size_t keep = std::min({cum_cut, cliff_cut, max_chunks, n});
    return std::max<std::size_t>(keep, 1);
}

std::vector<std::pair<std::uint32_t, double>>
apply_cutoffs(const std::vector<std::pair<std::uint32_t, double>>& reranked, double cum_threshold,
              double cliff_threshold, std::size_t max_chunks) {
    std::size_t keep = cutoff_length(reranked, cum_threshold, cliff_threshold, max_chunks);
    return {reranked.begin(), reranked.begin() + static_cast<std::ptrdiff_t>(keep)};
}

} // namespace docroute
