#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace docroute {

/// A chunk carrying its per-source ranks and fused/reranked scores.
/// At least one of fts_rank/sem_rank is present; ranks are 1-based.
struct RankedCandidate {
    std::uint32_t chunk_id = 0;
    std::optional<std::size_t> fts_rank;
    std::optional<std::size_t> sem_rank;
    double rrf_score = 0.0;
    std::optional<double> rerank_score;
};

/// Reciprocal rank fusion of two ranked chunk-id lists:
/// score = sum over lists containing the chunk of 1 / (k_const + rank).
/// Descending score, ties by ascending chunk_id, truncated to cap.
std::vector<RankedCandidate> rrf_fuse(const std::vector<std::uint32_t>& fts_list,
                                      const std::vector<std::uint32_t>& sem_list,
                                      double k_const = 60.0, std::size_t cap = 30);

/// Adaptive context selection over a descending reranked list. Two cutoffs
/// are evaluated and the most restrictive wins, clamped by max_chunks:
///  - cumulative: smallest prefix whose normalized score mass reaches
///    cum_threshold (scores shifted by the minimum first if any are
///    negative; an all-equal-zero list normalizes to a uniform mass);
///  - cliff: the first chunk whose raw score drops more than
///    cliff_threshold below the top score excludes itself and the rest.
/// Returns the selected prefix length, never 0 for non-empty input.
std::size_t cutoff_length(const std::vector<std::pair<std::uint32_t, double>>& reranked,
                          double cum_threshold = 0.45, double cliff_threshold = 0.15,
                          std::size_t max_chunks = 10);

/// Convenience wrapper returning the selected prefix itself.
std::vector<std::pair<std::uint32_t, double>>
apply_cutoffs(const std::vector<std::pair<std::uint32_t, double>>& reranked,
              double cum_threshold = 0.45, double cliff_threshold = 0.15,
              std::size_t max_chunks = 10);

} // namespace docroute
