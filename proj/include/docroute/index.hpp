#pragma once

#include <docroute/corpus.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace docroute {

/// Search-space restriction: the whole corpus, or a non-empty document set.
class RetrievalScope {
public:
    static RetrievalScope full_corpus() { return RetrievalScope(); }
    static RetrievalScope document_set(std::vector<std::uint32_t> doc_ids);

    bool is_full() const { return full_; }
    bool contains(std::uint32_t doc_id) const { return full_ || docs_.count(doc_id) > 0; }
    const std::set<std::uint32_t>& docs() const { return docs_; }

private:
    RetrievalScope() = default;
    bool full_ = true;
    std::set<std::uint32_t> docs_;
};

struct Posting {
    std::uint32_t chunk_id = 0;
    std::uint32_t tf = 0;
};

struct LexicalHit {
    std::uint32_t chunk_id = 0;
    double score = 0.0;
};

/// Inverted index with BM25 ranking over the shared tokenizer's terms.
///
/// Scoring: idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avglen))
/// with the smoothed, non-negative idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)),
/// summed over the given keywords. Defaults k1 = 1.2, b = 0.75.
class LexicalIndex {
public:
    struct Params {
        double k1 = 1.2;
        double b = 0.75;
    };

    LexicalIndex() = default;

    /// chunk_ids must be unique; doc mapping is taken from chunk.doc_id.
    static LexicalIndex build(const std::vector<Chunk>& chunks, Params params);
    static LexicalIndex build(const std::vector<Chunk>& chunks) {
        return build(chunks, Params());
    }

    /// Candidates restricted to scope; chunks matching zero keywords are
    /// excluded; descending score, ties by ascending chunk_id; at most k.
    std::vector<LexicalHit> search(const std::vector<std::string>& keywords,
                                   const RetrievalScope& scope, std::size_t k = 20) const;

    std::size_t chunk_count() const { return ids_.size(); }
    std::size_t term_count() const { return postings_.size(); }
    double avg_length() const { return avg_len_; }
    const Params& params() const { return params_; }

    const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
    const std::vector<std::uint32_t>& chunk_ids() const { return ids_; }
    std::uint32_t token_count(std::uint32_t chunk_id) const;
    std::uint32_t doc_of(std::uint32_t chunk_id) const;

private:
    friend class BundleCodec;

    void rebuild_rows();

    Params params_;
    std::map<std::string, std::vector<Posting>> postings_; // sorted term dictionary
    std::vector<std::uint32_t> ids_;                       // ascending chunk ids
    std::vector<std::uint32_t> docs_;                      // aligned with ids_
    std::vector<std::uint32_t> token_counts_;              // aligned with ids_
    std::unordered_map<std::uint32_t, std::uint32_t> row_of_;
    double avg_len_ = 0.0;
};

struct VectorHit {
    std::uint32_t chunk_id = 0;
    double distance = 0.0;
};

/// Exact inner-product scan over unit-norm float vectors. Distance is the
/// Euclidean distance between unit vectors, sqrt(2 - 2 * dot), range [0, 2].
class VectorIndex {
public:
    VectorIndex() = default;

    /// Vectors must be L2-normalized within 1e-4; chunk ids must be unique
    /// and are stored in ascending order.
    static VectorIndex build(std::size_t dimension, std::vector<std::uint32_t> chunk_ids,
                             std::vector<std::uint32_t> doc_ids,
                             const std::vector<std::vector<float>>& vectors);

    /// Exact scan over in-scope rows. Results with distance > threshold are
    /// excluded (boundary inclusive); ascending distance, ties by ascending
    /// chunk_id; at most k. Throws on dimension or query-norm violations.
    std::vector<VectorHit> search(std::span<const float> query, const RetrievalScope& scope,
                                  std::size_t k = 30, double dist_threshold = 2.0) const;

    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::uint32_t>& chunk_ids() const { return ids_; }
    std::span<const float> row(std::size_t r) const {
        return {data_.data() + r * dim_, dim_};
    }
    std::uint32_t doc_of_row(std::size_t r) const { return docs_[r]; }

private:
    friend class BundleCodec;

    std::size_t dim_ = 0;
    std::vector<std::uint32_t> ids_;  // ascending chunk ids, row order
    std::vector<std::uint32_t> docs_; // aligned
    std::vector<float> data_;         // row-major
};

/// Per-chunk source spans, aligned with the dense chunk_id order used by
/// the corpus-wide indexes. Lets the engine slice chunk text back out of
/// the original documents instead of storing it twice.
struct ChunkRef {
    std::uint32_t doc_id = 0;
    std::uint32_t seq = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
};

struct IndexBundle {
    std::vector<ChunkRef> catalog; // indexed by chunk_id
    LexicalIndex lexical;
    VectorIndex vectors;
};

/// Single-file bundle: magic + format version header, lexical section
/// (sorted dictionary, delta-encoded postings), vector section (row-major
/// float32 little-endian), chunk catalog, FNV-1a64 footer checksum.
/// Round-trips are bit-exact.
void save_bundle(const IndexBundle& bundle, const std::filesystem::path& path);
IndexBundle load_bundle(const std::filesystem::path& path);

std::string encode_bundle(const IndexBundle& bundle);
IndexBundle decode_bundle(std::string_view bytes);

} // namespace docroute
