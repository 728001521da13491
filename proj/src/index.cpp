#include <docroute/index.hpp>

#include <docroute/errors.hpp>
#include <docroute/text.hpp>
#include <docroute/util.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace docroute {

RetrievalScope RetrievalScope::document_set(std::vector<std::uint32_t> doc_ids) {
    if (doc_ids.empty())
        throw UsageError("RetrievalScope::document_set requires a non-empty document set");
    RetrievalScope s;
    s.full_ = false;
    s.docs_ = std::set<std::uint32_t>(doc_ids.begin(), doc_ids.end());
    return s;
}

// ---------------------------------------------------------------------------
// LexicalIndex
// ---------------------------------------------------------------------------

LexicalIndex LexicalIndex::build(const std::vector<Chunk>& chunks, Params params) {
    LexicalIndex index;
    index.params_ = params;

    std::vector<const Chunk*> ordered;
    ordered.reserve(chunks.size());
    for (const auto& c : chunks)
        ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const Chunk* a, const Chunk* b) { return a->chunk_id < b->chunk_id; });
    for (std::size_t i = 1; i < ordered.size(); ++i)
        if (ordered[i]->chunk_id == ordered[i - 1]->chunk_id)
            throw UsageError("duplicate chunk_id " + std::to_string(ordered[i]->chunk_id));

    std::uint64_t total_tokens = 0;
    for (const Chunk* c : ordered) {
        auto tokens = tokenize(c->text);
        std::map<std::string, std::uint32_t> tf;
        for (auto& t : tokens)
            ++tf[t];
        for (auto& [term, count] : tf)
            index.postings_[term].push_back({c->chunk_id, count});
        index.ids_.push_back(c->chunk_id);
        index.docs_.push_back(c->doc_id);
        index.token_counts_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_tokens += tokens.size();
    }
    index.avg_len_ = index.ids_.empty()
                         ? 0.0
                         : static_cast<double>(total_tokens) / static_cast<double>(index.ids_.size());
    index.rebuild_rows();
    return index;
}

void LexicalIndex::rebuild_rows() {
    row_of_.clear();
    row_of_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
        row_of_[ids_[i]] = static_cast<std::uint32_t>(i);
}

std::uint32_t LexicalIndex::token_count(std::uint32_t chunk_id) const {
    auto it = row_of_.find(chunk_id);
    if (it == row_of_.end())
        throw Error("unknown chunk_id " + std::to_string(chunk_id));
    return token_counts_[it->second];
}

std::uint32_t LexicalIndex::doc_of(std::uint32_t chunk_id) const {
    auto it = row_of_.find(chunk_id);
    if (it == row_of_.end())
        throw Error("unknown chunk_id " + std::to_string(chunk_id));
    return docs_[it->second];
}

std::vector<LexicalHit> LexicalIndex::search(const std::vector<std::string>& keywords,
                                             const RetrievalScope& scope, std::size_t k) const {
    if (keywords.empty() || k == 0)
        return {};

    const double n = static_cast<double>(ids_.size());
    std::map<std::uint32_t, double> scores; // deterministic accumulation order
    for (const auto& raw : keywords) {
        std::string term = to_lower_ascii(raw);
        auto it = postings_.find(term);
        if (it == postings_.end())
            continue;
        const auto& list = it->second;
        const double df = static_cast<double>(list.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& p : list) {
            std::uint32_t row = row_of_.at(p.chunk_id);
            if (!scope.contains(docs_[row]))
                continue;
            const double tf = static_cast<double>(p.tf);
            const double len = static_cast<double>(token_counts_[row]);
            const double denom =
                tf + params_.k1 * (1.0 - params_.b + params_.b * len / avg_len_);
            scores[p.chunk_id] += idf * tf * (params_.k1 + 1.0) / denom;
        }
    }

    std::vector<LexicalHit> hits;
    hits.reserve(scores.size());
    for (const auto& [chunk_id, score] : scores)
        hits.push_back({chunk_id, score});
    std::sort(hits.begin(), hits.end(), [](const LexicalHit& a, const LexicalHit& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (hits.size() > k)
        hits.resize(k);
    return hits;
}

// ---------------------------------------------------------------------------
// VectorIndex
// ---------------------------------------------------------------------------

VectorIndex VectorIndex::build(std::size_t dimension, std::vector<std::uint32_t> chunk_ids,
                               std::vector<std::uint32_t> doc_ids,
                               const std::vector<std::vector<float>>& vectors) {
    if (chunk_ids.size() != vectors.size() || chunk_ids.size() != doc_ids.size())
        throw UsageError("VectorIndex::build: mismatched input sizes");

    std::vector<std::size_t> order(chunk_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chunk_ids[a] < chunk_ids[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (chunk_ids[order[i]] == chunk_ids[order[i - 1]])
            throw UsageError("duplicate chunk_id " + std::to_string(chunk_ids[order[i]]));

    VectorIndex index;
    index.dim_ = dimension;
    index.ids_.reserve(order.size());
    index.docs_.reserve(order.size());
    index.data_.reserve(order.size() * dimension);
    for (std::size_t i : order) {
        const auto& v = vectors[i];
        if (v.size() != dimension)
            throw UsageError("vector dimension mismatch: got " + std::to_string(v.size()) +
                             ", expected " + std::to_string(dimension));
        double norm2 = 0.0;
        for (float x : v)
            norm2 += static_cast<double>(x) * static_cast<double>(x);
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-4)
            throw UsageError("vector for chunk " + std::to_string(chunk_ids[i]) +
                             " is not unit-norm");
        index.ids_.push_back(chunk_ids[i]);
        index.docs_.push_back(doc_ids[i]);
        index.data_.insert(index.data_.end(), v.begin(), v.end());
    }
    return index;
}

std::vector<VectorHit> VectorIndex::search(std::span<const float> query,
                                           const RetrievalScope& scope, std::size_t k,
                                           double dist_threshold) const {
    if (query.size() != dim_)
        throw Error("query dimension mismatch: got " + std::to_string(query.size()) +
                    ", expected " + std::to_string(dim_));
    double qn2 = 0.0;
    for (float x : query)
        qn2 += static_cast<double>(x) * static_cast<double>(x);
    if (std::abs(std::sqrt(qn2) - 1.0) > 1e-4)
        throw Error("query vector is not unit-norm");
    if (k == 0)
        return {};

    std::vector<VectorHit> hits;
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        if (!scope.contains(docs_[r]))
            continue;
        const float* rowp = data_.data() + r * dim_;
        double dot = 0.0;
        for (std::size_t j = 0; j < dim_; ++j)
            dot += static_cast<double>(rowp[j]) * static_cast<double>(query[j]);
        // Unit vectors give squared distances in [0, 4]; clamp fp noise so
        // the threshold boundary (antipodal at exactly 2.0) stays inclusive.
        double d2 = std::clamp(2.0 - 2.0 * dot, 0.0, 4.0);
        double dist = std::sqrt(d2);
        if (dist <= dist_threshold)
            hits.push_back({ids_[r], dist});
    }
    std::sort(hits.begin(), hits.end(), [](const VectorHit& a, const VectorHit& b) {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        return a.chunk_id < b.chunk_id;
    });
    if (hits.size() > k)
        hits.resize(k);
    return hits;
}

// ---------------------------------------------------------------------------
// Bundle persistence
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'D', 'R', 'I', 'X'};
constexpr std::uint32_t kBundleVersion = 1;

class Writer {
public:
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bytes(std::string_view s) { buf_.append(s); }

    std::string take() { return std::move(buf_); }

private:
    void le(std::uint64_t v, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i)
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string_view bytes(std::size_t n) {
        need(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size())
            throw FormatError("index bundle is truncated");
    }
    std::uint64_t le(std::size_t width) {
        need(width);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += width;
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

} // namespace

class BundleCodec {
public:
    static std::string encode(const IndexBundle& bundle) {
        const auto& lex = bundle.lexical;
        const auto& vec = bundle.vectors;
        Writer w;
        w.bytes(std::string_view(kMagic, 4));
        w.u32(kBundleVersion);
        w.u32(static_cast<std::uint32_t>(vec.dim_));
        w.u64(lex.ids_.size());
        w.u64(lex.postings_.size());
        w.u64(vec.ids_.size());
        w.u64(bundle.catalog.size());
        w.f64(lex.params_.k1);
        w.f64(lex.params_.b);
        w.f64(lex.avg_len_);

        // Lexical chunk table.
        for (std::size_t i = 0; i < lex.ids_.size(); ++i) {
            w.u32(lex.ids_[i]);
            w.u32(lex.docs_[i]);
            w.u32(lex.token_counts_[i]);
        }
        // Sorted term dictionary with delta-encoded postings.
        for (const auto& [term, list] : lex.postings_) {
            w.u16(static_cast<std::uint16_t>(term.size()));
            w.bytes(term);
            w.u32(static_cast<std::uint32_t>(list.size()));
            std::uint32_t prev = 0;
            for (std::size_t i = 0; i < list.size(); ++i) {
                w.u32(i == 0 ? list[i].chunk_id : list[i].chunk_id - prev);
                w.u32(list[i].tf);
                prev = list[i].chunk_id;
            }
        }
        // Vector section: row table then row-major float32 data.
        for (std::size_t i = 0; i < vec.ids_.size(); ++i) {
            w.u32(vec.ids_[i]);
            w.u32(vec.docs_[i]);
        }
        for (float x : vec.data_)
            w.f32(x);
        // Chunk catalog.
        for (const auto& c : bundle.catalog) {
            w.u32(c.doc_id);
            w.u32(c.seq);
            w.u64(c.start);
            w.u64(c.end);
        }

        std::string payload = w.take();
        Fnv64 checksum;
        checksum.update(payload);
        Writer footer;
        footer.u64(checksum.digest());
        return payload + footer.take();
    }

    static IndexBundle decode(std::string_view data) {
        if (data.size() < 4 + 4 + 8)
            throw FormatError("index bundle is truncated");
        if (data.substr(0, 4) != std::string_view(kMagic, 4))
            throw FormatError("not an index bundle (bad magic)");

        Fnv64 checksum;
        checksum.update(data.substr(0, data.size() - 8));
        Reader footer(data.substr(data.size() - 8));
        if (footer.u64() != checksum.digest())
            throw FormatError("index bundle checksum mismatch");

        Reader r(data.substr(4, data.size() - 4 - 8));
        std::uint32_t version = r.u32();
        if (version != kBundleVersion)
            throw FormatError("unsupported index bundle version " + std::to_string(version) +
                              " (expected " + std::to_string(kBundleVersion) + ")");

        IndexBundle bundle;
        auto& lex = bundle.lexical;
        auto& vec = bundle.vectors;
        vec.dim_ = r.u32();
        std::uint64_t n_chunks = r.u64();
        std::uint64_t n_terms = r.u64();
        std::uint64_t n_rows = r.u64();
        std::uint64_t n_catalog = r.u64();
        lex.params_.k1 = r.f64();
        lex.params_.b = r.f64();
        lex.avg_len_ = r.f64();

        lex.ids_.resize(n_chunks);
        lex.docs_.resize(n_chunks);
        lex.token_counts_.resize(n_chunks);
        for (std::uint64_t i = 0; i < n_chunks; ++i) {
            lex.ids_[i] = r.u32();
            lex.docs_[i] = r.u32();
            lex.token_counts_[i] = r.u32();
        }
        for (std::uint64_t t = 0; t < n_terms; ++t) {
            std::uint16_t len = r.u16();
            std::string term(r.bytes(len));
            std::uint32_t count = r.u32();
            std::vector<Posting> list(count);
            std::uint32_t prev = 0;
            for (std::uint32_t i = 0; i < count; ++i) {
                std::uint32_t delta = r.u32();
                list[i].chunk_id = i == 0 ? delta : prev + delta;
                list[i].tf = r.u32();
                prev = list[i].chunk_id;
            }
            lex.postings_.emplace(std::move(term), std::move(list));
        }
        lex.rebuild_rows();

        vec.ids_.resize(n_rows);
        vec.docs_.resize(n_rows);
        for (std::uint64_t i = 0; i < n_rows; ++i) {
            vec.ids_[i] = r.u32();
            vec.docs_[i] = r.u32();
        }
        vec.data_.resize(n_rows * vec.dim_);
        for (auto& x : vec.data_)
            x = r.f32();

        bundle.catalog.resize(n_catalog);
        for (auto& c : bundle.catalog) {
            c.doc_id = r.u32();
            c.seq = r.u32();
            c.start = r.u64();
            c.end = r.u64();
        }
        if (r.remaining() != 0)
            throw FormatError("index bundle has trailing bytes");
        return bundle;
    }
};

std::string encode_bundle(const IndexBundle& bundle) {
    return BundleCodec::encode(bundle);
}

IndexBundle decode_bundle(std::string_view bytes) {
    return BundleCodec::decode(bytes);
}

void save_bundle(const IndexBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write index bundle: " + path.string());
    std::string bytes = encode_bundle(bundle);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

IndexBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("index bundle not found: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_bundle(bytes);
}

} // namespace docroute
