#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docroute {

enum class DocFormat { pdf, txt };

std::string_view format_name(DocFormat f);

/// One corpus document, addressable by its (ticker, fiscal_year) key.
/// rel_path always matches `{fiscal_year}/{ticker}.{ext}`.
struct DocumentRecord {
    std::uint32_t doc_id = 0;
    std::string ticker;      // uppercase, charset [A-Z0-9.-]
    int fiscal_year = 0;
    std::string rel_path;
    DocFormat format = DocFormat::txt;
    std::uint64_t char_length = 0; // 0 for opaque pdf
};

/// A sub-document retrieval unit: the substring [start, end) of its
/// owning document's text.
struct Chunk {
    std::uint32_t chunk_id = 0;
    std::uint32_t doc_id = 0;
    std::uint32_t seq = 0; // 0-based position within the document
    std::size_t start = 0; // inclusive
    std::size_t end = 0;   // exclusive
    std::string text;
};

struct ScanReport {
    std::vector<DocumentRecord> records; // sorted by (year, ticker), doc_id dense
    std::size_t skipped = 0;             // files not matching the layout
    std::vector<std::string> warnings;   // duplicate-key resolutions etc.
};

/// Walks `{root}/{year}/{ticker}.{txt|pdf}`. Year directories must be
/// 4-digit integers; filename stems are restricted to [A-Za-z0-9.-] and
/// uppercased into the ticker. When the same (ticker, year) exists in both
/// formats, pdf wins and a warning is recorded. Non-matching entries are
/// skipped and counted. Throws Error if root does not exist.
ScanReport scan_repository(const std::filesystem::path& root);

/// Split text into fixed-size chunks with overlap. Chunks start on the
/// stride grid (chunk_size - overlap); the final chunk is truncated at the
/// document end and a trailing chunk whose span is fully contained in the
/// previous one is dropped. chunk_id is assigned equal to seq; callers
/// indexing a whole corpus re-assign corpus-wide ids.
std::vector<Chunk> chunk_document(std::string_view text, std::size_t chunk_size = 2500,
                                  std::size_t overlap = 1250);

/// Immutable after construction; concurrent reads are safe.
class CorpusStore {
public:
    CorpusStore() = default;
    CorpusStore(std::filesystem::path root, std::vector<DocumentRecord> records);

    static CorpusStore from_scan(const std::filesystem::path& root, ScanReport report);

    /// Case-insensitive (ticker, year) lookup; absence is a value.
    const DocumentRecord* lookup(std::string_view ticker, int year) const;

    const std::vector<DocumentRecord>& documents() const { return records_; }
    const DocumentRecord& document(std::uint32_t doc_id) const;
    const std::filesystem::path& root() const { return root_; }

    std::string read_text(const DocumentRecord& rec) const;
    std::vector<std::uint8_t> read_bytes(const DocumentRecord& rec) const;
    std::uint64_t file_size(const DocumentRecord& rec) const;

    /// Line-delimited manifest with a versioned header line.
    void save_manifest(const std::filesystem::path& file) const;
    static CorpusStore load_manifest(const std::filesystem::path& file,
                                     const std::filesystem::path& root);

private:
    std::filesystem::path root_;
    std::vector<DocumentRecord> records_;
    std::map<std::pair<int, std::string>, std::uint32_t> by_key_; // (year, TICKER) -> doc_id
};

} // namespace docroute
