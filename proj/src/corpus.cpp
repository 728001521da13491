#include <docroute/corpus.hpp>

#include <docroute/errors.hpp>
#include <docroute/text.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace docroute {

namespace {

constexpr std::string_view kManifestMagic = "docroute-manifest";
constexpr int kManifestVersion = 1;

bool is_year_dir(const std::string& name, int& year) {
    if (name.size() != 4)
        return false;
    for (char c : name)
        if (c < '0' || c > '9')
            return false;
    year = std::stoi(name);
    return true;
}

bool valid_ticker_stem(std::string_view stem) {
    if (stem.empty())
        return false;
    for (char c : stem) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '-';
        if (!ok)
            return false;
    }
    return true;
}

std::string upper_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'a' && c <= 'z')
            c = static_cast<char>(c - 'a' + 'A');
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string_view format_name(DocFormat f) {
    return f == DocFormat::pdf ? "pdf" : "txt";
}

ScanReport scan_repository(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw UsageError("repository root not found: " + root.string());

    ScanReport report;
    // (year, ticker) -> candidate records, used to resolve format collisions.
    std::map<std::pair<int, std::string>, std::vector<DocumentRecord>> candidates;

    std::vector<fs::path> year_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        year_dirs.push_back(entry.path());
    std::sort(year_dirs.begin(), year_dirs.end());

    for (const auto& dir : year_dirs) {
        int year = 0;
        if (!fs::is_directory(dir) || !is_year_dir(dir.filename().string(), year)) {
            ++report.skipped;
            continue;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            files.push_back(entry.path());
        std::sort(files.begin(), files.end());

        for (const auto& file : files) {
            if (!fs::is_regular_file(file)) {
                ++report.skipped;
                continue;
            }
            std::string ext = to_lower_ascii(file.extension().string());
            std::string stem = file.stem().string();
            if ((ext != ".txt" && ext != ".pdf") || !valid_ticker_stem(stem)) {
                ++report.skipped;
                continue;
            }
            DocumentRecord rec;
            rec.ticker = upper_ascii(stem);
            rec.fiscal_year = year;
            rec.format = ext == ".pdf" ? DocFormat::pdf : DocFormat::txt;
            rec.rel_path = dir.filename().string() + "/" + file.filename().string();
            rec.char_length = rec.format == DocFormat::txt ? fs::file_size(file) : 0;
            candidates[{year, rec.ticker}].push_back(std::move(rec));
        }
    }

    for (auto& [key, recs] : candidates) {
        if (recs.size() > 1) {
            // pdf is preferred over txt; within a format keep the first path.
            std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
                return (a.format == DocFormat::pdf) > (b.format == DocFormat::pdf);
            });
            std::string warning = "duplicate document key " + recs[0].ticker + "@" +
                                  std::to_string(key.first) + ": keeping " + recs[0].rel_path;
            for (std::size_t i = 1; i < recs.size(); ++i)
                warning += ", dropping " + recs[i].rel_path;
            report.warnings.push_back(std::move(warning));
        }
        report.records.push_back(recs[0]);
    }

    // candidates is keyed (year, ticker), so records come out sorted; doc_ids
    // are dense in that order and stable across rescans of an unchanged tree.
    for (std::size_t i = 0; i < report.records.size(); ++i)
        report.records[i].doc_id = static_cast<std::uint32_t>(i);
    return report;
}

std::vector<Chunk> chunk_document(std::string_view text, std::size_t chunk_size,
                                  std::size_t overlap) {
    if (text.empty())
        return {};
    if (overlap == 0 || overlap >= chunk_size)
        throw UsageError("chunk_document requires 0 < overlap < chunk_size");

    const std::size_t stride = chunk_size - overlap;
    std::vector<Chunk> chunks;
    for (std::size_t start = 0; start < text.size(); start += stride) {
        std::size_t end = std::min(start + chunk_size, text.size());
        if (!chunks.empty() && start >= chunks.back().start && end <= chunks.back().end)
            break; // fully contained in the previous span
        Chunk c;
        c.chunk_id = static_cast<std::uint32_t>(chunks.size());
        c.seq = c.chunk_id;
        c.start = start;
        c.end = end;
        c.text = std::string(text.substr(start, end - start));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

CorpusStore::CorpusStore(fs::path root, std::vector<DocumentRecord> records)
    : root_(std::move(root)), records_(std::move(records)) {
    for (const auto& rec : records_) {
        auto key = std::make_pair(rec.fiscal_year, rec.ticker);
        if (by_key_.count(key))
            throw Error("duplicate (ticker, year) in store: " + rec.ticker + "@" +
                        std::to_string(rec.fiscal_year));
        by_key_[key] = rec.doc_id;
    }
}

CorpusStore CorpusStore::from_scan(const fs::path& root, ScanReport report) {
    return CorpusStore(root, std::move(report.records));
}

const DocumentRecord* CorpusStore::lookup(std::string_view ticker, int year) const {
    auto it = by_key_.find({year, upper_ascii(ticker)});
    if (it == by_key_.end())
        return nullptr;
    return &records_[it->second];
}

const DocumentRecord& CorpusStore::document(std::uint32_t doc_id) const {
    if (doc_id >= records_.size())
        throw Error("unknown doc_id " + std::to_string(doc_id));
    return records_[doc_id];
}

std::string CorpusStore::read_text(const DocumentRecord& rec) const {
    if (rec.format != DocFormat::txt)
        throw Error("document is not plain text: " + rec.rel_path);
    return read_file(root_ / rec.rel_path);
}

std::vector<std::uint8_t> CorpusStore::read_bytes(const DocumentRecord& rec) const {
    std::string raw = read_file(root_ / rec.rel_path);
    return {raw.begin(), raw.end()};
}

std::uint64_t CorpusStore::file_size(const DocumentRecord& rec) const {
    return fs::file_size(root_ / rec.rel_path);
}

void CorpusStore::save_manifest(const fs::path& file) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write manifest: " + file.string());
    out << kManifestMagic << ' ' << kManifestVersion << '\n';
    for (const auto& rec : records_) {
        out << rec.doc_id << '\t' << rec.ticker << '\t' << rec.fiscal_year << '\t' << rec.rel_path
            << '\t' << format_name(rec.format) << '\t' << rec.char_length << '\n';
    }
}

CorpusStore CorpusStore::load_manifest(const fs::path& file, const fs::path& root) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("manifest not found: " + file.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic;
    int version = 0;
    hs >> magic >> version;
    if (magic != kManifestMagic)
        throw FormatError("not a manifest file: " + file.string());
    if (version != kManifestVersion)
        throw FormatError("unsupported manifest version " + std::to_string(version) +
                          " (expected " + std::to_string(kManifestVersion) + ")");

    std::vector<DocumentRecord> records;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            std::istringstream ls(line);
            DocumentRecord rec;
            std::string format;
            std::string field;
            std::getline(ls, field, '\t');
            rec.doc_id = static_cast<std::uint32_t>(std::stoul(field));
            std::getline(ls, rec.ticker, '\t');
            std::getline(ls, field, '\t');
            rec.fiscal_year = std::stoi(field);
            std::getline(ls, rec.rel_path, '\t');
            std::getline(ls, format, '\t');
            std::getline(ls, field, '\t');
            rec.char_length = std::stoull(field);
            if (format == "pdf")
                rec.format = DocFormat::pdf;
            else if (format == "txt")
                rec.format = DocFormat::txt;
            else
                throw FormatError("unknown document format: " + format);
            records.push_back(std::move(rec));
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError("malformed manifest line " + std::to_string(lineno) + " in " +
                              file.string());
        }
    }
    return CorpusStore(root, std::move(records));
}

} // namespace docroute
