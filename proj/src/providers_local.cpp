#include <docroute/providers_local.hpp>

#include <docroute/errors.hpp>
#include <docroute/text.hpp>
#include <docroute/util.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace docroute {

namespace {

const std::set<std::string>& stop_words() {
    static const std::set<std::string> words = {
        "a",   "an",  "and", "are", "at",   "did",  "do",   "does", "for", "how",
        "in",  "is",  "of",  "on",  "or",   "the",  "to",   "was",  "were", "what",
        "when", "which", "who", "why"};
    return words;
}

std::string upper_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'a' && c <= 'z')
            c = static_cast<char>(c - 'a' + 'A');
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// TickerLexicon
// ---------------------------------------------------------------------------

void TickerLexicon::register_symbol(const std::string& ticker) {
    entries_.try_emplace(upper_ascii(ticker));
}

void TickerLexicon::register_alias(const std::string& ticker, const std::string& alias) {
    auto& aliases = entries_[upper_ascii(ticker)];
    std::string lowered = to_lower_ascii(alias);
    if (std::find(aliases.begin(), aliases.end(), lowered) == aliases.end())
        aliases.push_back(std::move(lowered));
}

void TickerLexicon::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write lexicon: " + file.string());
    for (const auto& [ticker, aliases] : entries_) {
        if (aliases.empty())
            out << ticker << '\n';
        for (const auto& alias : aliases)
            out << ticker << '\t' << alias << '\n';
    }
}

TickerLexicon TickerLexicon::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("lexicon not found: " + file.string());
    TickerLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            lex.register_symbol(line);
        else
            lex.register_alias(line.substr(0, tab), line.substr(tab + 1));
    }
    return lex;
}

// ---------------------------------------------------------------------------
// LocalEmbedder
// ---------------------------------------------------------------------------

std::vector<std::vector<float>> LocalEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        if (text.empty())
            throw ProviderError("embed: empty input text");
        std::vector<double> acc(dim_, 0.0);
        auto tokens = tokenize(text);
        if (tokens.empty()) {
            // No word tokens at all; hash the raw bytes so the output is
            // still deterministic and unit-norm.
            acc[fnv1a64(text) % dim_] = 1.0;
        } else {
            for (const auto& t : tokens)
                acc[fnv1a64(t) % dim_] += 1.0;
        }
        double norm = 0.0;
        for (double x : acc)
            norm += x * x;
        norm = std::sqrt(norm);
        std::vector<float> v(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            v[i] = static_cast<float>(acc[i] / norm);
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// LocalQueryRewriter
// ---------------------------------------------------------------------------

QueryRewrite LocalQueryRewriter::rewrite(const std::string& query) {
    if (query.empty())
        throw ProviderError("rewrite_query: empty query");
    QueryRewrite rw;
    rw.clarified_query = query;
    auto tokens = tokenize(query);
    for (const auto& t : tokens)
        if (!stop_words().count(t))
            rw.keywords.push_back(t);
    if (rw.keywords.empty())
        rw.keywords = tokens; // all stop-words: fall back to the full list
    if (rw.keywords.empty())
        rw.keywords.push_back(to_lower_ascii(query)); // no tokens at all
    return rw;
}

// ---------------------------------------------------------------------------
// LocalMetadataParser
// ---------------------------------------------------------------------------

RoutingMetadata LocalMetadataParser::parse(const std::string& query) {
    if (query.empty())
        throw ProviderError("parse_metadata: empty query");
    std::string lowered = to_lower_ascii(query);

    // Earliest whole-word occurrence per ticker, over symbol and aliases.
    std::vector<std::pair<std::size_t, std::string>> found;
    for (const auto& [ticker, aliases] : lexicon_.entries()) {
        std::size_t best = find_whole_word(lowered, to_lower_ascii(ticker));
        for (const auto& alias : aliases) {
            std::size_t pos = find_whole_word(lowered, alias);
            if (pos < best)
                best = pos;
        }
        if (best != std::string::npos)
            found.emplace_back(best, ticker);
    }
    std::sort(found.begin(), found.end());

    RoutingMetadata meta;
    for (auto& [pos, ticker] : found)
        meta.tickers.push_back(ticker);

    for (const auto& token : tokenize(query)) {
        if (token.size() != 4 ||
            !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }))
            continue;
        int year = std::stoi(token);
        if (year < year_min_ || year > year_max_)
            continue;
        if (std::find(meta.years.begin(), meta.years.end(), year) == meta.years.end())
            meta.years.push_back(year);
    }
    return meta;
}

// ---------------------------------------------------------------------------
// LocalReranker
// ---------------------------------------------------------------------------

std::vector<RerankResult>
LocalReranker::rerank(const std::string& query,
                      const std::vector<std::pair<std::uint32_t, std::string>>& candidates) {
    if (candidates.empty())
        throw ProviderError("rerank: empty candidate list");
    std::vector<RerankResult> out;
    out.reserve(candidates.size());
    for (const auto& [chunk_id, text] : candidates)
        out.push_back({chunk_id, token_jaccard(query, text)});
    std::sort(out.begin(), out.end(), [](const RerankResult& a, const RerankResult& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    return out;
}

// ---------------------------------------------------------------------------
// LocalGenerator
// ---------------------------------------------------------------------------

std::string LocalGenerator::generate(const std::string& query, const GenerationContext& context) {
    if (context.empty())
        throw ProviderError("generate: no context");
    for (const auto& f : context.files) {
        std::size_t size = f.is_pdf ? f.bytes.size() : f.text.size();
        if (size > attachment_cap_)
            throw ProviderError("generate: attachment " + f.name + " exceeds size cap (" +
                                std::to_string(size) + " > " + std::to_string(attachment_cap_) +
                                " bytes)");
    }

    std::ostringstream out;
    out << "Q: " << query << '\n';
    for (const auto& [chunk_id, text] : context.chunks)
        out << "CHUNK " << chunk_id << ": " << text << '\n';
    for (const auto& f : context.files) {
        if (f.is_pdf)
            out << "FILE " << f.name << " [pdf, " << f.bytes.size() << " bytes]\n";
        else
            out << "FILE " << f.name << ": " << f.text << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// LocalJudge
// ---------------------------------------------------------------------------

JudgeResult LocalJudge::judge(const std::string& query, const std::string& answer,
                              const std::string& reference) {
    if (query.empty() || answer.empty() || reference.empty())
        throw ProviderError("judge: empty input");
    auto answer_tokens = token_set(answer);
    auto reference_tokens = token_set(reference);

    double overlap;
    if (reference_tokens.empty()) {
        overlap = answer == reference ? 1.0 : 0.0;
    } else {
        std::size_t covered = 0;
        for (const auto& t : reference_tokens)
            if (answer_tokens.count(t))
                ++covered;
        overlap = static_cast<double>(covered) / static_cast<double>(reference_tokens.size());
    }

    JudgeResult result;
    if (overlap < 0.1)
        result.score = 1;
    else if (overlap < 0.5)
        result.score = 5;
    else if (overlap < 0.9)
        result.score = 8;
    else
        result.score = 10;
    std::ostringstream just;
    just << "reference token coverage " << overlap;
    result.justification = just.str();
    return result;
}

ProviderSet make_local_providers(const TickerLexicon& lexicon, std::size_t embed_dim) {
    ProviderSet set;
    set.embedder = std::make_shared<LocalEmbedder>(embed_dim);
    set.rewriter = std::make_shared<LocalQueryRewriter>();
    set.parser = std::make_shared<LocalMetadataParser>(lexicon);
    set.reranker = std::make_shared<LocalReranker>();
    set.generator = std::make_shared<LocalGenerator>();
    return set;
}

} // namespace docroute
