#include <docroute/synthetic.hpp>

#include <docroute/corpus.hpp>
#include <docroute/errors.hpp>
#include <docroute/text.hpp>
#include <docroute/util.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace docroute {

namespace {

const std::vector<std::string>& boiler_vocab() {
    static const std::vector<std::string> words = {
        "consolidated", "regulatory",  "liquidity",    "framework",    "disclosure",
        "periodic",     "oversight",   "materiality",  "provisions",   "guidance",
        "segment",      "amortization", "impairment",  "derivative",   "hedging",
        "covenant",     "subordinated", "receivables", "payables",     "inventory",
        "goodwill",     "intangible",  "depreciation", "capitalized",  "contractual",
        "obligations",  "maturities",  "collateral",   "counterparty", "exposure",
        "volatility",   "sensitivity", "benchmark",    "compliance",   "governance",
        "remediation",  "assessment",  "estimates",    "assumptions",  "judgments",
        "allowance",    "valuation",   "methodology",  "discount",     "projection",
        "forecast",     "seasonal",    "cyclical",     "procurement",  "logistics",
        "distribution", "wholesale",   "retail",       "subscription", "licensing",
        "royalty",      "milestone",   "deferred",     "accrued",      "restructuring",
        "severance",    "litigation",  "settlement",   "indemnity",    "warranty",
        "environmental", "sustainability", "workforce", "facilities",  "leasehold",
        "jurisdiction", "statutory",   "treasury",     "dividend",     "repurchase",
        "issuance",     "redemption",  "conversion",   "dilution",     "weighted"};
    return words;
}

const std::vector<std::string>& fact_adjectives() {
    static const std::vector<std::string> words = {
        "alpha", "beta",    "gamma", "delta", "epsilon", "zeta",  "eta",   "theta",
        "iota",  "kappa",   "lambda", "mu",   "nu",      "xi",    "omicron", "pi",
        "rho",   "sigma",   "tau",   "upsilon", "phi",   "chi",   "psi",   "omega"};
    return words;
}

const std::vector<std::string>& fact_nouns() {
    static const std::vector<std::string> words = {
        "throughput", "margin",   "backlog",  "headcount", "utilization", "yield",
        "turnover",   "coverage", "retention", "pipeline", "capacity",    "density",
        "velocity",   "uptake",   "footprint", "intensity"};
    return words;
}

std::string fact_name(int section) {
    const auto& adj = fact_adjectives();
    const auto& noun = fact_nouns();
    std::size_t a = static_cast<std::size_t>(section) % adj.size();
    std::size_t n = (static_cast<std::size_t>(section) / adj.size()) % noun.size();
    return adj[a] + " " + noun[n];
}

DetRng keyed_rng(std::uint64_t seed, int salt, const std::string& tag) {
    return DetRng(seed ^ fnv1a64(std::to_string(salt) + "/" + tag));
}

std::string pick(const std::vector<std::string>& vocab, DetRng& rng) {
    return vocab[rng.below(vocab.size())];
}

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z')
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string company_name(std::uint64_t seed, int salt, int company, int attempt) {
    static const char* consonants = "bdfgklmnprstvz";
    static const char* vowels = "aeiou";
    DetRng rng = keyed_rng(seed, salt,
                           "name/" + std::to_string(company) + "/" + std::to_string(attempt));
    std::string name;
    std::size_t syllables = 3 + rng.below(2);
    for (std::size_t s = 0; s < syllables; ++s) {
        name.push_back(consonants[rng.below(14)]);
        name.push_back(vowels[rng.below(5)]);
    }
    return capitalize(name);
}

std::string ticker_for(int company) {
    std::string t = "AAA";
    int c = company;
    for (int pos = 2; pos >= 0; --pos) {
        t[static_cast<std::size_t>(pos)] = static_cast<char>('A' + c % 26);
        c /= 26;
    }
    return t;
}

std::string boiler_sentence(std::uint64_t seed, int salt, int section, int slot) {
    DetRng rng = keyed_rng(seed, salt,
                           "boiler/" + std::to_string(section) + "/" + std::to_string(slot));
    std::ostringstream s;
    s << capitalize(pick(boiler_vocab(), rng));
    for (int w = 0; w < 15; ++w)
        s << ' ' << pick(boiler_vocab(), rng);
    s << " remain subject to periodic review.";
    return s.str();
}

std::string entity_sentence(std::uint64_t seed, int salt, const std::string& company, int c,
                            int section, int slot) {
    DetRng rng = keyed_rng(seed, salt, "entity/" + std::to_string(c) + "/" +
                                           std::to_string(section) + "/" + std::to_string(slot));
    std::ostringstream s;
    s << company << " maintains";
    for (int w = 0; w < 14; ++w)
        s << ' ' << pick(boiler_vocab(), rng);
    s << " across its operations.";
    return s.str();
}

long long fact_value(std::uint64_t seed, int salt, int company, int year_idx, int section) {
    DetRng rng = keyed_rng(seed, salt,
                           "value/" + std::to_string(company) + "/" + std::to_string(year_idx) +
                               "/" + std::to_string(section));
    // Disjoint 10M-wide range per company; unique slot per (year, section).
    return static_cast<long long>(company + 1) * 10000000LL +
           static_cast<long long>(year_idx) * 100000LL + static_cast<long long>(section) * 100LL +
           static_cast<long long>(rng.below(100));
}

} // namespace

SyntheticCorpus generate_corpus(const SyntheticSpec& spec) {
    if (spec.n_companies < 2)
        throw UsageError("generate_corpus requires n_companies >= 2");
    if (spec.boilerplate_ratio < 0.0 || spec.boilerplate_ratio > 1.0)
        throw UsageError("boilerplate_ratio must be within [0, 1]");
    if (spec.years.empty() || spec.sections < 1 || spec.sentences_per_section < 2)
        throw UsageError("generate_corpus: years non-empty, sections >= 1, "
                         "sentences_per_section >= 2 required");
    if (spec.years.size() > 99 || spec.sections > 999)
        throw UsageError("generate_corpus supports at most 99 years and 999 sections");

    const int slots = spec.sentences_per_section;
    // Last slot always plants the fact; the rest split boilerplate/entity.
    int boiler_slots = static_cast<int>(
        std::min<long long>(slots - 1, std::llround(spec.boilerplate_ratio * slots)));

    for (int salt = 0; salt < 16; ++salt) {
        SyntheticCorpus corpus;
        corpus.salt = salt;

        // Company names: distinctive single tokens, unique, not colliding
        // with any generator vocabulary word.
        std::set<std::string> taken;
        for (const auto& w : boiler_vocab())
            taken.insert(w);
        for (const auto& w : fact_adjectives())
            taken.insert(w);
        for (const auto& w : fact_nouns())
            taken.insert(w);
        std::vector<std::string> names;
        for (int c = 0; c < spec.n_companies; ++c) {
            std::string name;
            for (int attempt = 0;; ++attempt) {
                name = company_name(spec.seed, salt, c, attempt);
                if (taken.insert(to_lower_ascii(name)).second)
                    break;
                if (attempt > 64)
                    throw Error("could not generate a unique company name");
            }
            names.push_back(name);
            std::string ticker = ticker_for(c);
            corpus.lexicon.register_symbol(ticker);
            corpus.lexicon.register_alias(ticker, name);
        }

        std::vector<int> years = spec.years;
        std::sort(years.begin(), years.end());
        for (std::size_t y = 0; y < years.size(); ++y) {
            for (int c = 0; c < spec.n_companies; ++c) {
                SyntheticDoc doc;
                doc.ticker = ticker_for(c);
                doc.company = names[static_cast<std::size_t>(c)];
                doc.year = years[y];
                std::ostringstream text;
                for (int i = 0; i < spec.sections; ++i) {
                    if (i > 0)
                        text << "\n\n";
                    for (int j = 0; j < slots - 1; ++j) {
                        if (j > 0)
                            text << ' ';
                        if (j < boiler_slots)
                            text << boiler_sentence(spec.seed, salt, i, j);
                        else
                            text << entity_sentence(spec.seed, salt, doc.company, c, i, j);
                    }
                    // Fact sentences are anonymous on purpose: analogous
                    // sections of different companies then differ only in
                    // the planted value, which is exactly what makes
                    // chunk-level retrieval confusable across documents.
                    long long value =
                        fact_value(spec.seed, salt, c, static_cast<int>(y), i);
                    text << ' ' << "The " << fact_name(i) << " recorded in fiscal " << doc.year
                         << " was " << value << " units.";

                    EvalQuery q;
                    q.query_id = doc.ticker + "-" + std::to_string(doc.year) + "-s" +
                                 std::to_string(i);
                    q.query = "What is the " + fact_name(i) + " of " + doc.company + " in " +
                              std::to_string(doc.year) + "?";
                    q.reference_answer = std::to_string(value);
                    q.gold_ticker = doc.ticker;
                    q.gold_year = doc.year;
                    corpus.queries.push_back(std::move(q));
                }
                doc.text = text.str();
                corpus.docs.push_back(std::move(doc));
            }
        }
        std::sort(corpus.docs.begin(), corpus.docs.end(),
                  [](const SyntheticDoc& a, const SyntheticDoc& b) {
                      if (a.year != b.year)
                          return a.year < b.year;
                      return a.ticker < b.ticker;
                  });

        if (spec.boilerplate_ratio < 0.8)
            return corpus; // no confusability requirement below 0.8

        // Verify a confusable instance exists: some gold chunk whose
        // local-embedding nearest neighbor lives in another company's doc.
        std::vector<Chunk> chunks;
        std::vector<std::size_t> chunk_doc;
        for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
            for (auto& ch : chunk_document(corpus.docs[d].text, spec.chunk_size, spec.overlap)) {
                chunk_doc.push_back(d);
                chunks.push_back(std::move(ch));
            }
        }
        LocalEmbedder embedder(spec.embed_dim);
        std::vector<std::string> texts;
        texts.reserve(chunks.size());
        for (const auto& ch : chunks)
            texts.push_back(ch.text);
        auto vectors = embedder.embed(texts);

        auto nearest_other = [&](std::size_t self) {
            double best = 2.0;
            std::size_t arg = self;
            for (std::size_t j = 0; j < vectors.size(); ++j) {
                if (j == self)
                    continue;
                double dot = 0.0;
                for (std::size_t k = 0; k < vectors[j].size(); ++k)
                    dot += static_cast<double>(vectors[j][k]) *
                           static_cast<double>(vectors[self][k]);
                double dist = std::sqrt(std::max(0.0, 2.0 - 2.0 * dot));
                if (dist < best) {
                    best = dist;
                    arg = j;
                }
            }
            return arg;
        };

        bool confusable = false;
        for (const auto& q : corpus.queries) {
            std::string needle = " " + q.reference_answer + " ";
            for (std::size_t i = 0; i < chunks.size() && !confusable; ++i) {
                if (chunks[i].text.find(needle) == std::string::npos)
                    continue;
                std::size_t nn = nearest_other(i);
                if (corpus.docs[chunk_doc[nn]].ticker != corpus.docs[chunk_doc[i]].ticker)
                    confusable = true;
                break; // only the first chunk containing the planted fact
            }
            if (confusable)
                break;
        }
        if (confusable) {
            corpus.confusable_verified = true;
            return corpus;
        }
    }
    throw Error("could not generate a confusable corpus after 16 section re-seeds");
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    fs::create_directories(root);
    for (const auto& doc : corpus.docs) {
        fs::path dir = root / std::to_string(doc.year);
        fs::create_directories(dir);
        std::ofstream out(dir / (doc.ticker + ".txt"), std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write synthetic document for " + doc.ticker);
        out << doc.text;
    }
    save_dataset(corpus.queries, root / "dataset.jsonl");
    corpus.lexicon.save(root / "lexicon.tsv");
}

} // namespace docroute
