// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <docroute/corpus.hpp>
#include <docroute/engine.hpp>
#include <docroute/errors.hpp>
#include <docroute/eval.hpp>
#include <docroute/index.hpp>
#include <docroute/providers_local.hpp>
#include <docroute/retrieval.hpp>
#include <docroute/routing.hpp>
#include <docroute/synthetic.hpp>
#include <docroute/text.hpp>

#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

using namespace docroute;

namespace {

struct Checker {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok)
            failures.push_back(what);
    }

    void within(double actual, double expected, double tolerance, const std::string& what) {
        if (std::abs(actual - expected) > tolerance) {
            std::ostringstream ss;
            ss << what << ": got " << actual << ", want " << expected << " +/- " << tolerance;
            failures.push_back(ss.str());
        }
    }
};

// ---------------------------------------------------------------------------
// Shared world: synthetic corpus, store, index, local providers, engine.
// ---------------------------------------------------------------------------

struct World {
    testsupport::TempDir dir;
    SyntheticCorpus corpus;
    CorpusStore store;
    IndexBundle bundle;
    ProviderSet providers;
    RetrievalConfig cfg;
};

World make_world(const SyntheticSpec& spec) {
    World world;
    world.corpus = generate_corpus(spec);
    write_corpus(world.corpus, world.dir.path());
    world.store = CorpusStore::from_scan(world.dir.path(), scan_repository(world.dir.path()));
    TickerLexicon lex = world.corpus.lexicon;
    for (const auto& rec : world.store.documents())
        lex.register_symbol(rec.ticker);
    world.cfg.embed_dim = spec.embed_dim;
    world.providers = make_local_providers(lex, world.cfg.embed_dim);
    world.bundle = build_index(world.store, *world.providers.embedder, world.cfg);
    return world;
}

std::uint32_t doc_of_chunk(const World& world, std::uint32_t chunk_id) {
    return world.bundle.catalog[chunk_id].doc_id;
}

std::uint32_t gold_doc(const World& world, const EvalQuery& q) {
    const auto* rec = world.store.lookup(*q.gold_ticker, *q.gold_year);
    return rec->doc_id;
}

struct EmptyParser : MetadataParser {
    RoutingMetadata parse(const std::string&) override { return RoutingMetadata{}; }
};

// ---------------------------------------------------------------------------
// Criterion bodies
// ---------------------------------------------------------------------------

std::map<std::string, std::vector<GroupReport>> reference_reports() {
    auto make = [](int group, double avg, double fail, double corr, double perf) {
        GroupReport r;
        r.group_id = group;
        r.count = 300;
        r.avg_score = avg;
        r.failure_rate = fail;
        r.correctness_rate = corr;
        r.perfect_rate = perf;
        r.band_high = corr;
        return r;
    };
    std::map<std::string, std::vector<GroupReport>> reports;
    reports["cbr"] = {make(1, 5.85, 24.3, 47.7, 12.0), make(2, 6.17, 21.7, 51.6, 16.0),
                      make(3, 5.64, 25.7, 44.0, 14.0), make(4, 6.21, 21.0, 51.3, 14.7),
                      make(5, 6.21, 20.0, 50.6, 12.3)};
    reports["sfr"] = {make(1, 6.53, 9.3, 44.1, 7.7), make(2, 6.61, 9.3, 46.4, 8.7),
                      make(3, 6.11, 12.0, 36.7, 10.7), make(4, 6.67, 9.7, 50.6, 10.0),
                      make(5, 6.32, 11.0, 42.3, 5.3)};
    reports["hdrr"] = {make(1, 7.44, 7.0, 64.7, 20.0), make(2, 7.76, 5.0, 72.7, 19.0),
                       make(3, 7.39, 7.3, 63.0, 21.7), make(4, 7.72, 5.3, 71.0, 21.3),
                       make(5, 7.39, 7.3, 67.3, 18.3)};
    return reports;
}

void criterion_aggregation(Checker& check) {
    const double tol = 0.05;
    auto reports = reference_reports();
    auto summary = aggregate_systems(reports, StdMode::sample);
    auto find = [&](const std::string& name) -> const SystemSummary& {
        for (const auto& s : summary)
            if (s.system == name)
                return s;
        throw Error("missing " + name);
    };
    check.within(find("cbr").avg_score.mean, 6.02, tol, "cbr mean avg");
    check.within(find("sfr").avg_score.mean, 6.45, tol, "sfr mean avg");
    check.within(find("hdrr").avg_score.mean, 7.54, tol, "hdrr mean avg");
    check.within(find("cbr").failure_rate.mean, 22.5, tol, "cbr mean failure");
    check.within(find("sfr").failure_rate.mean, 10.3, tol, "sfr mean failure");
    check.within(find("hdrr").failure_rate.mean, 6.4, tol, "hdrr mean failure");
    check.within(find("cbr").correctness_rate.mean, 49.0, tol, "cbr mean correctness");
    check.within(find("sfr").correctness_rate.mean, 44.0, tol, "sfr mean correctness");
    check.within(find("hdrr").correctness_rate.mean, 67.7, tol, "hdrr mean correctness");
    check.within(find("cbr").perfect_rate.mean, 13.8, tol, "cbr mean perfect");
    check.within(find("sfr").perfect_rate.mean, 8.5, tol, "sfr mean perfect");
    check.within(find("hdrr").perfect_rate.mean, 20.1, tol, "hdrr mean perfect");

    auto hc = paired_diff("hdrr", reports["hdrr"], "cbr", reports["cbr"], StdMode::sample);
    check.within(hc.mean.d_avg, 1.52, tol, "hdrr-cbr mean d_avg");
    check.within(hc.mean.d_failure, -16.2, tol, "hdrr-cbr mean d_failure");
    check.within(hc.mean.d_correctness, 18.7, tol, "hdrr-cbr mean d_correctness");
    check.within(hc.mean.d_perfect, 6.3, tol, "hdrr-cbr mean d_perfect");
    check.within(hc.stddev.d_avg, 0.21, tol, "hdrr-cbr std d_avg");
    check.within(hc.stddev.d_failure, 2.2, tol, "hdrr-cbr std d_failure");
    check.within(hc.stddev.d_correctness, 1.9, tol, "hdrr-cbr std d_correctness");
    check.within(hc.stddev.d_perfect, 2.0, tol, "hdrr-cbr std d_perfect");

    auto hs = paired_diff("hdrr", reports["hdrr"], "sfr", reports["sfr"], StdMode::sample);
    check.within(hs.mean.d_avg, 1.09, tol, "hdrr-sfr mean d_avg");
    check.within(hs.mean.d_failure, -3.9, tol, "hdrr-sfr mean d_failure");
    check.within(hs.mean.d_correctness, 23.7, tol, "hdrr-sfr mean d_correctness");
    check.within(hs.mean.d_perfect, 11.6, tol, "hdrr-sfr mean d_perfect");
}

void criterion_bands(Checker& check) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> scores;
        std::size_t n = 1 + rng() % 600;
        for (std::size_t i = 0; i < n; ++i)
            scores.push_back(1 + static_cast<int>(rng() % 10));
        auto r = score_group(1, scores);
        check.require(std::abs(r.band_low + r.band_mid + r.band_high - 100.0) <= 0.1 + 1e-9,
                      "band partition sums to 100 +/- 0.1");
    }
    // pre-banded reference rows
    const double rows[3][3] = {{27.8, 23.2, 49.0}, {14.8, 41.2, 44.0}, {12.3, 19.9, 67.7}};
    for (const auto& row : rows)
        check.require(std::abs(row[0] + row[1] + row[2] - 100.0) <= 0.1 + 1e-9,
                      "reference band row sums to 100 +/- 0.1");
}

void criterion_fallback_equivalence(Checker& check) {
    SyntheticSpec spec;
    spec.n_companies = 10;
    spec.sections = 10;
    spec.years = {2023};
    spec.boilerplate_ratio = 0.9;
    spec.seed = 101;
    World world = make_world(spec);
    check.require(world.corpus.queries.size() == 100, "corpus provides 100 gold queries");

    ProviderSet forced = world.providers;
    forced.parser = std::make_shared<EmptyParser>();
    Engine hdrr_engine(world.store, world.bundle, forced, world.cfg);
    Engine cbr_engine(world.store, world.bundle, world.providers, world.cfg);

    int identical = 0;
    for (const auto& q : world.corpus.queries) {
        auto h = hdrr_engine.run_hdrr(q.query);
        auto c = cbr_engine.run_cbr(q.query);
        bool same = h.answer == c.answer && h.used_fallback &&
                    h.selected_chunks.size() == c.selected_chunks.size();
        if (same)
            for (std::size_t i = 0; i < h.selected_chunks.size(); ++i)
                same = same && h.selected_chunks[i].chunk_id == c.selected_chunks[i].chunk_id;
        identical += same ? 1 : 0;
    }
    check.require(identical == 100, "forced-empty routing: hdrr == cbr on 100/100 queries (got " +
                                        std::to_string(identical) + ")");
}

void criterion_scope_soundness(Checker& check) {
    SyntheticSpec spec;
    spec.n_companies = 10;
    spec.sections = 10;
    spec.years = {2021, 2022, 2023, 2024, 2025};
    spec.boilerplate_ratio = 0.9;
    spec.seed = 202;
    World world = make_world(spec);
    check.require(world.corpus.queries.size() == 500, "corpus provides 500 routable queries");

    Engine engine(world.store, world.bundle, world.providers, world.cfg);
    std::size_t violations = 0, unrouted = 0;
    for (const auto& q : world.corpus.queries) {
        auto result = engine.run_hdrr(q.query);
        if (result.routed_docs.empty()) {
            ++unrouted;
            continue;
        }
        std::set<std::uint32_t> scope(result.routed_docs.begin(), result.routed_docs.end());
        auto in_scope = [&](std::uint32_t chunk) {
            return scope.count(doc_of_chunk(world, chunk)) > 0;
        };
        for (const auto& [id, score] : result.audit.fts_hits)
            violations += in_scope(id) ? 0 : 1;
        for (const auto& [id, dist] : result.audit.sem_hits)
            violations += in_scope(id) ? 0 : 1;
        for (const auto& c : result.audit.reranked)
            violations += in_scope(c.chunk_id) ? 0 : 1;
        for (const auto& c : result.selected_chunks)
            violations += in_scope(c.chunk_id) ? 0 : 1;
    }
    check.require(unrouted == 0,
                  "every query routes (got " + std::to_string(unrouted) + " unrouted)");
    check.require(violations == 0, "zero out-of-scope chunks at any stage (got " +
                                       std::to_string(violations) + ")");
}

void criterion_confusion_elimination(Checker& check) {
    SyntheticSpec spec;
    spec.n_companies = 10;
    spec.sections = 10;
    spec.years = {2023};
    spec.boilerplate_ratio = 0.9;
    spec.seed = 303;
    World world = make_world(spec);
    check.require(world.corpus.confusable_verified, "generator verified a confusable instance");

    Engine engine(world.store, world.bundle, world.providers, world.cfg);
    LocalJudge judge;

    std::size_t cbr_wrong = 0, hdrr_wrong = 0, routable = 0;
    std::size_t cbr_failures = 0, hdrr_failures = 0;
    for (const auto& q : world.corpus.queries) {
        std::uint32_t gold = gold_doc(world, q);

        auto cbr = engine.run_cbr(q.query);
        bool wrong = false;
        for (const auto& c : cbr.selected_chunks)
            wrong = wrong || doc_of_chunk(world, c.chunk_id) != gold;
        cbr_wrong += wrong ? 1 : 0;
        cbr_failures += judge.judge(q.query, cbr.answer, q.reference_answer).score == 1 ? 1 : 0;

        auto hdrr = engine.run_hdrr(q.query);
        if (!hdrr.routed_docs.empty()) {
            ++routable;
            bool hw = false;
            for (const auto& c : hdrr.selected_chunks)
                hw = hw || doc_of_chunk(world, c.chunk_id) != gold;
            hdrr_wrong += hw ? 1 : 0;
        }
        hdrr_failures += judge.judge(q.query, hdrr.answer, q.reference_answer).score == 1 ? 1 : 0;
    }
    const std::size_t total = world.corpus.queries.size();
    check.require(routable == total, "all gold queries are routable");
    check.require(cbr_wrong * 10 >= total,
                  "cbr retrieves wrong-document chunks on >= 10% of queries (got " +
                      std::to_string(cbr_wrong) + "/" + std::to_string(total) + ")");
    check.require(hdrr_wrong == 0, "hdrr retrieves zero wrong-document chunks (got " +
                                       std::to_string(hdrr_wrong) + ")");
    check.require(hdrr_failures < cbr_failures,
                  "hdrr failure rate below cbr (hdrr " + std::to_string(hdrr_failures) + ", cbr " +
                      std::to_string(cbr_failures) + ")");
}

void criterion_rrf_oracle(Checker& check) {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t nf = rng() % 50;
        std::size_t ns = rng() % 50;
        std::set<std::uint32_t> fts_set, sem_set;
        while (fts_set.size() < nf)
            fts_set.insert(static_cast<std::uint32_t>(rng() % 300));
        while (sem_set.size() < ns)
            sem_set.insert(static_cast<std::uint32_t>(rng() % 300));
        std::vector<std::uint32_t> fts(fts_set.begin(), fts_set.end());
        std::vector<std::uint32_t> sem(sem_set.begin(), sem_set.end());
        std::shuffle(fts.begin(), fts.end(), rng);
        std::shuffle(sem.begin(), sem.end(), rng);
        std::size_t cap = 1 + rng() % 50;

        auto fused = rrf_fuse(fts, sem, 60.0, cap);

        std::map<std::uint32_t, double> expected;
        for (std::size_t i = 0; i < fts.size(); ++i)
            expected[fts[i]] += 1.0 / (60.0 + static_cast<double>(i + 1));
        for (std::size_t i = 0; i < sem.size(); ++i)
            expected[sem[i]] += 1.0 / (60.0 + static_cast<double>(i + 1));
        std::vector<std::pair<std::uint32_t, double>> order(expected.begin(), expected.end());
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second)
                return a.second > b.second;
            return a.first < b.first;
        });
        if (order.size() > cap)
            order.resize(cap);

        bool same = fused.size() == order.size();
        for (std::size_t i = 0; same && i < fused.size(); ++i)
            same = fused[i].chunk_id == order[i].first && fused[i].rrf_score == order[i].second;
        check.require(same, "rrf matches brute force on instance " + std::to_string(trial));
        if (!same)
            return;
    }
}

void criterion_retrieval_exactness(Checker& check) {
    std::mt19937_64 rng(66);
    // vector search vs full-sort brute force
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t dim = 2 + rng() % 63;
        std::size_t n = 1 + rng() % 1000;
        std::vector<std::vector<float>> vecs;
        std::vector<std::uint32_t> ids, docs;
        for (std::size_t i = 0; i < n; ++i) {
            vecs.push_back(testsupport::random_unit_vector(rng, dim));
            ids.push_back(static_cast<std::uint32_t>(i));
            docs.push_back(static_cast<std::uint32_t>(i % 7));
        }
        auto index = VectorIndex::build(dim, ids, docs, vecs);
        auto query = testsupport::random_unit_vector(rng, dim);
        std::size_t k = 1 + rng() % 40;
        auto hits = index.search(query, RetrievalScope::full_corpus(), k, 2.0);

        std::vector<std::pair<double, std::uint32_t>> expected;
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0;
            for (std::size_t j = 0; j < dim; ++j)
                dot += static_cast<double>(vecs[i][j]) * static_cast<double>(query[j]);
            expected.emplace_back(std::sqrt(std::clamp(2.0 - 2.0 * dot, 0.0, 4.0)),
                                  static_cast<std::uint32_t>(i));
        }
        std::sort(expected.begin(), expected.end());
        if (expected.size() > k)
            expected.resize(k);
        bool same = hits.size() == expected.size();
        for (std::size_t i = 0; same && i < hits.size(); ++i)
            same = hits[i].chunk_id == expected[i].second && hits[i].distance == expected[i].first;
        check.require(same, "vector_search equals brute force on instance " +
                                std::to_string(trial));
        if (!same)
            return;
    }

    // BM25 vs an independent evaluator on tiny corpora
    const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta",
                                            "omega", "kappa", "sigma", "theta"};
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 20;
        std::vector<Chunk> chunks;
        std::vector<std::vector<std::string>> texts_tokens;
        for (std::size_t i = 0; i < n; ++i) {
            std::ostringstream text;
            std::size_t words = 1 + rng() % 14;
            std::vector<std::string> toks;
            for (std::size_t w = 0; w < words; ++w) {
                toks.push_back(vocab[rng() % vocab.size()]);
                text << toks.back() << ' ';
            }
            texts_tokens.push_back(toks);
            chunks.push_back(testsupport::make_chunk(static_cast<std::uint32_t>(i),
                                                     static_cast<std::uint32_t>(i % 3),
                                                     text.str()));
        }
        std::vector<std::string> keywords = {vocab[rng() % vocab.size()],
                                             vocab[rng() % vocab.size()]};
        auto index = LexicalIndex::build(chunks);
        auto hits = index.search(keywords, RetrievalScope::full_corpus(), n);

        // independent BM25: df/tf computed from the raw token lists
        std::map<std::uint32_t, double> expected;
        double total_len = 0;
        for (const auto& toks : texts_tokens)
            total_len += static_cast<double>(toks.size());
        double avg = total_len / static_cast<double>(n);
        for (const auto& kw : keywords) {
            std::size_t df = 0;
            for (const auto& toks : texts_tokens)
                df += std::count(toks.begin(), toks.end(), kw) > 0 ? 1 : 0;
            if (df == 0)
                continue;
            double idf = std::log(1.0 + (static_cast<double>(n) - df + 0.5) / (df + 0.5));
            for (std::size_t i = 0; i < n; ++i) {
                double tf = static_cast<double>(
                    std::count(texts_tokens[i].begin(), texts_tokens[i].end(), kw));
                if (tf == 0)
                    continue;
                double dl = static_cast<double>(texts_tokens[i].size());
                expected[static_cast<std::uint32_t>(i)] +=
                    idf * tf * (1.2 + 1.0) / (tf + 1.2 * (1.0 - 0.75 + 0.75 * dl / avg));
            }
        }
        bool same = hits.size() == expected.size();
        for (const auto& h : hits)
            same = same && expected.count(h.chunk_id) &&
                   std::abs(h.score - expected[h.chunk_id]) <= 1e-9;
        check.require(same, "bm25 matches the independent evaluator on instance " +
                                std::to_string(trial));
        if (!same)
            return;
    }
}

void criterion_chunker(Checker& check) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t size = 2 + rng() % 500;
        std::size_t overlap = 1 + rng() % (size - 1);
        std::size_t length = 1 + rng() % 6000;
        std::string text = testsupport::random_text(rng, length);
        auto chunks = chunk_document(text, size, overlap);

        bool ok = !chunks.empty() && chunks.front().start == 0 && chunks.back().end == length;
        std::string rebuilt;
        for (std::size_t i = 0; ok && i < chunks.size(); ++i) {
            const auto& c = chunks[i];
            ok = c.end > c.start && c.end - c.start <= size;
            if (i + 1 < chunks.size()) {
                ok = ok && chunks[i + 1].start == c.start + (size - overlap);
                if (c.end - c.start == size)
                    ok = ok && c.end - chunks[i + 1].start == overlap;
                rebuilt += text.substr(c.start, chunks[i + 1].start - c.start);
            } else {
                rebuilt += text.substr(c.start, c.end - c.start);
            }
        }
        ok = ok && rebuilt == text;
        check.require(ok, "chunker invariants hold on instance " + std::to_string(trial));
        if (!ok)
            return;
    }
}

void criterion_cutoffs(Checker& check) {
    std::vector<std::pair<std::uint32_t, double>> cliff_case = {
        {1, 0.9}, {2, 0.85}, {3, 0.7}, {4, 0.68}};
    check.require(cutoff_length(cliff_case, 0.45, 0.15, 10) == 2,
                  "cliff example keeps exactly 2");
    std::vector<std::pair<std::uint32_t, double>> cum_case = {{1, 0.5}, {2, 0.3}, {3, 0.2}};
    check.require(cutoff_length(cum_case, 0.45, 0.15, 10) == 1,
                  "cumulative example keeps exactly 1");
    std::vector<std::pair<std::uint32_t, double>> single = {{9, -2.0}};
    check.require(cutoff_length(single, 0.45, 0.15, 10) == 1, "single candidate always kept");

    std::mt19937_64 rng(88);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + rng() % 40;
        std::vector<double> scores(n);
        for (auto& s : scores)
            s = (static_cast<double>(rng() % 3000) - 1000.0) / 1000.0;
        std::sort(scores.rbegin(), scores.rend());
        std::vector<std::pair<std::uint32_t, double>> reranked;
        for (std::size_t i = 0; i < n; ++i)
            reranked.emplace_back(static_cast<std::uint32_t>(i), scores[i]);
        std::size_t keep = cutoff_length(reranked, 0.45, 0.15, 10);
        check.require(keep >= 1 && keep <= std::min<std::size_t>(10, n),
                      "selection is a non-empty prefix bounded by 10");
    }
}

void criterion_determinism(Checker& check) {
    SyntheticSpec spec;
    spec.n_companies = 6;
    spec.sections = 4;
    spec.years = {2023};
    spec.boilerplate_ratio = 0.6;
    spec.seed = 404;
    spec.embed_dim = 256;
    World world = make_world(spec);

    // persist -> load -> re-encode is bit-exact
    std::string bytes = encode_bundle(world.bundle);
    IndexBundle loaded = decode_bundle(bytes);
    check.require(encode_bundle(loaded) == bytes, "bundle round-trip is bit-exact");

    // rebuild from the same corpus is byte-identical
    IndexBundle rebuilt = build_index(world.store, *world.providers.embedder, world.cfg);
    check.require(encode_bundle(rebuilt) == bytes, "rebuild over unchanged corpus is identical");

    // two full eval runs with identical seeds produce byte-identical bundles
    Engine engine(world.store, world.bundle, world.providers, world.cfg);
    auto grouped = sample_groups(world.corpus.queries, 3, 8, 2024);
    LocalJudge judge;
    BenchmarkOptions opts;
    opts.seed = 2024;
    std::ostringstream run1, run2;
    write_bundle(run_benchmark(grouped, engine, judge, opts), run1);
    write_bundle(run_benchmark(grouped, engine, judge, opts), run2);
    check.require(run1.str() == run2.str(), "two eval runs are byte-identical");
    check.require(!run1.str().empty(), "bundle is non-empty");
}

void criterion_routing_ladder(Checker& check) {
    using testsupport::write_file;
    testsupport::TempDir dir;
    write_file(dir.path() / "2023/AAPL.pdf", "%PDF- body");
    write_file(dir.path() / "2023/AAPL.txt", "text body");
    write_file(dir.path() / "2023/DOC.txt", "doc body");
    auto store = CorpusStore::from_scan(dir.path(), scan_repository(dir.path()));

    RoutingMetadata no_year;
    no_year.tickers = {"AAPL"};
    auto injected = resolve_files_detailed(no_year, store, 2023);
    check.require(injected.records.size() == 1 && injected.records[0].fiscal_year == 2023 &&
                      injected.records[0].format == DocFormat::pdf,
                  "default-year injection resolves AAPL@2023 via pdf preference");

    RoutingMetadata old_year;
    old_year.tickers = {"AAPL"};
    old_year.years = {2019};
    auto retried = resolve_files_detailed(old_year, store, 2023);
    check.require(retried.records.size() == 1 && retried.default_year_retry &&
                      retried.records[0].fiscal_year == 2023,
                  "retry ladder lands on the default year");

    RoutingMetadata missing;
    missing.tickers = {"PEAK"};
    missing.years = {2023};
    check.require(resolve_files(missing, store, 2023).empty(),
                  "unresolvable ticker yields an empty result");

    // token-estimate ordering on a >= 50k-char document
    SyntheticSpec spec;
    spec.n_companies = 2;
    spec.sections = 160;
    spec.years = {2023};
    spec.boilerplate_ratio = 0.5;
    spec.seed = 505;
    spec.embed_dim = 256;
    World world = make_world(spec);
    std::uint64_t doc_chars = world.store.documents()[0].char_length;
    check.require(doc_chars >= 50000, "synthetic document reaches 50k characters (got " +
                                          std::to_string(doc_chars) + ")");

    Engine engine(world.store, world.bundle, world.providers, world.cfg);
    const auto& q = world.corpus.queries.front();
    auto sfr = engine.run_sfr(q.query);
    auto hdrr = engine.run_hdrr(q.query);
    check.require(hdrr.token_estimate > 0, "hdrr context is non-empty");
    check.require(sfr.token_estimate >= 5 * hdrr.token_estimate,
                  "sfr token estimate >= 5x hdrr (sfr " + std::to_string(sfr.token_estimate) +
                      ", hdrr " + std::to_string(hdrr.token_estimate) + ")");
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<void(Checker&)> body;
};

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "aggregation reproduction (reference mean/std rows)", 1.0, criterion_aggregation},
        {2, "band partition sums to 100", 1.0, criterion_bands},
        {3, "fallback equivalence: forced-empty routing matches cbr", 30.0,
         criterion_fallback_equivalence},
        {4, "scope soundness over 500 routable queries", 60.0, criterion_scope_soundness},
        {5, "confusion elimination on a homogeneous corpus", 120.0,
         criterion_confusion_elimination},
        {6, "rrf fusion matches brute force on 1000 instances", 5.0, criterion_rrf_oracle},
        {7, "retrieval exactness: vector scan and bm25 oracles", 30.0,
         criterion_retrieval_exactness},
        {8, "chunker coverage and reconstruction on 500 instances", 5.0, criterion_chunker},
        {9, "cutoff worked examples and bounds", 1.0, criterion_cutoffs},
        {10, "determinism and persistence", 60.0, criterion_determinism},
        {11, "routing ladder traces and token-estimate ordering", 5.0, criterion_routing_ladder},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Checker check;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.time_limit_s)
            check.failures.push_back("runtime " + std::to_string(elapsed) + "s exceeds limit " +
                                     std::to_string(criterion.time_limit_s) + "s");

        bool ok = check.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("[%2d/11] %s  %s (%.2fs)\n", criterion.id, ok ? "PASS" : "FAIL",
                    criterion.name.c_str(), elapsed);
        for (const auto& f : check.failures)
            std::printf("        - %s\n", f.c_str());
    }
    if (failed == 0)
        std::printf("all 11 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failed);
    return failed;
}
