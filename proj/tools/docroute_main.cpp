// docroute - retrieval engine and evaluation harness for corpora whose
// documents are addressable by (ticker, year).
//
// Subcommands:
//   index      scan + chunk + embed a repository into an index bundle
//   query      run one query through cbr | sfr | hdrr
//   eval       batch evaluation with grouped sampling and judged scoring
//   report     render a stored report bundle as aligned text tables
//   generate   synthesize a corpus with controllable structural homogeneity
//
// Exit codes: 0 success, 1 pipeline/eval failure, 2 usage or config error.

#include <docroute/config.hpp>
#include <docroute/corpus.hpp>
#include <docroute/engine.hpp>
#include <docroute/errors.hpp>
#include <docroute/eval.hpp>
#include <docroute/provider_cache.hpp>
#include <docroute/providers_local.hpp>
#include <docroute/providers_remote.hpp>
#include <docroute/synthetic.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace docroute;

namespace {

struct CommonArgs {
    std::string config_file;
    std::string providers = "local"; // local | remote
    std::string cache_mode;          // off | record | replay
    std::string cache_path = "provider_cache.jsonl";
};

// Builds the config from defaults, file and environment; the caller lays
// explicitly-passed CLI flags on top (flag > env > file > default).
RetrievalConfig make_retrieval_config(const CommonArgs& common) {
    ConfigMap file_values;
    if (!common.config_file.empty())
        file_values = parse_config_file(common.config_file);
    RetrievalConfig cfg;
    apply_retrieval_settings(cfg, file_values);
    return cfg;
}

std::shared_ptr<CacheStore> make_cache(const CommonArgs& common, const ConfigMap& file_values) {
    std::string mode_str = common.cache_mode;
    if (mode_str.empty())
        mode_str = resolve_setting("cache_mode", file_values).value_or("off");
    CacheMode mode = cache_mode_from_string(mode_str);
    if (mode == CacheMode::off)
        return nullptr;
    std::string path = common.cache_path;
    if (auto v = resolve_setting("cache_path", file_values))
        path = *v;
    return std::make_shared<CacheStore>(path, mode);
}

RemoteConfig make_remote_config(const ConfigMap& file_values, std::size_t embed_dim) {
    RemoteConfig rc;
    rc.embed_dimension = embed_dim;
    if (auto v = resolve_setting("base_url", file_values))
        rc.base_url = *v;
    if (auto v = resolve_setting("api_key", file_values))
        rc.api_key = *v;
    if (auto v = resolve_setting("embed_model", file_values))
        rc.embed_model = *v;
    if (auto v = resolve_setting("chat_model", file_values))
        rc.chat_model = *v;
    if (auto v = resolve_setting("rerank_model", file_values))
        rc.rerank_model = *v;
    if (auto v = resolve_setting("judge_model", file_values))
        rc.judge_model = *v;
    if (auto v = resolve_setting("embed_batch_size", file_values))
        rc.embed_batch_size = to_size("embed_batch_size", *v);
    if (auto v = resolve_setting("temperature", file_values))
        rc.temperature = to_double("temperature", *v);
    if (auto v = resolve_setting("max_retries", file_values))
        rc.max_retries = to_int("max_retries", *v);
    if (auto v = resolve_setting("timeout_seconds", file_values))
        rc.timeout_seconds = to_int("timeout_seconds", *v);
    if (auto v = resolve_setting("attachment_cap_bytes", file_values))
        rc.attachment_cap_bytes = to_size("attachment_cap_bytes", *v);
    if (auto v = resolve_setting("rewrite_prompt_path", file_values))
        rc.rewrite_prompt_path = *v;
    if (auto v = resolve_setting("parse_prompt_path", file_values))
        rc.parse_prompt_path = *v;
    if (auto v = resolve_setting("generate_prompt_path", file_values))
        rc.generate_prompt_path = *v;
    if (auto v = resolve_setting("judge_prompt_path", file_values))
        rc.judge_prompt_path = *v;
    return rc;
}

TickerLexicon lexicon_for(const CorpusStore& store, const std::string& lexicon_file) {
    TickerLexicon lex;
    if (!lexicon_file.empty())
        lex = TickerLexicon::load(lexicon_file);
    // Every ticker present in the store matches as a symbol.
    for (const auto& rec : store.documents())
        lex.register_symbol(rec.ticker);
    return lex;
}

struct EngineInputs {
    CorpusStore store;
    IndexBundle bundle;
    ProviderSet providers;
    RetrievalConfig cfg;
};

EngineInputs load_engine_inputs(const std::string& index_dir, const std::string& root,
                                const std::string& lexicon_file, const CommonArgs& common,
                                const RetrievalConfig& cfg) {
    EngineInputs in;
    in.cfg = cfg;
    fs::path dir(index_dir);
    in.store = CorpusStore::load_manifest(dir / "manifest.tsv", root);
    in.bundle = load_bundle(dir / "index.drx");
    TickerLexicon lex = lexicon_for(in.store, lexicon_file);
    if (common.providers == "local") {
        in.providers = make_local_providers(lex, in.bundle.vectors.dimension());
    } else if (common.providers == "remote") {
        ConfigMap file_values;
        if (!common.config_file.empty())
            file_values = parse_config_file(common.config_file);
        auto client = std::make_shared<RemoteClient>(
            make_remote_config(file_values, in.bundle.vectors.dimension()),
            make_cache(common, file_values));
        in.providers = make_remote_providers(client);
        // Metadata parsing stays schema-driven on the remote side; the
        // lexicon is still used to normalize store symbols.
    } else {
        throw UsageError("unknown providers mode: " + common.providers);
    }
    return in;
}

int run_index(const std::string& root, const std::string& out_dir, const CommonArgs& common,
              const RetrievalConfig& cfg) {
    ScanReport scan = scan_repository(root);
    const std::size_t skipped = scan.skipped;
    const std::size_t warning_count = scan.warnings.size();
    for (const auto& w : scan.warnings)
        std::cerr << "warning: " << w << '\n';
    CorpusStore store = CorpusStore::from_scan(root, std::move(scan));

    std::shared_ptr<Embedder> embedder;
    if (common.providers == "local") {
        embedder = std::make_shared<LocalEmbedder>(cfg.embed_dim);
    } else {
        ConfigMap file_values;
        if (!common.config_file.empty())
            file_values = parse_config_file(common.config_file);
        auto client = std::make_shared<RemoteClient>(make_remote_config(file_values, cfg.embed_dim),
                                                     make_cache(common, file_values));
        embedder = std::make_shared<RemoteEmbedder>(client);
    }

    IndexBundle bundle = build_index(store, *embedder, cfg);
    fs::create_directories(out_dir);
    store.save_manifest(fs::path(out_dir) / "manifest.tsv");
    save_bundle(bundle, fs::path(out_dir) / "index.drx");

    std::cout << "documents: " << store.documents().size() << "\n"
              << "chunks: " << bundle.catalog.size() << "\n"
              << "terms: " << bundle.lexical.term_count() << "\n"
              << "skipped files: " << skipped << "\n"
              << "warnings: " << warning_count << "\n";
    return 0;
}

int run_query(const std::string& query, const std::string& pipeline, const EngineInputs& in,
              bool verbose) {
    Engine engine(in.store, in.bundle, in.providers, in.cfg);
    PipelineResult result = engine.run(paradigm_from_string(pipeline), query);

    if (verbose) {
        std::cerr << "pipeline: " << paradigm_name(result.paradigm) << '\n';
        std::cerr << "routed docs:";
        if (result.routed_docs.empty())
            std::cerr << " (none)";
        for (auto id : result.routed_docs) {
            const auto& rec = engine.store().document(id);
            std::cerr << ' ' << rec.ticker << '@' << rec.fiscal_year;
        }
        std::cerr << '\n';
        std::cerr << "used_fallback: " << (result.used_fallback ? "yes" : "no")
                  << "  default_year_retry: " << (result.default_year_retry ? "yes" : "no")
                  << "  token_estimate: " << result.token_estimate << '\n';
        if (!result.audit.reranked.empty()) {
            std::cerr << "stage ranks (chunk: fts sem rrf rerank):\n";
            for (const auto& c : result.audit.reranked) {
                std::cerr << "  chunk " << c.chunk_id << ": "
                          << (c.fts_rank ? std::to_string(*c.fts_rank) : std::string("-")) << ' '
                          << (c.sem_rank ? std::to_string(*c.sem_rank) : std::string("-")) << ' '
                          << c.rrf_score << ' '
                          << (c.rerank_score ? std::to_string(*c.rerank_score) : std::string("-"))
                          << '\n';
            }
            std::cerr << "selected: " << result.audit.selected_count << " chunk(s)\n";
        }
    }
    std::cout << result.answer << '\n';
    return 0;
}

int run_eval(const EngineInputs& in, const std::string& dataset_file, int groups,
             std::size_t group_size, std::uint64_t seed, const std::string& pipelines,
             const std::string& judge_kind, std::size_t parallelism, bool stratify,
             const std::string& out_file, const CommonArgs& common,
             const std::string& std_mode_str) {
    Engine engine(in.store, in.bundle, in.providers, in.cfg);
    auto dataset = load_dataset(dataset_file);
    GroupedDataset grouped = sample_groups(dataset, groups, group_size, seed, stratify);

    ConfigMap file_values;
    if (!common.config_file.empty())
        file_values = parse_config_file(common.config_file);

    BenchmarkOptions opts;
    opts.paradigms.clear();
    std::stringstream ss(pipelines);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty())
            opts.paradigms.push_back(paradigm_from_string(name));
    opts.parallelism = parallelism;
    opts.seed = seed;
    opts.judge_name = judge_kind;
    opts.std_mode = std_mode_from_string(std_mode_str);
    if (auto v = resolve_setting("judge_retries", file_values))
        opts.judge_retries = to_int("judge_retries", *v);

    std::shared_ptr<Judge> judge;
    if (judge_kind == "local") {
        judge = std::make_shared<LocalJudge>();
    } else if (judge_kind == "remote") {
        ConfigMap file_values;
        if (!common.config_file.empty())
            file_values = parse_config_file(common.config_file);
        auto client = std::make_shared<RemoteClient>(
            make_remote_config(file_values, in.bundle.vectors.dimension()),
            make_cache(common, file_values));
        judge = std::make_shared<RemoteJudge>(client);
    } else {
        throw UsageError("unknown judge: " + judge_kind + " (expected local|remote)");
    }

    BenchmarkResult result = run_benchmark(grouped, engine, *judge, opts);
    if (!out_file.empty())
        write_bundle(result, fs::path(out_file));
    else
        write_bundle(result, std::cout);

    std::size_t unevaluated = 0;
    for (const auto& [system, stats] : result.stats)
        unevaluated += stats.unevaluated;
    if (unevaluated > 0) {
        std::cerr << "error: " << unevaluated << " queries could not be judged\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"document-routed retrieval engine and evaluation harness"};
    app.require_subcommand(1);

    CommonArgs common;
    RetrievalConfig flags; // CLI-bound copies; merged over config/env below

    // --- index ---
    auto* index_cmd = app.add_subcommand("index", "build the store manifest and index bundle");
    std::string root, out_dir;
    index_cmd->add_option("--root", root, "corpus repository root")->required();
    index_cmd->add_option("--out", out_dir, "output directory for manifest.tsv and index.drx")
        ->required();
    index_cmd->add_option("--chunk-size", flags.chunk_size, "chunk size in characters");
    index_cmd->add_option("--overlap", flags.overlap, "chunk overlap in characters");
    index_cmd->add_option("--embed-dim", flags.embed_dim, "embedding dimension");
    index_cmd->add_option("--config", common.config_file, "config file (key = value lines)");
    index_cmd->add_option("--providers", common.providers, "local|remote embedding provider");
    index_cmd->add_option("--cache", common.cache_mode, "provider cache mode off|record|replay");
    index_cmd->add_option("--cache-path", common.cache_path, "provider cache file");

    // --- query ---
    auto* query_cmd = app.add_subcommand("query", "answer one query");
    std::string query_text, pipeline = "hdrr", index_dir, lexicon_file;
    bool verbose = false;
    query_cmd->add_option("query", query_text, "the question")->required();
    query_cmd->add_option("--pipeline", pipeline, "cbr|sfr|hdrr");
    query_cmd->add_option("--index", index_dir, "index directory from `docroute index`")
        ->required();
    query_cmd->add_option("--root", root, "corpus repository root")->required();
    query_cmd->add_option("--lexicon", lexicon_file, "ticker alias lexicon (TICKER<TAB>alias)");
    query_cmd->add_flag("--verbose", verbose, "print routed docs, fallback flag, stage ranks");
    query_cmd->add_option("--config", common.config_file, "config file");
    query_cmd->add_option("--providers", common.providers, "local|remote providers");
    query_cmd->add_option("--cache", common.cache_mode, "provider cache mode");
    query_cmd->add_option("--cache-path", common.cache_path, "provider cache file");
    query_cmd->add_option("--default-year", flags.default_year, "default fiscal year");

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "batch evaluation over a dataset");
    std::string dataset_file, pipelines = "cbr,sfr,hdrr", judge_kind = "local", out_file;
    std::string std_mode_str = "sample";
    int groups = 5;
    std::size_t group_size = 300, parallelism = 1;
    std::optional<std::uint64_t> seed;
    bool stratify = false;
    eval_cmd->add_option("--dataset", dataset_file, "line-delimited JSON dataset")->required();
    eval_cmd->add_option("--index", index_dir, "index directory")->required();
    eval_cmd->add_option("--root", root, "corpus repository root")->required();
    eval_cmd->add_option("--groups", groups, "number of groups");
    eval_cmd->add_option("--group-size", group_size, "queries per group");
    eval_cmd->add_option("--seed", seed, "sampling seed (required for reproducibility)");
    eval_cmd->add_option("--pipelines", pipelines, "comma list of cbr,sfr,hdrr");
    eval_cmd->add_option("--judge", judge_kind, "local|remote judge");
    eval_cmd->add_option("--parallelism", parallelism, "concurrent queries bound");
    eval_cmd->add_flag("--stratify", stratify, "use the dataset's strata key when sampling");
    eval_cmd->add_option("--out", out_file, "report bundle output path (stdout if omitted)");
    eval_cmd->add_option("--lexicon", lexicon_file, "ticker alias lexicon");
    eval_cmd->add_option("--std-mode", std_mode_str, "sample|population deviation");
    eval_cmd->add_option("--config", common.config_file, "config file");
    eval_cmd->add_option("--providers", common.providers, "local|remote providers");
    eval_cmd->add_option("--cache", common.cache_mode, "provider cache mode");
    eval_cmd->add_option("--cache-path", common.cache_path, "provider cache file");
    eval_cmd->add_option("--default-year", flags.default_year, "default fiscal year");

    // --- report ---
    auto* report_cmd = app.add_subcommand("report", "render a report bundle as text tables");
    std::string bundle_file;
    report_cmd->add_option("--bundle", bundle_file, "report bundle path")->required();

    // --- generate ---
    auto* gen_cmd = app.add_subcommand("generate", "synthesize a corpus + gold query set");
    std::string gen_out;
    SyntheticSpec spec;
    std::string years_list = "2023";
    gen_cmd->add_option("--out", gen_out, "output repository root")->required();
    gen_cmd->add_option("--companies", spec.n_companies, "number of companies (>= 2)");
    gen_cmd->add_option("--years", years_list, "comma list of fiscal years");
    gen_cmd->add_option("--ratio", spec.boilerplate_ratio, "boilerplate ratio in [0, 1]");
    gen_cmd->add_option("--sections", spec.sections, "sections per document");
    gen_cmd->add_option("--sentences", spec.sentences_per_section, "sentence slots per section");
    gen_cmd->add_option("--seed", spec.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (index_cmd->parsed()) {
            RetrievalConfig cfg = make_retrieval_config(common);
            if (index_cmd->count("--chunk-size"))
                cfg.chunk_size = flags.chunk_size;
            if (index_cmd->count("--overlap"))
                cfg.overlap = flags.overlap;
            if (index_cmd->count("--embed-dim"))
                cfg.embed_dim = flags.embed_dim;
            return run_index(root, out_dir, common, cfg);
        }
        if (query_cmd->parsed()) {
            RetrievalConfig cfg = make_retrieval_config(common);
            if (query_cmd->count("--default-year"))
                cfg.default_year = flags.default_year;
            auto in = load_engine_inputs(index_dir, root, lexicon_file, common, cfg);
            return run_query(query_text, pipeline, in, verbose);
        }
        if (eval_cmd->parsed()) {
            if (!seed)
                throw UsageError("--seed is required: evaluation runs must be reproducible");
            RetrievalConfig cfg = make_retrieval_config(common);
            if (eval_cmd->count("--default-year"))
                cfg.default_year = flags.default_year;
            ConfigMap file_values;
            if (!common.config_file.empty())
                file_values = parse_config_file(common.config_file);
            if (!eval_cmd->count("--parallelism"))
                if (auto v = resolve_setting("parallelism", file_values))
                    parallelism = to_size("parallelism", *v);
            if (!eval_cmd->count("--std-mode"))
                if (auto v = resolve_setting("std_mode", file_values))
                    std_mode_str = *v;
            auto in = load_engine_inputs(index_dir, root, lexicon_file, common, cfg);
            return run_eval(in, dataset_file, groups, group_size, *seed, pipelines, judge_kind,
                            parallelism, stratify, out_file, common, std_mode_str);
        }
        if (report_cmd->parsed()) {
            std::cout << render_report(read_bundle(fs::path(bundle_file)));
            return 0;
        }
        if (gen_cmd->parsed()) {
            spec.years.clear();
            std::stringstream ss(years_list);
            std::string y;
            while (std::getline(ss, y, ','))
                if (!y.empty())
                    spec.years.push_back(std::stoi(y));
            SyntheticCorpus corpus = generate_corpus(spec);
            write_corpus(corpus, gen_out);
            std::cout << "documents: " << corpus.docs.size() << "\n"
                      << "queries: " << corpus.queries.size() << "\n"
                      << "confusable verified: " << (corpus.confusable_verified ? "yes" : "no")
                      << "\n";
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
