#pragma once

#include <docroute/engine.hpp>
#include <docroute/providers.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace docroute {

struct EvalQuery {
    std::string query_id;
    int group_id = 0; // 1-based once grouped
    std::string query;
    std::string reference_answer;
    std::optional<std::string> gold_ticker;
    std::optional<int> gold_year;
    std::optional<std::string> strata;
};

/// Line-delimited JSON dataset with fields query_id, query,
/// reference_answer and optional group, ticker, year, strata.
std::vector<EvalQuery> load_dataset(const std::filesystem::path& file);
void save_dataset(const std::vector<EvalQuery>& queries, const std::filesystem::path& file);

struct GroupedDataset {
    std::vector<EvalQuery> queries; // group_id assigned, grouped order
    int n_groups = 0;
    std::size_t group_size = 0;
    std::string dataset_hash; // hex FNV of the grouped content
};

/// Disjoint groups sampled without replacement, deterministic given seed.
/// The same grouping is reused for every system (paired design). With
/// stratify set, records carrying a strata key are allocated to groups
/// proportionally (largest remainder), uniform within each stratum.
GroupedDataset sample_groups(const std::vector<EvalQuery>& dataset, int n_groups,
                             std::size_t group_size, std::uint64_t seed, bool stratify = false);

/// Per-group judged-score aggregates. Percentages are rounded to one
/// decimal; avg_score is exact. Bands: low s<=3, mid 4-7, high s>=8 (the
/// high band coincides with the correctness rate by definition).
struct GroupReport {
    int group_id = 0;
    std::size_t count = 0;
    double avg_score = 0.0;
    double failure_rate = 0.0;     // P(s = 1) %
    double correctness_rate = 0.0; // P(s >= 8) %
    double perfect_rate = 0.0;     // P(s = 10) %
    double band_low = 0.0;
    double band_mid = 0.0;
    double band_high = 0.0;
};

GroupReport score_group(int group_id, const std::vector<int>& scores);

/// Deviation convention for the Std rows. Sample (n-1) reproduces the
/// reference aggregation arithmetic and is the default; population (n) is
/// available for users who prefer it.
enum class StdMode { sample, population };

StdMode std_mode_from_string(const std::string& s);

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;
};

struct SystemSummary {
    std::string system;
    MetricStats avg_score;
    MetricStats failure_rate;
    MetricStats correctness_rate;
    MetricStats perfect_rate;
    MetricStats band_low;
    MetricStats band_mid;
    MetricStats band_high;
};

/// Mean and deviation per metric per system over the group values.
/// All systems must carry the same group ids.
std::vector<SystemSummary>
aggregate_systems(const std::map<std::string, std::vector<GroupReport>>& per_system,
                  StdMode mode = StdMode::sample);

struct PairedDiff {
    struct Row {
        int group_id = 0;
        double d_avg = 0.0;
        double d_failure = 0.0;
        double d_correctness = 0.0;
        double d_perfect = 0.0;
    };
    std::string a; // reported as (a - b)
    std::string b;
    std::vector<Row> rows;
    Row mean;
    Row stddev;
};

PairedDiff paired_diff(const std::string& a_name, const std::vector<GroupReport>& a_reports,
                       const std::string& b_name, const std::vector<GroupReport>& b_reports,
                       StdMode mode = StdMode::sample);

struct EvalRecord {
    std::string system;
    int group_id = 0;
    std::string query_id;
    int score = 0; // 0 when unevaluated
    std::string error;
    bool used_fallback = false;
    bool default_year_retry = false;
    bool unevaluated = false;
};

struct SystemStats {
    std::size_t total = 0;
    std::size_t fallback_count = 0;
    std::size_t year_retry_count = 0;
    std::size_t error_count = 0;
    std::size_t unevaluated = 0;
};

struct BenchmarkOptions {
    std::vector<Paradigm> paradigms = {Paradigm::CBR, Paradigm::SFR, Paradigm::HDRR};
    std::size_t parallelism = 1;
    int judge_retries = 2;
    StdMode std_mode = StdMode::sample;
    std::uint64_t seed = 0; // echoed into the bundle meta
    std::string judge_name = "local";
};

struct BenchmarkResult {
    std::uint64_t seed = 0;
    std::string dataset_hash;
    int n_groups = 0;
    std::size_t group_size = 0;
    StdMode std_mode = StdMode::sample;
    std::string judge_name;
    std::vector<std::string> systems;
    std::vector<EvalRecord> records;
    std::map<std::string, std::vector<GroupReport>> group_reports;
    std::vector<SystemSummary> summary;
    std::vector<PairedDiff> paired;
    std::map<std::string, SystemStats> stats;
};

/// Runs every paradigm over every grouped query, judges answers against
/// references, and aggregates. Pipeline-level failures (e.g. SFR with no
/// resolvable document) are scored 1 and tagged with the error; judge
/// failures after retries leave the query unevaluated, excluded from the
/// rates and counted. Query fan-out honors opts.parallelism; results are
/// collected in input order regardless of completion order.
BenchmarkResult run_benchmark(const GroupedDataset& dataset, const Engine& engine, Judge& judge,
                              const BenchmarkOptions& opts);

/// Machine-readable line-delimited report bundle. Byte-identical across
/// reruns with identical seeds and local providers.
void write_bundle(const BenchmarkResult& result, std::ostream& out);
void write_bundle(const BenchmarkResult& result, const std::filesystem::path& file);

/// A bundle read back for rendering. Pre-scored bundles carrying only
/// group_report lines are accepted; summaries are recomputed on render.
struct Bundle {
    std::vector<std::string> systems; // in order of first appearance
    std::vector<EvalRecord> records;
    std::map<std::string, std::vector<GroupReport>> group_reports;
    std::map<std::string, SystemStats> stats;
    StdMode std_mode = StdMode::sample;
    std::string meta_line; // raw meta JSON, empty if absent
};

Bundle read_bundle(std::istream& in);
Bundle read_bundle(const std::filesystem::path& file);

/// Aligned-column text rendering: per-group table, score-band table,
/// paired-diff tables and run stats.
std::string render_report(const Bundle& bundle);

} // namespace docroute
