#include <docroute/eval.hpp>

#include <docroute/errors.hpp>
#include <docroute/util.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace docroute {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Dataset I/O
// ---------------------------------------------------------------------------

std::vector<EvalQuery> load_dataset(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("dataset not found: " + file.string());
    std::vector<EvalQuery> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw FormatError("dataset line " + std::to_string(lineno) + " is not valid JSON");
        EvalQuery q;
        q.query_id = j.value("query_id", "q" + std::to_string(lineno));
        q.group_id = j.value("group", 0);
        q.query = j.at("query").get<std::string>();
        q.reference_answer = j.at("reference_answer").get<std::string>();
        if (j.contains("ticker") && j["ticker"].is_string())
            q.gold_ticker = j["ticker"].get<std::string>();
        if (j.contains("year") && j["year"].is_number_integer())
            q.gold_year = j["year"].get<int>();
        if (j.contains("strata") && j["strata"].is_string())
            q.strata = j["strata"].get<std::string>();
        out.push_back(std::move(q));
    }
    return out;
}

void save_dataset(const std::vector<EvalQuery>& queries, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write dataset: " + file.string());
    for (const auto& q : queries) {
        ordered_json j;
        j["query_id"] = q.query_id;
        if (q.group_id > 0)
            j["group"] = q.group_id;
        j["query"] = q.query;
        j["reference_answer"] = q.reference_answer;
        if (q.gold_ticker)
            j["ticker"] = *q.gold_ticker;
        if (q.gold_year)
            j["year"] = *q.gold_year;
        if (q.strata)
            j["strata"] = *q.strata;
        out << j.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Group sampling
// ---------------------------------------------------------------------------

namespace {

void fisher_yates(std::vector<std::size_t>& idx, DetRng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
}

std::string grouped_hash(const std::vector<EvalQuery>& queries) {
    Fnv64 h;
    for (const auto& q : queries) {
        h.update(q.query_id);
        h.update("\x1f");
        h.update(q.query);
        h.update("\x1f");
        h.update(q.reference_answer);
        h.update("\x1f");
        h.update(std::to_string(q.group_id));
        h.update("\x1e");
    }
    return to_hex(h.digest());
}

} // namespace

GroupedDataset sample_groups(const std::vector<EvalQuery>& dataset, int n_groups,
                             std::size_t group_size, std::uint64_t seed, bool stratify) {
    if (n_groups < 1 || group_size < 1)
        throw UsageError("sample_groups requires n_groups >= 1 and group_size >= 1");
    const std::size_t required = static_cast<std::size_t>(n_groups) * group_size;
    if (dataset.size() < required)
        throw UsageError("dataset has " + std::to_string(dataset.size()) + " queries; " +
                         std::to_string(n_groups) + " groups of " + std::to_string(group_size) +
                         " require " + std::to_string(required));

    GroupedDataset grouped;
    grouped.n_groups = n_groups;
    grouped.group_size = group_size;
    std::vector<std::vector<std::size_t>> per_group(static_cast<std::size_t>(n_groups));

    if (!stratify) {
        std::vector<std::size_t> idx(dataset.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        DetRng rng(seed);
        fisher_yates(idx, rng);
        for (std::size_t i = 0; i < required; ++i)
            per_group[i / group_size].push_back(idx[i]);
    } else {
        // Proportional allocation per stratum (largest remainder), uniform
        // within each stratum, extras rotated across groups so every group
        // lands on exactly group_size items.
        std::map<std::string, std::vector<std::size_t>> strata;
        for (std::size_t i = 0; i < dataset.size(); ++i)
            strata[dataset[i].strata.value_or("")].push_back(i);

        std::vector<std::pair<std::string, std::size_t>> alloc; // stratum -> total draw
        double scale = static_cast<double>(required) / static_cast<double>(dataset.size());
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::string>> remainders;
        for (const auto& [key, members] : strata) {
            double exact = static_cast<double>(members.size()) * scale;
            auto base = static_cast<std::size_t>(std::floor(exact));
            base = std::min(base, members.size());
            alloc.emplace_back(key, base);
            assigned += base;
            remainders.emplace_back(exact - std::floor(exact), key);
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first)
                return x.first > y.first;
            return x.second < y.second;
        });
        for (const auto& [frac, key] : remainders) {
            if (assigned == required)
                break;
            auto it = std::find_if(alloc.begin(), alloc.end(),
                                   [&](const auto& p) { return p.first == key; });
            if (it->second < strata[key].size()) {
                ++it->second;
                ++assigned;
            }
        }
        // Top up from any strata with spare members (rare: rounding caps).
        for (auto& [key, count] : alloc) {
            while (assigned < required && count < strata[key].size()) {
                ++count;
                ++assigned;
            }
        }

        std::size_t cursor = 0; // rotates which groups receive extras
        for (const auto& [key, count] : alloc) {
            auto members = strata[key];
            DetRng rng(seed ^ fnv1a64(key));
            fisher_yates(members, rng);
            std::size_t base = count / static_cast<std::size_t>(n_groups);
            std::size_t extras = count % static_cast<std::size_t>(n_groups);
            std::size_t taken = 0;
            for (std::size_t g = 0; g < static_cast<std::size_t>(n_groups); ++g) {
                std::size_t want = base;
                if (extras > 0) {
                    std::size_t slot = (g + static_cast<std::size_t>(n_groups) - cursor) %
                                       static_cast<std::size_t>(n_groups);
                    if (slot < extras)
                        ++want;
                }
                for (std::size_t k = 0; k < want; ++k)
                    per_group[g].push_back(members[taken++]);
            }
            cursor = (cursor + extras) % static_cast<std::size_t>(n_groups);
        }
    }

    for (std::size_t g = 0; g < per_group.size(); ++g) {
        for (std::size_t i : per_group[g]) {
            EvalQuery q = dataset[i];
            q.group_id = static_cast<int>(g) + 1;
            grouped.queries.push_back(std::move(q));
        }
    }
    grouped.dataset_hash = grouped_hash(grouped.queries);
    return grouped;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

GroupReport score_group(int group_id, const std::vector<int>& scores) {
    if (scores.empty())
        throw UsageError("score_group: empty score list");
    for (int s : scores)
        if (s < 1 || s > 10)
            throw UsageError("score_group: score " + std::to_string(s) + " outside [1,10]");

    GroupReport r;
    r.group_id = group_id;
    r.count = scores.size();
    const double n = static_cast<double>(scores.size());
    std::size_t failures = 0, correct = 0, perfect = 0, low = 0, mid = 0, high = 0;
    double sum = 0.0;
    for (int s : scores) {
        sum += s;
        if (s == 1)
            ++failures;
        if (s >= 8)
            ++correct;
        if (s == 10)
            ++perfect;
        if (s <= 3)
            ++low;
        else if (s <= 7)
            ++mid;
        else
            ++high;
    }
    r.avg_score = sum / n;
    r.failure_rate = round1(100.0 * static_cast<double>(failures) / n);
    r.correctness_rate = round1(100.0 * static_cast<double>(correct) / n);
    r.perfect_rate = round1(100.0 * static_cast<double>(perfect) / n);
    r.band_low = round1(100.0 * static_cast<double>(low) / n);
    r.band_mid = round1(100.0 * static_cast<double>(mid) / n);
    r.band_high = round1(100.0 * static_cast<double>(high) / n);
    return r;
}

StdMode std_mode_from_string(const std::string& s) {
    if (s == "sample")
        return StdMode::sample;
    if (s == "population")
        return StdMode::population;
    throw UsageError("unknown std mode: " + s + " (expected sample|population)");
}

namespace {

MetricStats stats_of(const std::vector<double>& values, StdMode mode) {
    MetricStats m;
    const double n = static_cast<double>(values.size());
    for (double v : values)
        m.mean += v;
    m.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - m.mean) * (v - m.mean);
        double divisor = mode == StdMode::sample ? n - 1.0 : n;
        m.stddev = std::sqrt(ss / divisor);
    }
    return m;
}

std::vector<GroupReport> sorted_by_group(std::vector<GroupReport> reports) {
    std::sort(reports.begin(), reports.end(),
              [](const GroupReport& a, const GroupReport& b) { return a.group_id < b.group_id; });
    return reports;
}

void check_matched_groups(const std::map<std::string, std::vector<GroupReport>>& per_system) {
    if (per_system.empty())
        throw UsageError("no systems to aggregate");
    std::vector<int> reference;
    for (const auto& [name, reports] : per_system) {
        std::vector<int> ids;
        for (const auto& r : reports)
            ids.push_back(r.group_id);
        std::sort(ids.begin(), ids.end());
        if (ids.empty())
            throw UsageError("system " + name + " has no group reports");
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw UsageError("system " + name + " has duplicate group ids");
        if (reference.empty())
            reference = ids;
        else if (ids != reference)
            throw UsageError("mismatched group sets across systems (offending system: " + name +
                             ")");
    }
}

} // namespace

std::vector<SystemSummary>
aggregate_systems(const std::map<std::string, std::vector<GroupReport>>& per_system,
                  StdMode mode) {
    check_matched_groups(per_system);
    std::vector<SystemSummary> out;
    for (const auto& [name, reports_in] : per_system) {
        auto reports = sorted_by_group(reports_in);
        auto collect = [&](auto member) {
            std::vector<double> v;
            v.reserve(reports.size());
            for (const auto& r : reports)
                v.push_back(r.*member);
            return v;
        };
        SystemSummary s;
        s.system = name;
        s.avg_score = stats_of(collect(&GroupReport::avg_score), mode);
        s.failure_rate = stats_of(collect(&GroupReport::failure_rate), mode);
        s.correctness_rate = stats_of(collect(&GroupReport::correctness_rate), mode);
        s.perfect_rate = stats_of(collect(&GroupReport::perfect_rate), mode);
        s.band_low = stats_of(collect(&GroupReport::band_low), mode);
        s.band_mid = stats_of(collect(&GroupReport::band_mid), mode);
        s.band_high = stats_of(collect(&GroupReport::band_high), mode);
        out.push_back(std::move(s));
    }
    return out;
}

PairedDiff paired_diff(const std::string& a_name, const std::vector<GroupReport>& a_reports,
                       const std::string& b_name, const std::vector<GroupReport>& b_reports,
                       StdMode mode) {
    check_matched_groups({{a_name + "#a", a_reports}, {b_name + "#b", b_reports}});
    auto a = sorted_by_group(a_reports);
    auto b = sorted_by_group(b_reports);

    PairedDiff diff;
    diff.a = a_name;
    diff.b = b_name;
    std::vector<double> d_avg, d_fail, d_corr, d_perf;
    for (std::size_t i = 0; i < a.size(); ++i) {
        PairedDiff::Row row;
        row.group_id = a[i].group_id;
        row.d_avg = a[i].avg_score - b[i].avg_score;
        row.d_failure = a[i].failure_rate - b[i].failure_rate;
        row.d_correctness = a[i].correctness_rate - b[i].correctness_rate;
        row.d_perfect = a[i].perfect_rate - b[i].perfect_rate;
        d_avg.push_back(row.d_avg);
        d_fail.push_back(row.d_failure);
        d_corr.push_back(row.d_correctness);
        d_perf.push_back(row.d_perfect);
        diff.rows.push_back(row);
    }
    auto fill = [&](const std::vector<double>& v, double PairedDiff::Row::*mean_m,
                    double PairedDiff::Row::*std_m) {
        MetricStats s = stats_of(v, mode);
        diff.mean.*mean_m = s.mean;
        diff.stddev.*std_m = s.stddev;
    };
    fill(d_avg, &PairedDiff::Row::d_avg, &PairedDiff::Row::d_avg);
    fill(d_fail, &PairedDiff::Row::d_failure, &PairedDiff::Row::d_failure);
    fill(d_corr, &PairedDiff::Row::d_correctness, &PairedDiff::Row::d_correctness);
    fill(d_perf, &PairedDiff::Row::d_perfect, &PairedDiff::Row::d_perfect);
    return diff;
}

// ---------------------------------------------------------------------------
// Benchmark orchestration
// ---------------------------------------------------------------------------

namespace {

EvalRecord evaluate_one(const Engine& engine, Judge& judge, Paradigm paradigm,
                        const EvalQuery& query, int judge_retries) {
    EvalRecord rec;
    rec.system = std::string(paradigm_name(paradigm));
    rec.group_id = query.group_id;
    rec.query_id = query.query_id;

    std::string answer;
    try {
        PipelineResult pr = engine.run(paradigm, query.query);
        answer = pr.answer;
        rec.used_fallback = pr.used_fallback;
        rec.default_year_retry = pr.default_year_retry;
    } catch (const PipelineError& e) {
        // Unanswerable queries are scored as complete failures, not crashes.
        rec.score = 1;
        rec.error = e.what();
        return rec;
    }

    for (int attempt = 0;; ++attempt) {
        try {
            rec.score = judge.judge(query.query, answer, query.reference_answer).score;
            return rec;
        } catch (const ProviderError& e) {
            if (e.retryable && attempt < judge_retries)
                continue;
            rec.unevaluated = true;
            rec.score = 0;
            rec.error = std::string("judge: ") + e.what();
            return rec;
        }
    }
}

} // namespace

BenchmarkResult run_benchmark(const GroupedDataset& dataset, const Engine& engine, Judge& judge,
                              const BenchmarkOptions& opts) {
    if (dataset.queries.empty())
        throw UsageError("run_benchmark: empty grouped dataset");
    if (opts.paradigms.empty())
        throw UsageError("run_benchmark: no paradigms selected");
    for (std::size_t i = 0; i < opts.paradigms.size(); ++i)
        for (std::size_t j = i + 1; j < opts.paradigms.size(); ++j)
            if (opts.paradigms[i] == opts.paradigms[j])
                throw UsageError("run_benchmark: duplicate paradigm " +
                                 std::string(paradigm_name(opts.paradigms[i])));

    BenchmarkResult result;
    result.seed = opts.seed;
    result.dataset_hash = dataset.dataset_hash;
    result.n_groups = dataset.n_groups;
    result.group_size = dataset.group_size;
    result.std_mode = opts.std_mode;
    result.judge_name = opts.judge_name;

    for (Paradigm paradigm : opts.paradigms) {
        std::string system(paradigm_name(paradigm));
        result.systems.push_back(system);
        std::vector<EvalRecord> slots(dataset.queries.size());

        std::size_t workers = std::max<std::size_t>(1, opts.parallelism);
        workers = std::min(workers, dataset.queries.size());
        if (workers == 1) {
            for (std::size_t i = 0; i < dataset.queries.size(); ++i)
                slots[i] = evaluate_one(engine, judge, paradigm, dataset.queries[i],
                                        opts.judge_retries);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (;;) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= dataset.queries.size())
                            return;
                        slots[i] = evaluate_one(engine, judge, paradigm, dataset.queries[i],
                                                opts.judge_retries);
                    }
                });
            }
            for (auto& t : pool)
                t.join();
        }

        SystemStats& stats = result.stats[system];
        std::map<int, std::vector<int>> group_scores;
        for (auto& rec : slots) {
            ++stats.total;
            if (rec.used_fallback)
                ++stats.fallback_count;
            if (rec.default_year_retry)
                ++stats.year_retry_count;
            if (!rec.error.empty() && !rec.unevaluated)
                ++stats.error_count;
            if (rec.unevaluated)
                ++stats.unevaluated;
            else
                group_scores[rec.group_id].push_back(rec.score);
            result.records.push_back(std::move(rec));
        }
        for (const auto& [group_id, scores] : group_scores)
            result.group_reports[system].push_back(score_group(group_id, scores));
    }

    result.summary = aggregate_systems(result.group_reports, opts.std_mode);
    for (std::size_t i = 0; i < result.systems.size(); ++i)
        for (std::size_t j = i + 1; j < result.systems.size(); ++j)
            result.paired.push_back(paired_diff(result.systems[j],
                                                result.group_reports.at(result.systems[j]),
                                                result.systems[i],
                                                result.group_reports.at(result.systems[i]),
                                                opts.std_mode));
    return result;
}

// ---------------------------------------------------------------------------
// Bundle I/O
// ---------------------------------------------------------------------------

namespace {

ordered_json report_to_json(const std::string& system, const GroupReport& r) {
    ordered_json j;
    j["type"] = "group_report";
    j["system"] = system;
    j["group"] = r.group_id;
    j["count"] = r.count;
    j["avg_score"] = r.avg_score;
    j["failure_rate"] = r.failure_rate;
    j["correctness_rate"] = r.correctness_rate;
    j["perfect_rate"] = r.perfect_rate;
    j["band_low"] = r.band_low;
    j["band_mid"] = r.band_mid;
    j["band_high"] = r.band_high;
    return j;
}

} // namespace

void write_bundle(const BenchmarkResult& result, std::ostream& out) {
    ordered_json meta;
    meta["type"] = "meta";
    meta["format_version"] = 1;
    meta["seed"] = result.seed;
    meta["dataset_hash"] = result.dataset_hash;
    meta["n_groups"] = result.n_groups;
    meta["group_size"] = result.group_size;
    meta["systems"] = result.systems;
    meta["std_mode"] = result.std_mode == StdMode::sample ? "sample" : "population";
    meta["judge"] = result.judge_name;
    out << meta.dump() << '\n';

    for (const auto& rec : result.records) {
        ordered_json j;
        j["type"] = "record";
        j["system"] = rec.system;
        j["group"] = rec.group_id;
        j["query_id"] = rec.query_id;
        j["score"] = rec.score;
        if (!rec.error.empty())
            j["error"] = rec.error;
        j["used_fallback"] = rec.used_fallback;
        j["default_year_retry"] = rec.default_year_retry;
        j["unevaluated"] = rec.unevaluated;
        out << j.dump() << '\n';
    }
    for (const auto& system : result.systems)
        for (const auto& r : result.group_reports.at(system))
            out << report_to_json(system, r).dump() << '\n';
    for (const auto& s : result.summary) {
        ordered_json j;
        j["type"] = "summary";
        j["system"] = s.system;
        auto put = [&](const char* key, const MetricStats& m) {
            j[key] = {{"mean", m.mean}, {"std", m.stddev}};
        };
        put("avg_score", s.avg_score);
        put("failure_rate", s.failure_rate);
        put("correctness_rate", s.correctness_rate);
        put("perfect_rate", s.perfect_rate);
        put("band_low", s.band_low);
        put("band_mid", s.band_mid);
        put("band_high", s.band_high);
        out << j.dump() << '\n';
    }
    for (const auto& p : result.paired) {
        ordered_json j;
        j["type"] = "paired";
        j["a"] = p.a;
        j["b"] = p.b;
        auto row_json = [](const PairedDiff::Row& r) {
            return ordered_json{{"group", r.group_id},
                                {"d_avg", r.d_avg},
                                {"d_failure", r.d_failure},
                                {"d_correctness", r.d_correctness},
                                {"d_perfect", r.d_perfect}};
        };
        j["rows"] = ordered_json::array();
        for (const auto& r : p.rows)
            j["rows"].push_back(row_json(r));
        j["mean"] = row_json(p.mean);
        j["std"] = row_json(p.stddev);
        out << j.dump() << '\n';
    }
    for (const auto& [system, s] : result.stats) {
        ordered_json j;
        j["type"] = "stats";
        j["system"] = system;
        j["total"] = s.total;
        j["fallback_count"] = s.fallback_count;
        j["year_retry_count"] = s.year_retry_count;
        j["error_count"] = s.error_count;
        j["unevaluated"] = s.unevaluated;
        out << j.dump() << '\n';
    }
}

void write_bundle(const BenchmarkResult& result, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write report bundle: " + file.string());
    write_bundle(result, out);
}

Bundle read_bundle(std::istream& in) {
    Bundle bundle;
    std::string line;
    int lineno = 0;
    auto note_system = [&](const std::string& name) {
        if (std::find(bundle.systems.begin(), bundle.systems.end(), name) ==
            bundle.systems.end())
            bundle.systems.push_back(name);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw FormatError("bundle line " + std::to_string(lineno) + " is not valid JSON");
        std::string type = j.value("type", "group_report");
        if (type == "meta") {
            bundle.meta_line = line;
            if (j.contains("std_mode"))
                bundle.std_mode = std_mode_from_string(j["std_mode"].get<std::string>());
        } else if (type == "record") {
            EvalRecord rec;
            rec.system = j.at("system").get<std::string>();
            rec.group_id = j.at("group").get<int>();
            rec.query_id = j.value("query_id", "");
            rec.score = j.value("score", 0);
            rec.error = j.value("error", "");
            rec.used_fallback = j.value("used_fallback", false);
            rec.default_year_retry = j.value("default_year_retry", false);
            rec.unevaluated = j.value("unevaluated", false);
            note_system(rec.system);
            bundle.records.push_back(std::move(rec));
        } else if (type == "group_report") {
            GroupReport r;
            std::string system = j.at("system").get<std::string>();
            r.group_id = j.at("group").get<int>();
            r.count = j.value("count", std::size_t{0});
            r.avg_score = j.at("avg_score").get<double>();
            r.failure_rate = j.at("failure_rate").get<double>();
            r.correctness_rate = j.at("correctness_rate").get<double>();
            r.perfect_rate = j.at("perfect_rate").get<double>();
            r.band_low = j.value("band_low", 0.0);
            r.band_mid = j.value("band_mid", 0.0);
            r.band_high = j.value("band_high", r.correctness_rate);
            note_system(system);
            bundle.group_reports[system].push_back(r);
        } else if (type == "stats") {
            SystemStats s;
            std::string system = j.at("system").get<std::string>();
            s.total = j.value("total", std::size_t{0});
            s.fallback_count = j.value("fallback_count", std::size_t{0});
            s.year_retry_count = j.value("year_retry_count", std::size_t{0});
            s.error_count = j.value("error_count", std::size_t{0});
            s.unevaluated = j.value("unevaluated", std::size_t{0});
            bundle.stats[system] = s;
        }
        // summary and paired lines are recomputed at render time
    }
    if (bundle.group_reports.empty())
        throw FormatError("bundle contains no group_report lines");
    return bundle;
}

Bundle read_bundle(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("report bundle not found: " + file.string());
    return read_bundle(in);
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

namespace {

std::string fixed(double v, int decimals, bool sign = false) {
    std::ostringstream ss;
    if (sign)
        ss << std::showpos;
    ss << std::fixed << std::setprecision(decimals) << v;
    return ss.str();
}

std::string pad(const std::string& s, std::size_t width) {
    if (s.size() >= width)
        return s + "  ";
    return s + std::string(width - s.size(), ' ') + "  ";
}

std::string group_label(int group_id) {
    std::ostringstream ss;
    ss << std::setw(2) << std::setfill('0') << group_id;
    return ss.str();
}

} // namespace

std::string render_report(const Bundle& bundle) {
    std::ostringstream out;
    auto summaries = aggregate_systems(bundle.group_reports, bundle.std_mode);
    auto summary_of = [&](const std::string& name) -> const SystemSummary& {
        for (const auto& s : summaries)
            if (s.system == name)
                return s;
        throw Error("missing summary for system " + name);
    };

    out << "== Per-group results ==\n";
    out << pad("Group", 5) << pad("System", 6) << pad("Avg", 6) << pad("s=1%", 6)
        << pad("s>=8%", 6) << pad("s=10%", 6) << '\n';
    std::vector<int> group_ids;
    for (const auto& r : bundle.group_reports.at(bundle.systems.front()))
        group_ids.push_back(r.group_id);
    std::sort(group_ids.begin(), group_ids.end());
    for (int g : group_ids) {
        for (const auto& system : bundle.systems) {
            for (const auto& r : bundle.group_reports.at(system)) {
                if (r.group_id != g)
                    continue;
                out << pad(group_label(g), 5) << pad(system, 6) << pad(fixed(r.avg_score, 2), 6)
                    << pad(fixed(r.failure_rate, 1), 6) << pad(fixed(r.correctness_rate, 1), 6)
                    << pad(fixed(r.perfect_rate, 1), 6) << '\n';
            }
        }
    }
    for (const auto& system : bundle.systems) {
        const auto& s = summary_of(system);
        out << pad("Mean", 5) << pad(system, 6) << pad(fixed(s.avg_score.mean, 2), 6)
            << pad(fixed(s.failure_rate.mean, 1), 6) << pad(fixed(s.correctness_rate.mean, 1), 6)
            << pad(fixed(s.perfect_rate.mean, 1), 6) << '\n';
    }
    for (const auto& system : bundle.systems) {
        const auto& s = summary_of(system);
        out << pad("Std", 5) << pad(system, 6) << pad(fixed(s.avg_score.stddev, 2), 6)
            << pad(fixed(s.failure_rate.stddev, 1), 6)
            << pad(fixed(s.correctness_rate.stddev, 1), 6)
            << pad(fixed(s.perfect_rate.stddev, 1), 6) << '\n';
    }

    out << "\n== Score bands (mean % across groups) ==\n";
    out << pad("System", 6) << pad("Low(s<=3)", 10) << pad("Mid(4-7)", 10) << pad("High(s>=8)", 10)
        << '\n';
    for (const auto& system : bundle.systems) {
        const auto& s = summary_of(system);
        out << pad(system, 6) << pad(fixed(s.band_low.mean, 1), 10)
            << pad(fixed(s.band_mid.mean, 1), 10) << pad(fixed(s.band_high.mean, 1), 10) << '\n';
    }

    for (std::size_t i = 0; i < bundle.systems.size(); ++i) {
        for (std::size_t j = i + 1; j < bundle.systems.size(); ++j) {
            const std::string& a = bundle.systems[j];
            const std::string& b = bundle.systems[i];
            auto diff = paired_diff(a, bundle.group_reports.at(a), b, bundle.group_reports.at(b),
                                    bundle.std_mode);
            out << "\n== Paired diff (" << a << " - " << b << ") ==\n";
            out << pad("Group", 5) << pad("dAvg", 7) << pad("ds=1", 7) << pad("ds>=8", 7)
                << pad("ds=10", 7) << '\n';
            for (const auto& row : diff.rows)
                out << pad(group_label(row.group_id), 5) << pad(fixed(row.d_avg, 2, true), 7)
                    << pad(fixed(row.d_failure, 1, true), 7)
                    << pad(fixed(row.d_correctness, 1, true), 7)
                    << pad(fixed(row.d_perfect, 1, true), 7) << '\n';
            out << pad("Mean", 5) << pad(fixed(diff.mean.d_avg, 2, true), 7)
                << pad(fixed(diff.mean.d_failure, 1, true), 7)
                << pad(fixed(diff.mean.d_correctness, 1, true), 7)
                << pad(fixed(diff.mean.d_perfect, 1, true), 7) << '\n';
            out << pad("Std", 5) << pad(fixed(diff.stddev.d_avg, 2), 7)
                << pad(fixed(diff.stddev.d_failure, 1), 7)
                << pad(fixed(diff.stddev.d_correctness, 1), 7)
                << pad(fixed(diff.stddev.d_perfect, 1), 7) << '\n';
        }
    }

    if (!bundle.stats.empty()) {
        out << "\n== Run stats ==\n";
        for (const auto& [system, s] : bundle.stats) {
            out << system << ": " << s.total << " queries";
            if (s.fallback_count > 0 || system == "hdrr")
                out << ", fallback " << s.fallback_count;
            if (s.year_retry_count > 0)
                out << ", year-retry " << s.year_retry_count;
            if (s.error_count > 0)
                out << ", pipeline-errors " << s.error_count;
            if (s.unevaluated > 0)
                out << ", UNEVALUATED " << s.unevaluated;
            out << '\n';
        }
    }
    return out.str();
}

} // namespace docroute
