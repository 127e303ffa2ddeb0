#include "marc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "marc/baselines.hpp"
#include "marc/cod.hpp"
#include "marc/cof.hpp"
#include "marc/rng.hpp"

namespace marc {

void validate(const SweepConfig& config) {
    if (config.snr_min_db > config.snr_max_db)
        throw ConfigError("snr-min must be <= snr-max");
    if (!(config.snr_step_db > 0)) throw ConfigError("snr-step must be > 0");
    if (config.trials < 1) throw ConfigError("trials must be >= 1");
    if (config.multistarts < 1) throw ConfigError("multistarts must be >= 1");
    if (config.strategies.empty()) throw ConfigError("strategies must be nonempty");
    if (config.threads < 0) throw ConfigError("threads must be >= 0");
}

std::vector<double> snr_grid(const SweepConfig& config) {
    std::vector<double> grid;
    for (double s = config.snr_min_db; s <= config.snr_max_db + 1e-9; s += config.snr_step_db)
        grid.push_back(s);
    return grid;
}

PowerBudget budget_at(const SweepConfig& config, double snr_db) {
    PowerBudget b;
    b.p = db_to_linear(config.p_dbw);
    b.pa = db_to_linear(config.pa_dbw);
    b.pb = db_to_linear(config.pb_dbw);
    b.pr = db_to_linear(config.pr_dbw);
    b.n = b.p / db_to_linear(snr_db);
    return b;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    return mix_seed(seed + std::uint64_t(trial));
}

std::uint64_t point_seed(std::uint64_t tseed, int point_index) {
    return mix_seed(tseed + 0x9E3779B97F4A7C15ull * std::uint64_t(point_index + 1));
}

namespace {

struct WorkItem {
    int trial;
    int point;
    double snr_db;
};

struct TraceCapture {
    std::vector<ScaTraceRow> rows;
};

TrialRecord baseline_record(Strategy s, const ChannelGains& ch, const PowerBudget& budget) {
    BaselineResult r = optimize_baseline(s, ch, budget);
    TrialRecord rec;
    rec.strategy = s;
    rec.rate_bits = r.rate_bits;
    rec.beta = r.beta;
    rec.distortion = r.distortion;
    return rec;
}

TrialRecord descent_record(Strategy s, const ChannelGains& ch, const PowerBudget& budget,
                           int multistarts, const TraceSink& sink) {
    DescentOptions opts;
    opts.sink = sink;
    opts.selector = s == Strategy::CoFExhaustive ? IntegerSelector::exhaustive
                                                 : IntegerSelector::linearized;
    DescentResult r = s == Strategy::CoD ? best_cod(ch, budget, multistarts, opts)
                                         : best_cof(ch, budget, multistarts, opts);
    TrialRecord rec;
    rec.strategy = s;
    rec.rate_bits = r.rate_bits;
    rec.beta = r.beta;
    rec.k = r.k;
    rec.t = r.t;
    rec.converged = r.converged;
    return rec;
}

void write_trace_file(const std::string& dir, int trial, double snr_db, Strategy s,
                      const std::vector<ScaTraceRow>& rows) {
    if (rows.empty()) return;
    char name[160];
    std::snprintf(name, sizeof(name), "trace_t%03d_snr%g_%s.csv", trial, snr_db,
                  strategy_name(s));
    std::ofstream os(std::filesystem::path(dir) / name);
    os << "iteration,objective,step_norm\n";
    char line[128];
    for (const ScaTraceRow& r : rows) {
        std::snprintf(line, sizeof(line), "%d,%.12g,%.12g\n", r.iteration, r.objective,
                      r.step_norm);
        os << line;
    }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    validate(config);
    std::vector<double> grid = snr_grid(config);

    std::vector<WorkItem> items;
    for (int trial = 0; trial < config.trials; ++trial)
        for (int p = 0; p < int(grid.size()); ++p) items.push_back({trial, p, grid[p]});

    struct ItemOut {
        std::vector<TrialRecord> records;
        std::vector<std::pair<Strategy, std::vector<ScaTraceRow>>> traces;
    };
    std::vector<ItemOut> outputs(items.size());

    bool want_traces = !config.trace_dir.empty();

    auto process = [&](const WorkItem& item, ItemOut& out) {
        std::uint64_t tseed = trial_seed(config.seed, item.trial);
        std::uint64_t cseed = config.channel_mode == ChannelMode::held_fixed
                                  ? tseed
                                  : point_seed(tseed, item.point);
        ChannelGains ch = draw_channel(config.variances, cseed);
        PowerBudget budget = budget_at(config, item.snr_db);

        for (Strategy s : config.strategies) {
            TraceCapture cap;
            TraceSink sink;
            if (want_traces && (s == Strategy::CoF || s == Strategy::CoD ||
                                s == Strategy::CoFExhaustive))
                sink = [&cap](const ScaTraceRow& r) { cap.rows.push_back(r); };

            TrialRecord rec;
            switch (s) {
                case Strategy::AF:
                case Strategy::DF:
                case Strategy::CF:
                    rec = baseline_record(s, ch, budget);
                    break;
                default:
                    rec = descent_record(s, ch, budget, config.multistarts, sink);
                    break;
            }
            rec.trial = item.trial;
            rec.snr_db = item.snr_db;
            out.records.push_back(rec);
            if (sink) out.traces.emplace_back(s, std::move(cap.rows));
        }

        // Remark-3 guard: computing both equations locally can at best match
        // plain compress-and-forward. Give the CF search the CoD operating
        // point before asserting.
        TrialRecord* cf = nullptr;
        TrialRecord* cod = nullptr;
        for (TrialRecord& r : out.records) {
            if (r.strategy == Strategy::CF) cf = &r;
            if (r.strategy == Strategy::CoD) cod = &r;
        }
        if (cf && cod) {
            if (cod->rate_bits > cf->rate_bits + 1e-6 && ch.rd != 0.0) {
                CfRate probe = cf_rate(ch, budget, {cod->beta.a, cod->beta.b});
                if (probe.rate_bits > cf->rate_bits) {
                    cf->rate_bits = probe.rate_bits;
                    cf->beta = {cod->beta.a, cod->beta.b, budget.cap_r()};
                    cf->distortion = probe.distortion;
                }
            }
            if (cod->rate_bits > cf->rate_bits + 1e-6)
                throw std::logic_error("CoD rate exceeded CF rate beyond tolerance");
        }
    };

    int nthreads = config.threads > 0 ? config.threads
                                      : int(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = std::min<int>(nthreads, int(items.size()));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= items.size()) break;
                    process(items[i], outputs[i]);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(items.size());
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    SweepResult result;
    for (size_t i = 0; i < items.size(); ++i) {
        for (const TrialRecord& r : outputs[i].records) {
            result.records.push_back(r);
            if (r.strategy == Strategy::CoF || r.strategy == Strategy::CoD ||
                r.strategy == Strategy::CoFExhaustive) {
                result.optimizer_runs++;
                if (!r.converged) result.nonconverged_runs++;
            }
        }
        if (want_traces) {
            for (const auto& [s, rows] : outputs[i].traces)
                write_trace_file(config.trace_dir, items[i].trial, items[i].snr_db, s, rows);
        }
    }

    // aggregate per (snr, strategy)
    for (double snr : grid) {
        for (Strategy s : config.strategies) {
            double sum = 0, sum2 = 0;
            int n = 0;
            for (const TrialRecord& r : result.records) {
                if (r.snr_db == snr && r.strategy == s) {
                    sum += r.rate_bits;
                    sum2 += r.rate_bits * r.rate_bits;
                    ++n;
                }
            }
            double mean = sum / n;
            double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
            result.rows.push_back({snr, s, mean, std::sqrt(var / n), n});
        }
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        return std::string(strategy_name(a.strategy)) < strategy_name(b.strategy);
    });
    std::sort(result.records.begin(), result.records.end(),
              [](const TrialRecord& a, const TrialRecord& b) {
                  if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                  std::string sa = strategy_name(a.strategy), sb = strategy_name(b.strategy);
                  if (sa != sb) return sa < sb;
                  return a.trial < b.trial;
              });
    return result;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "snr_db,strategy,mean_rate_bits,stderr,trials\n";
    char line[160];
    for (const SweepRow& r : rows) {
        std::snprintf(line, sizeof(line), "%.10g,%s,%.10g,%.10g,%d\n", r.snr_db,
                      strategy_name(r.strategy), r.mean_rate, r.stderr_, r.trials);
        out += line;
    }
    return out;
}

void write_results_json(const SweepConfig& config, const SweepResult& result, std::ostream& os) {
    nlohmann::json j;
    j["environment"] = {{"version", library_version()}, {"seed", config.seed}};
    nlohmann::json strategies = nlohmann::json::array();
    for (Strategy s : config.strategies) strategies.push_back(strategy_name(s));
    j["config"] = {
        {"variances_dbw",
         {{"ar", config.variances.ar},
          {"br", config.variances.br},
          {"ad", config.variances.ad},
          {"bd", config.variances.bd},
          {"rd", config.variances.rd}}},
        {"pa_dbw", config.pa_dbw},
        {"pb_dbw", config.pb_dbw},
        {"pr_dbw", config.pr_dbw},
        {"p_dbw", config.p_dbw},
        {"snr_min_db", config.snr_min_db},
        {"snr_max_db", config.snr_max_db},
        {"snr_step_db", config.snr_step_db},
        {"trials", config.trials},
        {"seed", config.seed},
        {"strategies", strategies},
        {"channel_mode",
         config.channel_mode == ChannelMode::per_point ? "per-point" : "held-fixed"},
        {"multistarts", config.multistarts},
    };
    j["nonconverged_runs"] = result.nonconverged_runs;
    j["optimizer_runs"] = result.optimizer_runs;

    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& r : result.rows) {
        rows.push_back({{"snr_db", r.snr_db},
                        {"strategy", strategy_name(r.strategy)},
                        {"mean_rate_bits", r.mean_rate},
                        {"stderr", r.stderr_},
                        {"trials", r.trials}});
    }
    j["rows"] = rows;

    nlohmann::json records = nlohmann::json::array();
    for (const TrialRecord& r : result.records) {
        nlohmann::json rec = {{"trial", r.trial},
                              {"snr_db", r.snr_db},
                              {"strategy", strategy_name(r.strategy)},
                              {"rate_bits", r.rate_bits},
                              {"beta", {r.beta.a, r.beta.b, r.beta.r}},
                              {"k", {r.k[0], r.k[1]}},
                              {"t", {r.t[0], r.t[1]}},
                              {"converged", r.converged}};
        if (r.distortion) rec["distortion"] = *r.distortion;
        records.push_back(std::move(rec));
    }
    j["records"] = records;
    os << j.dump(2) << "\n";
}

std::vector<ComparisonRow> compare_exhaustive(const SweepConfig& config) {
    validate(config);
    std::vector<double> grid = snr_grid(config);
    std::vector<ComparisonRow> rows(config.trials * grid.size());

    auto work = [&](int idx) {
        int trial = idx / int(grid.size());
        int point = idx % int(grid.size());
        double snr_db = grid[point];
        std::uint64_t tseed = trial_seed(config.seed, trial);
        std::uint64_t cseed = config.channel_mode == ChannelMode::held_fixed
                                  ? tseed
                                  : point_seed(tseed, point);
        ChannelGains ch = draw_channel(config.variances, cseed);
        PowerBudget budget = budget_at(config, snr_db);
        BetaVector beta0{0.9 * budget.cap_a(), 0.9 * budget.cap_b(), 0.9 * budget.cap_r()};

        using Clock = std::chrono::steady_clock;
        DescentOptions opt_a;
        auto t0 = Clock::now();
        DescentResult a = cof_descent(ch, budget, beta0, opt_a);
        auto t1 = Clock::now();
        DescentOptions opt_ex;
        opt_ex.selector = IntegerSelector::exhaustive;
        DescentResult ex = cof_descent(ch, budget, beta0, opt_ex);
        auto t2 = Clock::now();

        ComparisonRow row;
        row.trial = trial;
        row.snr_db = snr_db;
        row.rate_descent = a.rate_bits;
        row.rate_exhaustive = ex.rate_bits;
        row.seconds_descent = std::chrono::duration<double>(t1 - t0).count();
        row.seconds_exhaustive = std::chrono::duration<double>(t2 - t1).count();
        row.iterations_to_match = -1;
        for (const DescentTraceRow& tr : a.trace) {
            if (std::abs(tr.rate_bits - ex.rate_bits) <= 1e-3) {
                row.iterations_to_match = tr.iteration;
                break;
            }
        }
        rows[idx] = row;
    };

    int total = int(rows.size());
    int nthreads = config.threads > 0 ? config.threads
                                      : int(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = std::min(nthreads, total);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    int i = next.fetch_add(1);
                    if (i >= total) break;
                    work(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(total);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out =
        "trial,snr_db,iterations_to_match,rate_descent,rate_exhaustive,seconds_descent,"
        "seconds_exhaustive\n";
    char line[240];
    for (const ComparisonRow& r : rows) {
        std::snprintf(line, sizeof(line), "%d,%.10g,%d,%.10g,%.10g,%.6g,%.6g\n", r.trial,
                      r.snr_db, r.iterations_to_match, r.rate_descent, r.rate_exhaustive,
                      r.seconds_descent, r.seconds_exhaustive);
        out += line;
    }
    return out;
}

}  // namespace marc
