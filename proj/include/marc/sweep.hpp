#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "marc/descent.hpp"

namespace marc {

// Monte Carlo SNR sweeps over the five strategies plus the exhaustive
// reference pipeline, averaged over independent channel draws.

enum class ChannelMode { per_point, held_fixed };

struct SweepConfig {
    ChannelVariances variances{20, 20, 20, 20, 20};       // dBW
    double pa_dbw = 20, pb_dbw = 20, pr_dbw = 20, p_dbw = 20;
    double snr_min_db = 0, snr_max_db = 30, snr_step_db = 5;
    int trials = 200;
    std::uint64_t seed = 1;
    std::vector<Strategy> strategies{Strategy::AF, Strategy::DF, Strategy::CF, Strategy::CoF,
                                     Strategy::CoD};
    ChannelMode channel_mode = ChannelMode::per_point;
    int multistarts = 5;
    int threads = 0;  // 0 = hardware concurrency
    std::string trace_dir;  // when nonempty, SCA traces are written here
};

void validate(const SweepConfig& config);  // throws ConfigError

std::vector<double> snr_grid(const SweepConfig& config);

// Budget at one grid point: caps and P from the config, N = P / snr.
PowerBudget budget_at(const SweepConfig& config, double snr_db);

// Per-trial and per-point seeds, derived so each trial is reproducible alone.
std::uint64_t trial_seed(std::uint64_t seed, int trial);
std::uint64_t point_seed(std::uint64_t tseed, int point_index);

struct SweepRow {
    double snr_db;
    Strategy strategy;
    double mean_rate;
    double stderr_;
    int trials;
};

struct TrialRecord {
    int trial;
    double snr_db;
    Strategy strategy;
    double rate_bits;
    BetaVector beta;
    IntPair k{0, 0}, t{0, 0};
    bool converged = true;
    std::optional<double> distortion;
};

struct SweepResult {
    std::vector<SweepRow> rows;          // sorted by (snr_db, strategy name)
    std::vector<TrialRecord> records;
    int optimizer_runs = 0;
    int nonconverged_runs = 0;
};

SweepResult run_sweep(const SweepConfig& config);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
void write_results_json(const SweepConfig& config, const SweepResult& result, std::ostream& os);

// Algorithm-vs-exhaustive comparison: iterations until the coordinate descent
// matches the exhaustive-integer pipeline within 1e-3 bits, plus timings.
struct ComparisonRow {
    int trial;
    double snr_db;
    int iterations_to_match;  // -1 when never matched
    double rate_descent;
    double rate_exhaustive;
    double seconds_descent;
    double seconds_exhaustive;
};

std::vector<ComparisonRow> compare_exhaustive(const SweepConfig& config);
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

inline const char* library_version() { return "0.1.0"; }

}  // namespace marc
