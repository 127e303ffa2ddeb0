// Command-line harness for the multiaccess-relay symmetric-rate experiments:
// Monte Carlo SNR sweeps over the relaying strategies and the coordinate
// descent vs exhaustive-search comparison. Configuration comes from flags or
// a flat "key = value" file (# comments); flags override file keys.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "marc/sweep.hpp"

namespace {

void add_common_options(CLI::App* cmd, marc::SweepConfig& config, std::string& strategies) {
    cmd->set_config("--config", "", "configuration file (key = value, # comments)");
    cmd->add_option("--snr-min", config.snr_min_db, "SNR grid start [dB]");
    cmd->add_option("--snr-max", config.snr_max_db, "SNR grid end [dB]");
    cmd->add_option("--snr-step", config.snr_step_db, "SNR grid step [dB]");
    cmd->add_option("--trials", config.trials, "independent channel draws per SNR point");
    cmd->add_option("--seed", config.seed, "base RNG seed");
    cmd->add_option("--strategies", strategies,
                    "comma list from AF,DF,CF,CoF,CoD,CoF-exhaustive");
    cmd->add_option_function<std::string>(
        "--channel-mode",
        [&config](const std::string& v) {
            if (v == "per-point") config.channel_mode = marc::ChannelMode::per_point;
            else if (v == "held-fixed") config.channel_mode = marc::ChannelMode::held_fixed;
            else throw CLI::ValidationError("--channel-mode", "must be per-point or held-fixed");
        },
        "per-point (redraw per SNR point) or held-fixed (one draw per trial)");
    cmd->add_option("--multistarts", config.multistarts, "descent restarts per instance");
    cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
    cmd->add_option("--var-ar", config.variances.ar, "gain variance a->r [dBW]");
    cmd->add_option("--var-br", config.variances.br, "gain variance b->r [dBW]");
    cmd->add_option("--var-ad", config.variances.ad, "gain variance a->d [dBW]");
    cmd->add_option("--var-bd", config.variances.bd, "gain variance b->d [dBW]");
    cmd->add_option("--var-rd", config.variances.rd, "gain variance r->d [dBW]");
    cmd->add_option("--pa", config.pa_dbw, "power cap P_a [dBW]");
    cmd->add_option("--pb", config.pb_dbw, "power cap P_b [dBW]");
    cmd->add_option("--pr", config.pr_dbw, "power cap P_r [dBW]");
    cmd->add_option("--p", config.p_dbw, "reference power P [dBW]");
}

std::vector<marc::Strategy> parse_strategies(const std::string& csv) {
    std::vector<marc::Strategy> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(marc::strategy_from_name(item));
    }
    if (out.empty()) throw marc::ConfigError("strategies: empty list");
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw marc::ConfigError("cannot open output file " + path);
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiaccess relay channel symmetric-rate experiments"};
    app.require_subcommand(1);

    marc::SweepConfig config;
    std::string strategies;
    std::string out_path, json_path, trace_dir;

    CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo SNR sweep, CSV/JSON emission");
    add_common_options(sweep, config, strategies);
    sweep->add_option("--out", out_path, "CSV output path (default stdout)");
    sweep->add_option("--json", json_path, "full machine-readable results");
    sweep->add_option("--trace", trace_dir, "directory for SCA trace CSVs");

    CLI::App* cmp = app.add_subcommand(
        "compare-exhaustive", "coordinate descent vs exhaustive integer search");
    add_common_options(cmp, config, strategies);
    std::string cmp_out;
    cmp->add_option("--out", cmp_out, "CSV output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!strategies.empty()) config.strategies = parse_strategies(strategies);
        if (!trace_dir.empty()) config.trace_dir = trace_dir;

        if (sweep->parsed()) {
            marc::validate(config);
            marc::SweepResult result = marc::run_sweep(config);
            write_file(out_path, marc::rows_to_csv(result.rows));
            if (!json_path.empty()) {
                std::ofstream js(json_path, std::ios::binary);
                if (!js) throw marc::ConfigError("cannot open json file " + json_path);
                marc::write_results_json(config, result, js);
            }
            if (result.optimizer_runs > 0 &&
                result.nonconverged_runs * 10 >= result.optimizer_runs) {
                std::cerr << "warning: " << result.nonconverged_runs << "/"
                          << result.optimizer_runs << " optimizer runs did not converge\n";
                return 3;
            }
            return 0;
        }

        bool has_cof = false;
        for (marc::Strategy s : config.strategies)
            if (s == marc::Strategy::CoF) has_cof = true;
        if (!has_cof) throw marc::ConfigError("compare-exhaustive requires CoF in strategies");
        marc::validate(config);
        auto rows = marc::compare_exhaustive(config);
        write_file(cmp_out, marc::comparison_to_csv(rows));
        return 0;
    } catch (const marc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
