#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "selpat/error.hpp"
#include "selpat/experiments.hpp"
#include "selpat/report_io.hpp"
#include "selpat/stats.hpp"

namespace {

using namespace selpat;

struct DatabaseArgs {
    std::string path;
    std::string format = "item-lines";
    std::string sigma = "sample";
    bool no_center = false;
    std::size_t max_size = 3;
};

void add_database_options(CLI::App& cmd, DatabaseArgs& args) {
    cmd.add_option("database", args.path, "Transaction database file")->required();
    cmd.add_option("--format", args.format, "item-lines or binary-csv")->capture_default_str();
    cmd.add_option("--sigma", args.sigma, "Noise sd, or 'sample' for the sample sd")->capture_default_str();
    cmd.add_flag("--no-center", args.no_center, "Keep responses uncentered");
    cmd.add_option("--r,--max-pattern-size", args.max_size, "Maximum pattern size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

TransactionDatabase load(const DatabaseArgs& args) {
    LoadOptions opts;
    opts.format = parse_file_format(args.format);
    opts.db.center = !args.no_center;
    if (args.sigma != "sample") {
        std::size_t used = 0;
        double s = 0.0;
        try {
            s = std::stod(args.sigma, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != args.sigma.size()) throw ValidationError("--sigma expects a number or 'sample'");
        opts.db.sigma = s;
    }
    return load_database(args.path, opts);
}

// Writes to the named file, or stdout for "-".
template <typename F>
void emit(const std::string& path, F&& write) {
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    write(out);
}

int run_toy() {
    // Two transactions {0} and {1} with responses -1.5 and 1.8, uncentered, sigma = 1.
    TransactionDatabase::Options opts;
    opts.center = false;
    opts.sigma = 1.0;
    const TransactionDatabase db({{0}, {1}}, {-1.5, 1.8}, opts);
    const DiscoveryResult discovery = mine(db, 2, 1, Mode::Positive);
    const EventSpec spec(discovery, 2);
    const InferenceReport rep = report(db, discovery, spec, 0.05);
    const auto& rec = rep.records.front();
    std::cout << std::setprecision(6) << "selected pattern: " << rec.pattern.to_string() << " score "
              << rec.score << '\n'
              << "naive p:          " << rec.naive_p << '\n'
              << "selective p:      " << *rec.selective_p << '\n'
              << "truncation:       [" << rec.interval->lower << ", " << rec.interval->upper << "]\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective inference for top-k predictive itemset mining"};
    app.require_subcommand(1);

    // mine
    DatabaseArgs mine_db;
    std::string mine_mode = "signed";
    std::size_t mine_k = 5;
    auto* mine_cmd = app.add_subcommand("mine", "Discover the top-k patterns and print them as JSON");
    add_database_options(*mine_cmd, mine_db);
    mine_cmd->add_option("--mode", mine_mode, "positive, signed or sequential")->capture_default_str();
    mine_cmd->add_option("--k", mine_k, "Number of patterns")->capture_default_str()->check(CLI::PositiveNumber);

    // infer
    DatabaseArgs infer_db;
    std::string infer_mode = "signed";
    std::string baseline = "select";
    std::string csv_path;
    InferenceOptions infer_opts;
    bool no_pruning = false;
    auto* infer_cmd = app.add_subcommand("infer", "Discover patterns and report p-values as JSON");
    add_database_options(*infer_cmd, infer_db);
    infer_cmd->add_option("--mode", infer_mode, "positive, signed or sequential")->capture_default_str();
    infer_cmd->add_option("--k", infer_opts.k, "Number of patterns")->capture_default_str()->check(CLI::PositiveNumber);
    infer_cmd->add_option("--alpha", infer_opts.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    infer_cmd->add_option("--baseline", baseline, "naive, split or select")->capture_default_str();
    infer_cmd->add_option("--seed", infer_opts.seed, "Seed of the split baseline")->capture_default_str();
    infer_cmd->add_option("--csv", csv_path, "Also write a CSV table to this file ('-' for stdout)");
    infer_cmd->add_flag("--no-pruning", no_pruning, "Disable subtree pruning in the truncation search");

    // experiment
    SyntheticConfig cfg;
    std::string experiment_kind;
    std::string scenario = "individual";
    bool full = false;
    bool single = false;
    std::string exp_csv = "-";
    std::string exp_json;
    auto* exp_cmd = app.add_subcommand("experiment", "Synthetic Monte-Carlo experiments");
    exp_cmd->add_option("kind", experiment_kind, "fpr, tpr or timing")
        ->required()
        ->check(CLI::IsMember({"fpr", "tpr", "timing"}));
    exp_cmd->add_option("--scenario", scenario, "individual or sequential")->capture_default_str();
    exp_cmd->add_option("--n", cfg.n, "Transactions")->capture_default_str();
    exp_cmd->add_option("--d", cfg.d, "Items")->capture_default_str();
    exp_cmd->add_option("--k", cfg.k, "Patterns per trial")->capture_default_str();
    exp_cmd->add_option("--r", cfg.r, "Maximum pattern size")->capture_default_str();
    exp_cmd->add_option("--zeta", cfg.zeta, "Probability that an item is absent")->capture_default_str();
    exp_cmd->add_option("--sigma", cfg.sigma, "Noise sd")->capture_default_str();
    exp_cmd->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
    exp_cmd->add_option("--trials", cfg.trials, "Trials per configuration")->capture_default_str();
    exp_cmd->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
    exp_cmd->add_option("--timeout-secs", cfg.timeout_secs, "Per-trial budget of unpruned timing runs")
        ->capture_default_str();
    exp_cmd->add_option("--threads", cfg.threads, "Worker threads (0: hardware count)")->capture_default_str();
    exp_cmd->add_flag("--full", full, "Use the full-scale parameter grids");
    exp_cmd->add_flag("--single", single, "Run only the given configuration instead of a grid");
    exp_cmd->add_option("--csv", exp_csv, "CSV output file ('-' for stdout)")->capture_default_str();
    exp_cmd->add_option("--json", exp_json, "JSON summary file ('-' for stdout)");

    auto* toy_cmd = app.add_subcommand("toy", "Print the two-transaction toy example");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mine_cmd) {
            const auto db = load(mine_db);
            const auto discovery = mine(db, mine_db.max_size, mine_k, parse_mode(mine_mode));
            std::cout << to_json(discovery).dump(2) << '\n';
        } else if (*infer_cmd) {
            const auto db = load(infer_db);
            infer_opts.mode = parse_mode(infer_mode);
            infer_opts.method = parse_method(baseline);
            infer_opts.max_size = infer_db.max_size;
            infer_opts.pruning = !no_pruning;
            const auto rep = infer(db, infer_opts);
            std::cout << to_json(rep).dump(2) << '\n';
            if (!csv_path.empty()) emit(csv_path, [&](std::ostream& out) { write_csv(rep, out); });
        } else if (*exp_cmd) {
            cfg.scenario = parse_scenario(scenario);
            cfg.truth = experiment_kind == "fpr" ? Truth::Null : Truth::Signal;
            cfg.validate();
            nlohmann::json summary = nlohmann::json::array();
            if (experiment_kind == "timing") {
                const auto grid = single ? std::vector<SyntheticConfig>{cfg} : timing_grid(cfg, full);
                std::vector<TimingSummary> results;
                for (const auto& c : grid) {
                    results.push_back(run_timing(c));
                    summary.push_back(to_json(results.back()));
                }
                emit(exp_csv, [&](std::ostream& out) { write_timing_csv(results, out); });
            } else {
                const auto grid = single ? std::vector<SyntheticConfig>{cfg} : fpr_tpr_grid(cfg, full);
                if (experiment_kind == "fpr") {
                    std::vector<FprSummary> results;
                    for (const auto& c : grid) {
                        results.push_back(run_fpr(c));
                        summary.push_back(to_json(results.back()));
                    }
                    emit(exp_csv, [&](std::ostream& out) { write_fpr_csv(results, out); });
                } else {
                    std::vector<TprSummary> results;
                    for (const auto& c : grid) {
                        results.push_back(run_tpr(c));
                        summary.push_back(to_json(results.back()));
                    }
                    emit(exp_csv, [&](std::ostream& out) { write_tpr_csv(results, out); });
                }
            }
            if (!exp_json.empty()) emit(exp_json, [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
        } else if (*toy_cmd) {
            return run_toy();
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
