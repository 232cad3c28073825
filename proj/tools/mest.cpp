// mest: robust linear-regression M-estimation CLI.
//
// Subcommands: fit, check-design, check-conditions, bound, dn-trace,
// simulate, contrast.  Exit codes: 0 ok, 1 input error, 2 not converged,
// 3 condition failure.

#include <mest/concentration.hpp>
#include <mest/harness.hpp>
#include <mest/io.hpp>
#include <mest/rng.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using mest::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitCondition = 3;

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0: take MEST_THREADS or 1
};

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("MEST_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

// csv format: a two-line key/value table; nested values are serialized
// compactly into their cell.
std::string to_csv(const json& payload) {
    std::string header, row;
    for (auto it = payload.begin(); it != payload.end(); ++it) {
        if (!header.empty()) {
            header += ',';
            row += ',';
        }
        header += it.key();
        const json& v = it.value();
        if (v.is_string())
            row += v.get<std::string>();
        else if (v.is_structured())
            row += '"' + v.dump() + '"';
        else
            row += v.dump();
    }
    return header + "\n" + row + "\n";
}

void emit(const GlobalOpts& opts, const json& payload) {
    const std::string text =
        opts.format == "csv" ? to_csv(payload) : payload.dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::cout << text;
    } else {
        mest::io::write_file_atomic(opts.out_path, text);
    }
}

// Loss spec given inline as JSON or as @path to a JSON file.
json loss_spec_from_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '@') return mest::io::load_json_file(arg.substr(1));
    return json::parse(arg);
}

int cmd_fit(const GlobalOpts& opts, const std::string& data_path, const std::string& loss_arg,
            bool intercept) {
    const mest::Matrix raw = mest::io::load_csv_matrix(data_path);
    if (raw.cols() < 2 && !intercept)
        throw mest::IoError(data_path + ": need at least 2 columns (features..., y)");

    const mest::Index n = raw.rows();
    const mest::Index p_raw = raw.cols() - 1;
    mest::Matrix design(n, p_raw + (intercept ? 1 : 0));
    if (intercept) design.col(0).setOnes();
    if (p_raw > 0) design.rightCols(p_raw) = raw.leftCols(p_raw);
    const mest::Vector y = raw.col(raw.cols() - 1);

    const mest::ConvexLoss loss = mest::io::parse_loss(loss_spec_from_arg(loss_arg));
    const mest::DesignSummary summary = mest::summarize(design);
    const mest::FitResult fit = mest::fit(design, y, loss);

    emit(opts, mest::io::fit_result_to_json(fit, summary));
    return fit.converged ? kExitOk : kExitNotConverged;
}

int cmd_check_conditions(const GlobalOpts& opts) {
    const json config = mest::io::load_json_file(opts.config_path);
    const mest::ConvexLoss loss = mest::io::parse_loss(config.at("loss"));
    const mest::ErrorDistribution dist = mest::io::parse_distribution(config.at("dist"));
    const double delta = config.value("delta", 0.5);
    try {
        const mest::ConditionReport report = mest::check_identification(dist, loss, delta);
        emit(opts, mest::io::condition_report_to_json(report));
        return report.passed ? kExitOk : kExitCondition;
    } catch (const mest::NonIntegrable& e) {
        emit(opts, json{{"passed", false}, {"error", "NonIntegrable"}, {"message", e.what()}});
        std::cerr << "mest: " << e.what() << "\n";
        return kExitCondition;
    }
}

int cmd_check_design(const GlobalOpts& opts) {
    const json config = mest::io::load_json_file(opts.config_path);
    const std::uint64_t seed = opts.seed.value_or(config.value("seed", 0ULL));
    if (config.contains("n_grid")) {
        const mest::DesignGenSpec spec = mest::io::parse_design(config.at("design"));
        std::vector<mest::Matrix> designs;
        for (mest::Index n : config.at("n_grid").get<std::vector<mest::Index>>())
            designs.push_back(mest::generate_design(spec, n, seed));
        const mest::DecayReport report = mest::leverage_decay_fit(designs);
        emit(opts, mest::io::decay_report_to_json(report));
        return report.verdict != mest::DecayVerdict::fails ? kExitOk : kExitCondition;
    }
    // Single design from CSV: summary diagnostics plus the eigen-growth check.
    const std::string data = config.at("data").get<std::string>();
    const mest::Matrix design = mest::io::load_csv_matrix(data);
    const mest::DesignSummary summary = mest::summarize(design);
    const mest::EigenGrowth growth = mest::eigen_growth_check(summary, design.rows());
    emit(opts, json{{"n", summary.n},
                    {"p", summary.p},
                    {"d_n", summary.leverage},
                    {"n0", summary.n0},
                    {"max_eig", summary.max_eig},
                    {"min_eig_sqrt", summary.min_eig_sqrt},
                    {"c5", growth.c5},
                    {"trace_inequality_ok", growth.trace_inequality_ok}});
    return growth.trace_inequality_ok ? kExitOk : kExitCondition;
}

int cmd_bound(const GlobalOpts& opts) {
    const json config = mest::io::load_json_file(opts.config_path);
    const auto eps_grid = config.at("eps_grid").get<std::vector<double>>();

    if (!config.contains("verify")) {
        const double b = config.at("b").get<double>();
        const double bsq = config.at("bsq").get<double>();
        json rows = json::array();
        for (double eps : eps_grid)
            rows.push_back({{"eps", eps}, {"bound", mest::bennett_bound(eps, b, bsq)}});
        emit(opts, json{{"b", b}, {"bsq", bsq}, {"rows", rows}});
        return kExitOk;
    }

    const json& verify = config.at("verify");
    mest::BoundedVarSpec spec =
        verify.at("kind").get<std::string>() == "rademacher"
            ? mest::BoundedVarSpec::rademacher()
            : mest::BoundedVarSpec::centered_score(
                  mest::io::parse_loss(verify.at("loss")),
                  mest::io::parse_distribution(verify.at("dist")));
    const int n = config.at("n").get<int>();
    const int reps = config.value("reps", 100000);
    const std::uint64_t seed = opts.seed.value_or(config.value("seed", 0ULL));
    const mest::TailReport report = mest::verify_bennett(spec, n, eps_grid, reps, seed);
    emit(opts, mest::io::tail_report_to_json(report));
    return report.passed ? kExitOk : kExitCondition;
}

int cmd_dn_trace(const GlobalOpts& opts) {
    const json config = mest::io::load_json_file(opts.config_path);
    const mest::ConvexLoss loss = mest::io::parse_loss(config.at("loss"));
    const mest::ErrorDistribution dist = mest::io::parse_distribution(config.at("dist"));
    const mest::DesignGenSpec design_spec = mest::io::parse_design(config.at("design"));
    const mest::Index n = config.at("n").get<mest::Index>();
    const double eps = config.value("eps", 0.5);
    const int directions = config.value("directions", 200);
    const std::uint64_t seed = opts.seed.value_or(config.value("seed", 0ULL));

    double c1;
    if (config.contains("c1")) {
        c1 = config.at("c1").get<double>();
    } else {
        const double delta = config.value("delta", 0.5);
        c1 = mest::check_identification(dist, loss, delta).c1;
    }

    const mest::Matrix design = mest::generate_design(design_spec, n, seed);
    const mest::NormalizedDesign normalized = mest::normalize(design, mest::summarize(design));
    const mest::Vector errors = dist.sample(n, mest::derive_seed(seed, 0xd7, 0));
    const mest::BoundReport report =
        mest::verify_dn_lower_bound(normalized, errors, loss, eps, directions, seed, c1);
    json payload = mest::io::bound_report_to_json(report);
    if (config.contains("delta")) {
        // side condition tying the probe radius to the identification window
        const double delta = config.at("delta").get<double>();
        payload["side_condition_2c2eps_lt_delta"] = 2.0 * report.c2 * eps < delta;
    }
    emit(opts, payload);
    return report.i1_bound_holds && report.total_positive ? kExitOk : kExitCondition;
}

int cmd_simulate(const GlobalOpts& opts, const std::string& summary_path) {
    const json config_json = mest::io::load_json_file(opts.config_path);
    mest::ExperimentConfig config = mest::io::parse_experiment(config_json);
    if (opts.seed) config.seed = *opts.seed;
    config.threads = resolve_threads(opts.threads);

    const std::vector<mest::ConvergenceRecord> records = mest::run_experiment(config);
    const mest::SummaryTable table = mest::summarize_experiment(records);
    const json summary = mest::io::summary_to_json(table);

    if (!opts.out_path.empty())
        mest::io::write_file_atomic(opts.out_path, mest::io::records_to_csv(records));
    const std::string sum_path = summary_path.empty()
                                     ? (opts.out_path.empty() ? "" : opts.out_path + ".summary.json")
                                     : summary_path;
    if (!sum_path.empty()) mest::io::write_file_atomic(sum_path, summary.dump(2) + "\n");

    std::cout << "label: " << config.label << "\n";
    std::cout << "n        median       q75          max          conv_rate\n";
    for (const auto& row : table.rows)
        std::cout << row.n << "  " << row.median << "  " << row.upper_quartile << "  " << row.max
                  << "  " << row.converged_rate << "\n";
    if (table.slope_defined) std::cout << "slope: " << table.slope << "\n";
    if (table.hypothesis_flagged)
        std::cout << "warning: increment/identification conditions not verified for this configuration\n";

    return table.nonconverged_fraction < 0.02 ? kExitOk : kExitNotConverged;
}

int cmd_contrast(const GlobalOpts& opts) {
    const json config_json = mest::io::load_json_file(opts.config_path);
    mest::ExperimentConfig config = mest::io::parse_experiment(config_json);
    if (opts.seed) config.seed = *opts.seed;
    config.threads = resolve_threads(opts.threads);
    const mest::ContrastReport report = mest::regime_contrast(config);
    emit(opts, mest::io::contrast_report_to_json(report));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust linear-regression M-estimation toolkit"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "JSON configuration file")->configurable(false);
    app.add_option("--out", opts.out_path, "Output path (stdout when omitted)");
    app.add_option("--format", opts.format, "Output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Seed override");
    app.add_option("--threads", opts.threads, "Worker threads (default MEST_THREADS or 1)");

    std::string data_path, loss_arg = R"({"kind":"huber","c":1.345})", summary_path;
    bool intercept = false;

    auto* fit = app.add_subcommand("fit", "Fit an M-estimate to a CSV dataset");
    fit->add_option("--data", data_path, "CSV data; last column is Y")->required();
    fit->add_option("--loss", loss_arg, "Loss spec: inline JSON or @file");
    fit->add_flag("--intercept", intercept, "Prepend a ones column");

    auto* check_design = app.add_subcommand("check-design", "Leverage-decay / Gram diagnostics");
    auto* check_conditions =
        app.add_subcommand("check-conditions",
                           "Verify the increment and identification bounds for a loss/distribution");
    auto* bound = app.add_subcommand("bound", "Evaluate or Monte-Carlo-verify the Bennett bound");
    auto* dn_trace = app.add_subcommand("dn-trace", "Sample D_n directions and check I1n/I2n bounds");
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo consistency experiment");
    simulate->add_option("--summary", summary_path, "Summary JSON path");
    auto* contrast = app.add_subcommand("contrast", "Leverage-regime contrast sweep");

    // global options may appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough(true);

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed = seed_value;

    try {
        if (fit->parsed()) return cmd_fit(opts, data_path, loss_arg, intercept);
        if (check_design->parsed()) return cmd_check_design(opts);
        if (check_conditions->parsed()) return cmd_check_conditions(opts);
        if (bound->parsed()) return cmd_bound(opts);
        if (dn_trace->parsed()) return cmd_dn_trace(opts);
        if (simulate->parsed()) return cmd_simulate(opts, summary_path);
        if (contrast->parsed()) return cmd_contrast(opts);
    } catch (const mest::NonIntegrable& e) {
        std::cerr << "mest: " << e.what() << "\n";
        return kExitCondition;
    } catch (const mest::Error& e) {
        std::cerr << "mest: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "mest: config error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
