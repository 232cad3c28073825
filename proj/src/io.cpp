#include <mest/io.hpp>

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mest::io {

namespace {

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

Matrix load_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::vector<std::string> fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const std::string& f : fields) {
            double v;
            if (!parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first_data_line) {
                first_data_line = false;  // header row
                continue;
            }
            throw IoError(path + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        first_data_line = false;
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(width) + " fields, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no data rows");

    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("rename '" + tmp + "' -> '" + path + "' failed: " +
                      std::strerror(errno));
}

std::string records_to_csv(const std::vector<ConvergenceRecord>& records) {
    std::ostringstream out;
    out << "n,rep,error_norm,d_n,converged,wall_ms\n";
    out.precision(17);
    for (const auto& r : records)
        out << r.n << ',' << r.rep << ',' << r.error_norm << ',' << r.d_n << ','
            << (r.converged ? 1 : 0) << ',' << r.wall_ms << '\n';
    return out.str();
}

ConvexLoss parse_loss(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw ConfigError("loss spec must be an object with a 'kind'");
    try {
        const std::string kind = spec.at("kind").get<std::string>();
        if (kind == "huber") return ConvexLoss::huber(spec.at("c").get<double>());
        if (kind == "power") return ConvexLoss::power(spec.at("q").get<double>());
        if (kind == "quantile") return ConvexLoss::quantile(spec.at("alpha").get<double>());
        throw ConfigError("unknown loss kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("loss spec: ") + e.what());
    }
}

json loss_to_json(const ConvexLoss& loss) {
    switch (loss.kind()) {
        case LossKind::huber: return {{"kind", "huber"}, {"c", loss.param()}};
        case LossKind::power: return {{"kind", "power"}, {"q", loss.param()}};
        default: return {{"kind", "quantile"}, {"alpha", loss.param()}};
    }
}

ErrorDistribution parse_distribution(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw ConfigError("distribution spec must be an object with a 'kind'");
    try {
        const std::string kind = spec.at("kind").get<std::string>();
        if (kind == "gaussian") return ErrorDistribution::gaussian(spec.value("sigma", 1.0));
        if (kind == "laplace") return ErrorDistribution::laplace(spec.value("b", 1.0));
        if (kind == "cauchy") return ErrorDistribution::cauchy(spec.value("scale", 1.0));
        if (kind == "student_t") return ErrorDistribution::student_t(spec.at("nu").get<double>());
        if (kind == "logpareto")
            return ErrorDistribution::log_pareto(spec.value("x0", std::exp(1.0)));
        throw ConfigError("unknown distribution kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("distribution spec: ") + e.what());
    }
}

DesignGenSpec parse_design(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw ConfigError("design spec must be an object with a 'kind'");
    try {
        const std::string kind = spec.at("kind").get<std::string>();
        DesignGenSpec out;
        out.p = spec.value("p", 1);
        if (kind == "orthogonal_blocks") {
            out.kind = DesignGenSpec::Kind::orthogonal_blocks;
        } else if (kind == "gaussian_iid") {
            out.kind = DesignGenSpec::Kind::gaussian_iid;
        } else if (kind == "decay") {
            out.kind = DesignGenSpec::Kind::decay;
            out.delta = spec.at("delta").get<double>();
        } else if (kind == "adversarial_leverage") {
            out.kind = DesignGenSpec::Kind::adversarial_leverage;
        } else {
            throw ConfigError("unknown design kind '" + kind + "'");
        }
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("design spec: ") + e.what());
    }
}

SolverOpts parse_solver_opts(const json& spec) {
    SolverOpts opts;
    if (spec.is_null()) return opts;
    opts.grad_tol = spec.value("grad_tol", opts.grad_tol);
    opts.obj_tol = spec.value("obj_tol", opts.obj_tol);
    opts.max_iter = spec.value("max_iter", opts.max_iter);
    opts.smooth_init = spec.value("smooth_init", opts.smooth_init);
    opts.smooth_final = spec.value("smooth_final", opts.smooth_final);
    return opts;
}

ExperimentConfig parse_experiment(const json& spec) {
    ExperimentConfig config;
    try {
        config.loss = parse_loss(spec.at("loss"));
        config.dist = parse_distribution(spec.at("dist"));
        config.design = parse_design(spec.at("design"));
        config.n_grid = spec.at("n_grid").get<std::vector<Index>>();
        config.reps = spec.at("reps").get<int>();
        config.seed = spec.value("seed", 0ULL);
        config.label = spec.value("label", std::string("experiment"));
        config.iid_design = spec.value("iid_design", false);
        config.delta = spec.value("delta", 0.5);
        config.threads = spec.value("threads", 1);
        if (spec.contains("solver")) config.solver = parse_solver_opts(spec.at("solver"));
        if (spec.contains("beta0")) {
            const auto beta = spec.at("beta0").get<std::vector<double>>();
            config.beta0 = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
        } else {
            config.beta0 = default_beta0(config.design.p);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    return config;
}

WeightSpec parse_weights(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw ConfigError("weight spec must be an object with a 'kind'");
    try {
        const std::string kind = spec.at("kind").get<std::string>();
        WeightSpec out;
        if (kind == "one_over_n") {
            out.kind = WeightSpec::Kind::one_over_n;
        } else if (kind == "one_over_sqrt_n") {
            out.kind = WeightSpec::Kind::one_over_sqrt_n;
        } else if (kind == "design_column") {
            out.kind = WeightSpec::Kind::design_column;
            out.column = spec.value("column", 0);
            out.design = parse_design(spec.at("design"));
        } else {
            throw ConfigError("unknown weight kind '" + kind + "'");
        }
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("weight spec: ") + e.what());
    }
}

json summary_to_json(const SummaryTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows)
        rows.push_back({{"n", row.n},
                        {"median_error", row.median},
                        {"upper_quartile_error", row.upper_quartile},
                        {"max_error", row.max},
                        {"d_n", row.d_n},
                        {"converged_rate", row.converged_rate}});
    json out{{"rows", rows},
             {"nonconverged_fraction", table.nonconverged_fraction},
             {"hypothesis_flagged", table.hypothesis_flagged}};
    if (table.slope_defined)
        out["slope"] = table.slope;
    else
        out["slope"] = nullptr;
    return out;
}

json condition_report_to_json(const ConditionReport& report) {
    json grid = json::array();
    for (const auto& [u, g] : report.evidence_grid) grid.push_back({{"u", u}, {"value", g}});
    json out{{"c0", report.c0},
             {"c1", report.c1},
             {"delta", report.delta},
             {"mean_psi", report.mean_psi},
             {"passed", report.passed},
             {"evidence_grid", grid}};
    if (std::isfinite(report.c0_closed)) out["c0_closed"] = report.c0_closed;
    return out;
}

json decay_report_to_json(const DecayReport& report) {
    json points = json::array();
    for (const auto& [n, d] : report.points) points.push_back({{"n", n}, {"d_n", d}});
    return {{"slope", report.slope},
            {"delta_hat", report.delta_hat},
            {"c2", report.c2},
            {"verdict", to_string(report.verdict)},
            {"points", points}};
}

json tail_report_to_json(const TailReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"eps", row.eps},
                        {"bound", row.bound},
                        {"empirical", row.empirical},
                        {"slack", row.slack},
                        {"dominated", row.dominated}});
    return {{"n", report.n}, {"reps", report.reps}, {"rows", rows}, {"passed", report.passed}};
}

json slln_report_to_json(const SllnReport& report) {
    return {{"n_grid", report.n_grid},
            {"medians", report.medians},
            {"max_scaled_weight", report.max_scaled_weight},
            {"weight_growth_slope", report.weight_growth_slope},
            {"threshold", report.threshold},
            {"medians_nonincreasing", report.medians_nonincreasing},
            {"passed", report.passed}};
}

json bound_report_to_json(const BoundReport& report) {
    return {{"eps", report.eps},
            {"c1", report.c1},
            {"i1_threshold", report.i1_threshold},
            {"min_total", report.min_total},
            {"min_i1", report.min_i1},
            {"max_abs_i2", report.max_abs_i2},
            {"max_decomposition_residual", report.max_decomposition_residual},
            {"quadrature_rel_err", report.quadrature_rel_err},
            {"c2", report.c2},
            {"max_abs_shift", report.max_abs_shift},
            {"n_directions", report.n_directions},
            {"i1_bound_holds", report.i1_bound_holds},
            {"total_positive", report.total_positive}};
}

json contrast_report_to_json(const ContrastReport& report) {
    json entries = json::array();
    for (const auto& entry : report.entries)
        entries.push_back({{"design", entry.design_label},
                           {"decay", decay_report_to_json(entry.decay)},
                           {"summary", summary_to_json(entry.summary)},
                           {"hypothesis_ok", entry.hypothesis_ok}});
    json audits = json::array();
    for (const auto& audit : report.moment_audits)
        audits.push_back({{"exponent", audit.exponent},
                          {"caps", audit.caps},
                          {"values", audit.values},
                          {"last_increment_ratio", audit.last_increment_ratio},
                          {"divergent", audit.divergent},
                          {"closed_form_divergent", audit.closed_form_divergent}});
    return {{"entries", entries}, {"moment_audits", audits}};
}

json fit_result_to_json(const FitResult& fit, const DesignSummary& summary) {
    return {{"beta_hat", std::vector<double>(fit.beta_hat.data(),
                                             fit.beta_hat.data() + fit.beta_hat.size())},
            {"objective", fit.objective},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"d_n", summary.leverage},
            {"n0", summary.n0}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace mest::io
