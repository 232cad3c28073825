#include <mest/harness.hpp>

#include <mest/rng.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace mest {

Vector default_beta0(Index p) {
    const double pattern[3] = {1.0, -2.0, 0.5};
    Vector beta(p);
    for (Index i = 0; i < p; ++i) beta[i] = pattern[i % 3];
    return beta;
}

namespace {

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::vector<ConvergenceRecord> run_experiment(const ExperimentConfig& config) {
    if (config.n_grid.empty() || config.reps < 1)
        throw ConfigError("run_experiment: need a nonempty n grid and reps >= 1");
    for (std::size_t i = 1; i < config.n_grid.size(); ++i)
        if (config.n_grid[i] <= config.n_grid[i - 1])
            throw ConfigError("run_experiment: n grid must be strictly increasing");
    if (config.beta0.size() != config.design.p)
        throw ConfigError("run_experiment: beta0 length must equal design p");
    if (!config.beta0.allFinite()) throw ConfigError("run_experiment: beta0 must be finite");

    // Pre-flight increment/identification check; a failure flags records rather than
    // aborting the sweep.
    bool flagged = false;
    try {
        flagged = !check_identification(config.dist, config.loss, config.delta).passed;
    } catch (const NonIntegrable&) {
        flagged = true;
    }

    struct Task {
        std::size_t n_index;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t g = 0; g < config.n_grid.size(); ++g)
        for (int rep = 0; rep < config.reps; ++rep) tasks.push_back({g, rep});

    // Fixed designs per n (the model's "known design vectors").
    std::vector<Matrix> designs;
    std::vector<double> leverages;
    for (Index n : config.n_grid) {
        Matrix design = generate_design(config.design, n, config.seed);
        leverages.push_back(summarize(design).leverage);
        designs.push_back(std::move(design));
    }

    std::vector<ConvergenceRecord> records(tasks.size());
    auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        const Index n = config.n_grid[task.n_index];
        ConvergenceRecord& record = records[t];
        record.n = n;
        record.rep = task.rep;
        record.flagged = flagged;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Matrix* design = &designs[task.n_index];
            Matrix rep_design;
            double d_n = leverages[task.n_index];
            if (config.iid_design) {
                rep_design = generate_design(
                    config.design, n,
                    derive_seed(config.seed, static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(task.rep) + 1));
                d_n = summarize(rep_design).leverage;
                design = &rep_design;
            }
            const Vector errors = config.dist.sample(
                n, derive_seed(config.seed, static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(task.rep)));
            const Vector y = *design * config.beta0 + errors;
            const FitResult fitted = fit(*design, y, config.loss, config.solver);
            record.error_norm = (fitted.beta_hat - config.beta0).norm();
            record.d_n = d_n;
            record.converged = fitted.converged;
        } catch (const Error&) {
            record.converged = false;
            record.error_norm = std::numeric_limits<double>::quiet_NaN();
        }
        record.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    };

    int threads = config.threads;
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));

    if (threads == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
                    run_task(t);
            });
        for (auto& th : pool) th.join();
    }
    return records;
}

SummaryTable summarize_experiment(const std::vector<ConvergenceRecord>& records) {
    if (records.empty()) throw ConfigError("summarize_experiment: no records");

    SummaryTable table;
    std::vector<Index> ns;
    for (const auto& r : records) {
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
        table.hypothesis_flagged = table.hypothesis_flagged || r.flagged;
    }
    std::sort(ns.begin(), ns.end());

    std::size_t nonconverged = 0;
    for (const auto& r : records)
        if (!r.converged) ++nonconverged;
    table.nonconverged_fraction = static_cast<double>(nonconverged) / records.size();

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int slope_points = 0;
    for (Index n : ns) {
        std::vector<double> errors;
        double d_n = 0.0;
        int converged_count = 0, count = 0;
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++count;
            if (std::isfinite(r.error_norm)) errors.push_back(r.error_norm);
            if (r.converged) ++converged_count;
            d_n = r.d_n;
        }
        std::sort(errors.begin(), errors.end());
        SummaryRow row;
        row.n = n;
        row.median = quantile_of_sorted(errors, 0.5);
        row.upper_quartile = quantile_of_sorted(errors, 0.75);
        row.max = errors.empty() ? 0.0 : errors.back();
        row.d_n = d_n;
        row.converged_rate = count ? static_cast<double>(converged_count) / count : 0.0;
        table.rows.push_back(row);
        if (row.median > 0.0) {
            const double lx = std::log(static_cast<double>(n)), ly = std::log(row.median);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++slope_points;
        }
    }
    if (slope_points >= 2) {
        const double m = slope_points;
        const double denom = m * sxx - sx * sx;
        if (denom > 0.0) {
            table.slope = (m * sxy - sx * sy) / denom;
            table.slope_defined = true;
        }
    }
    return table;
}

ContrastReport regime_contrast(const ExperimentConfig& base) {
    ContrastReport report;

    std::vector<DesignGenSpec> variants;
    for (double delta : {1.0, 0.75, 0.5}) {
        DesignGenSpec spec;
        spec.kind = DesignGenSpec::Kind::decay;
        spec.p = base.design.p;
        spec.delta = delta;
        variants.push_back(spec);
    }
    {
        DesignGenSpec spec;
        spec.kind = DesignGenSpec::Kind::adversarial_leverage;
        spec.p = base.design.p;
        variants.push_back(spec);
    }

    for (const DesignGenSpec& spec : variants) {
        ExperimentConfig config = base;
        config.design = spec;
        config.label = base.label + "/" + spec.label();

        ContrastEntry entry;
        entry.design_label = spec.label();
        std::vector<Matrix> designs;
        for (Index n : config.n_grid) designs.push_back(generate_design(spec, n, config.seed));
        entry.decay = leverage_decay_fit(designs);
        entry.hypothesis_ok = entry.decay.verdict != DecayVerdict::fails;
        entry.summary = summarize_experiment(run_experiment(config));
        report.entries.push_back(std::move(entry));
    }

    // Moment-condition audit: the theoremA regime needs E|psi(e)|^{1/delta}
    // finite for delta < 1 (and some q > 1 at delta = 1); the theorem1
    // regime needs only a finite first moment.
    for (double delta : {1.0, 0.75, 0.5})
        report.moment_audits.push_back(audit_psi_moment(base.dist, base.loss, 1.0 / delta));
    report.moment_audits.push_back(audit_psi_moment(base.dist, base.loss, 1.2));
    return report;
}

}  // namespace mest
