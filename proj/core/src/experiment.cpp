#include "bep/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace bep {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

namespace {

std::string shortest(double value) {
    char buffer[40];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "': " +
                      (ec ? ec.message() : "not a directory"));
    }
}

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_for_write(path);
    out << text;
    close_checked(out, path);
}

std::optional<GapEvaluator> make_gap(const Problem& problem, const SeriesInput& s) {
    if (!s.set) throw ConfigError("diagnostics.series.set: required for the series check");
    if (problem.f.is<DifferenceBifunction>()) {
        return GapEvaluator(DifferenceGap{problem.f.as<DifferenceBifunction>().h, *s.set, problem.K, s.p});
    }
    if (problem.f.is<SaddleBifunction>()) {
        if (!s.q || !s.u || !s.v) {
            throw ConfigError("diagnostics.series: saddle problems need u, v, p and q");
        }
        const auto& parts = problem.K.as<ProductSet>().parts;
        return GapEvaluator(SaddleGapInput{problem.f.as<SaddleBifunction>().L, parts[0], parts[1],
                                           *s.set, *s.u, *s.v, s.p, *s.q});
    }
    return std::nullopt;
}

std::size_t series_horizon(const ExperimentConfig& cfg) {
    std::size_t horizon = cfg.diagnostics.series_horizon;
    if (cfg.schedule.lambda_override) horizon = std::min(horizon, cfg.schedule.lambda_override->size());
    if (cfg.schedule.beta_override) horizon = std::min(horizon, cfg.schedule.beta_override->size());
    return horizon;
}

std::optional<Vector> fejer_anchor(const ExperimentConfig& cfg, const ResolvedProblem& resolved) {
    if (cfg.diagnostics.anchor) return cfg.diagnostics.anchor;
    if (cfg.stopping.target) return cfg.stopping.target;
    return resolved.solution;
}

void write_run_files(RunRecord& record) {
    const fs::path dir = record.config.output.directory;
    const std::string& stem = record.config.output.stem;
    const fs::path trace = dir / (stem + "_trace.csv");
    const fs::path monitors = dir / (stem + "_monitors.csv");
    write_trace_csv(record.trace, trace);
    write_monitors_csv(record.monitors, monitors);
    record.files.push_back(trace);
    record.files.push_back(monitors);
}

// err of iterate x_n for n = 1..N+1
void append_error_rows(std::ostream& out, const std::string& label, const IterationTrace& trace,
                       const std::optional<Vector>& target) {
    if (!target || trace.rows.empty()) return;
    const std::size_t count = trace.rows.size() + 1;
    for (std::size_t n = 1; n <= count; ++n) {
        out << label << ',' << n << ',' << format_double(trace.error_at(n, *target)) << '\n';
    }
}

}  // namespace

void write_trace_csv(const IterationTrace& trace, const fs::path& path) {
    auto out = open_for_write(path);
    const Index dim = trace.rows.empty() ? 0 : trace.rows.front().x.size();
    out << "n,lambda,beta,step_norm,vi_residual,err";
    for (const char* block : {"x", "anchor", "next"}) {
        for (Index i = 0; i < dim; ++i) out << ',' << block << '_' << i;
    }
    out << '\n';
    for (const auto& row : trace.rows) {
        out << row.n << ',' << format_double(row.lambda) << ',' << format_double(row.beta) << ','
            << format_double(row.step_norm) << ',' << format_double(row.vi_residual) << ','
            << format_double(row.err);
        for (const Vector* v : {&row.x, &row.anchor, &row.next}) {
            for (Index i = 0; i < dim; ++i) out << ',' << format_double((*v)[i]);
        }
        out << '\n';
    }
    close_checked(out, path);
}

void write_monitors_csv(const std::vector<MonitorReport>& monitors, const fs::path& path) {
    auto out = open_for_write(path);
    out << "monitor,n,summand,partial_sum,verdict,tail_estimate\n";
    for (const auto& m : monitors) {
        const std::string verdict = to_string(m.verdict);
        const std::string tail = format_double(m.tail_estimate);
        for (std::size_t i = 0; i < m.summands.size(); ++i) {
            out << m.name << ',' << i + 1 << ',' << format_double(m.summands[i]) << ','
                << format_double(m.partial_sums[i]) << ',' << verdict << ',' << tail << '\n';
        }
    }
    close_checked(out, path);
}

RunRecord run_experiment(const ExperimentConfig& cfg, bool write_files) {
    // Round-trips through the parser so programmatic configs get the same checks.
    parse_config(serialize_config(cfg), "config");
    const ResolvedProblem resolved = resolve_problem(cfg);
    if (write_files) ensure_directory(cfg.output.directory);

    RunRecord record;
    record.config = cfg;
    record.schedule_report = classify_schedule(cfg.schedule);

    RunOptions options;
    options.inner = cfg.inner;
    options.verify_residual = cfg.diagnostics.verify_residual;
    options.vi_samples = cfg.diagnostics.vi_samples;
    options.seed = cfg.diagnostics.seed;

    const auto start = std::chrono::steady_clock::now();
    record.trace = run(resolved.problem, cfg.solver, cfg.schedule, cfg.x0, cfg.x1, cfg.stopping, options);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (record.trace.failed()) {
        record.exit_code = kExitSolverFailure;
        record.failure = to_string(record.trace.reason) + ": " + record.trace.message;
    }

    const auto anchor = fejer_anchor(cfg, resolved);
    if (cfg.diagnostics.fejer && anchor && record.trace.rows.size() >= 3) {
        const double alpha = cfg.solver == SolverKind::Ipa ? cfg.schedule.alpha : 0.0;
        FejerReport fejer = fejer_monitor(record.trace, *anchor, alpha);
        record.monitors.push_back(std::move(fejer.distance_increase));
        record.monitors.push_back(std::move(fejer.step_squares));
        record.monitors.push_back(std::move(fejer.step_over_beta));
        record.monitors.push_back(std::move(fejer.inertial_error));
    }
    if (cfg.diagnostics.series_check && resolved.series) {
        if (auto gap = make_gap(resolved.problem, *resolved.series)) {
            record.monitors.push_back(series_check(*gap, cfg.schedule, series_horizon(cfg)));
        }
    }
    if (write_files) write_run_files(record);
    return record;
}

std::string SweepAxis::label(std::size_t i) const {
    if (kind == Kind::Alpha) return shortest(alphas.at(i));
    const PowerRule& r = rules.at(i);
    return shortest(r.scale) + ":" + shortest(r.exponent);
}

SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("axis '" + spec + "': expected <alpha|beta|lambda>=<values>");
    }
    const std::string name = spec.substr(0, eq);
    SweepAxis axis;
    if (name == "alpha") {
        axis.kind = SweepAxis::Kind::Alpha;
    } else if (name == "beta") {
        axis.kind = SweepAxis::Kind::Beta;
    } else if (name == "lambda") {
        axis.kind = SweepAxis::Kind::Lambda;
    } else {
        throw ConfigError("axis '" + spec + "': unknown axis '" + name + "' (expected alpha, beta or lambda)");
    }

    auto number = [&](const std::string& text) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
            throw ConfigError("axis '" + spec + "': '" + text + "' is not a number");
        }
        return value;
    };

    std::stringstream values(spec.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
        if (axis.kind == SweepAxis::Kind::Alpha) {
            axis.alphas.push_back(number(item));
        } else {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw ConfigError("axis '" + spec + "': rule '" + item + "' must be scale:exponent");
            }
            axis.rules.push_back({number(item.substr(0, colon)), number(item.substr(colon + 1))});
        }
    }
    if (axis.size() == 0) throw ConfigError("axis '" + spec + "': empty value list");
    return axis;
}

std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const SweepAxis& axis, bool write_files) {
    if (axis.size() == 0) throw ConfigError("sweep: empty axis");
    const char* prefix = axis.kind == SweepAxis::Kind::Alpha  ? "alpha"
                         : axis.kind == SweepAxis::Kind::Beta ? "beta"
                                                              : "lambda";
    std::vector<ExperimentConfig> configs;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        ExperimentConfig c = cfg;
        switch (axis.kind) {
            case SweepAxis::Kind::Alpha: c.schedule.alpha = axis.alphas[i]; break;
            case SweepAxis::Kind::Beta:
                c.schedule.beta = axis.rules[i];
                c.schedule.beta_override.reset();
                break;
            case SweepAxis::Kind::Lambda:
                c.schedule.lambda = axis.rules[i];
                c.schedule.lambda_override.reset();
                break;
        }
        c.output.stem = cfg.output.stem + "_" + prefix + std::to_string(i);
        parse_config(serialize_config(c), std::string("sweep value ") + axis.label(i));
        configs.push_back(std::move(c));
    }
    if (write_files) ensure_directory(cfg.output.directory);

    std::vector<std::future<RunRecord>> pending;
    for (const auto& c : configs) {
        pending.push_back(std::async(std::launch::async, [&c] { return run_experiment(c, false); }));
    }
    std::vector<RunRecord> records;
    for (auto& p : pending) records.push_back(p.get());

    if (write_files) {
        for (auto& r : records) write_run_files(r);
        const fs::path path = fs::path(cfg.output.directory) / (cfg.output.stem + "_sweep.csv");
        auto out = open_for_write(path);
        out << "axis_value,n,err\n";
        for (std::size_t i = 0; i < records.size(); ++i) {
            append_error_rows(out, axis.label(i), records[i].trace, cfg.stopping.target);
        }
        close_checked(out, path);
        for (auto& r : records) r.files.push_back(path);
    }
    return records;
}

namespace {

std::string error_summary(const std::string& heading, const SweepAxis& axis,
                          const std::vector<RunRecord>& records, const Vector& target) {
    std::ostringstream os;
    os << heading << '\n';
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& trace = records[i].trace;
        os << "  " << axis.label(i) << ": ";
        if (trace.rows.size() + 1 >= 200) os << "err(200) = " << format_double(trace.error_at(200, target)) << ", ";
        os << "final err = " << format_double(trace.error_at(trace.rows.size() + 1, target));
        if (records[i].exit_code != kExitSuccess) os << " [failed: " << records[i].failure << ']';
        os << '\n';
    }
    return os.str();
}

}  // namespace

Section5Output reproduce_section5(const fs::path& out_dir, std::size_t iterations, std::uint64_t seed) {
    ExperimentConfig base = preset_config("section5");
    base.stopping.max_iterations = iterations;
    base.diagnostics.seed = seed;
    base.output.directory = out_dir.string();
    base.output.stem = "section5";
    const Vector target = *base.stopping.target;
    ensure_directory(out_dir);

    SweepAxis betas;
    betas.kind = SweepAxis::Kind::Beta;
    betas.rules = {{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}};
    SweepAxis alphas;
    alphas.kind = SweepAxis::Kind::Alpha;
    alphas.alphas = {0.0, 0.1, 0.3, 0.45, 0.6};

    auto main_run = std::async(std::launch::async, [&] { return run_experiment(base, false); });
    auto beta_runs = std::async(std::launch::async, [&] { return sweep(base, betas, false); });
    const auto alpha_records = sweep(base, alphas, false);
    const RunRecord record = main_run.get();
    const auto beta_records = beta_runs.get();

    Section5Output out;
    out.failed = record.exit_code != kExitSuccess;
    for (const auto* group : {&beta_records, &alpha_records}) {
        for (const auto& r : *group) out.failed = out.failed || r.exit_code != kExitSuccess;
    }

    const fs::path trajectory = out_dir / "section5_trajectory.csv";
    {
        auto csv = open_for_write(trajectory);
        csv << "n,x_0,x_1,err\n";
        const auto xs = record.trace.iterates();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            csv << i + 1 << ',' << format_double(xs[i][0]) << ',' << format_double(xs[i][1]) << ','
                << format_double((xs[i] - target).norm()) << '\n';
        }
        close_checked(csv, trajectory);
    }
    const fs::path monitors = out_dir / "section5_monitors.csv";
    write_monitors_csv(record.monitors, monitors);

    auto write_sweep = [&](const fs::path& path, const SweepAxis& axis, const std::vector<RunRecord>& records) {
        auto csv = open_for_write(path);
        csv << "axis_value,n,err\n";
        for (std::size_t i = 0; i < records.size(); ++i) append_error_rows(csv, axis.label(i), records[i].trace, target);
        close_checked(csv, path);
    };
    const fs::path beta_path = out_dir / "section5_beta_sweep.csv";
    const fs::path alpha_path = out_dir / "section5_alpha_sweep.csv";
    write_sweep(beta_path, betas, beta_records);
    write_sweep(alpha_path, alphas, alpha_records);

    std::ostringstream summary;
    summary << "bep " << kVersion << " reproduction of the two-quadratic bilevel experiment\n"
            << "iterations: " << iterations << "\nseed: " << seed << "\n\n"
            << "schedule (alpha = " << shortest(base.schedule.alpha) << ")\n"
            << record.schedule_report.summary() << '\n';
    const std::size_t count = record.trace.rows.size() + 1;
    summary << "final iterate error: " << format_double(record.trace.error_at(count, target)) << '\n';
    std::size_t first_hit = 0;
    for (std::size_t n = 1; n <= count && first_hit == 0; ++n) {
        if (record.trace.error_at(n, target) < 1e-2) first_hit = n;
    }
    summary << "first n with err < 1e-2: " << (first_hit ? std::to_string(first_hit) : "none") << '\n';
    if (record.exit_code != kExitSuccess) summary << "run failed: " << record.failure << '\n';
    summary << "\nmonitors\n";
    for (const auto& m : record.monitors) {
        summary << "  " << m.name << ": " << to_string(m.verdict)
                << ", sum = " << format_double(m.partial_sums.empty() ? 0.0 : m.partial_sums.back())
                << ", tail estimate = " << format_double(m.tail_estimate) << '\n';
    }
    summary << '\n' << error_summary("beta sweep (scale:exponent of b (1+n)^s, alpha = 0.1)", betas, beta_records, target);
    summary << '\n' << error_summary("alpha sweep (beta_n = 1+n)", alphas, alpha_records, target);
    out.summary = summary.str();

    const fs::path summary_path = out_dir / "section5_summary.txt";
    write_text(summary_path, out.summary);
    out.files = {trajectory, monitors, beta_path, alpha_path, summary_path};
    return out;
}

std::string diagnose(const ExperimentConfig& cfg) {
    parse_config(serialize_config(cfg), "config");
    const ResolvedProblem resolved = resolve_problem(cfg);
    std::ostringstream os;
    os << "schedule classification\n" << classify_schedule(cfg.schedule).summary();
    if (!resolved.series) {
        os << "series check: skipped (no diagnostics.series input)\n";
        return os.str();
    }
    const auto gap = make_gap(resolved.problem, *resolved.series);
    if (!gap) {
        os << "series check: not available for this lower-level bifunction\n";
        return os.str();
    }
    const MonitorReport m = series_check(*gap, cfg.schedule, series_horizon(cfg));
    os << "series check over n = 1.." << m.summands.size() << '\n'
       << "  partial sum: " << format_double(m.partial_sums.empty() ? 0.0 : m.partial_sums.back()) << '\n'
       << "  verdict: " << to_string(m.verdict) << '\n'
       << "  tail estimate: " << format_double(m.tail_estimate) << '\n';
    return os.str();
}

}  // namespace bep
