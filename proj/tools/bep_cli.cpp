#include <iostream>

#include "CLI11.hpp"
#include "bep/bep.hpp"

namespace {

int report(const bep::RunRecord& r) {
    const auto& trace = r.trace;
    std::cout << r.config.output.stem << ": " << trace.rows.size() << " iterations, "
              << bep::to_string(trace.reason) << ", " << bep::format_double(r.wall_seconds) << " s\n";
    if (!trace.rows.empty()) {
        std::cout << "  final err " << bep::format_double(trace.rows.back().err) << '\n';
    }
    for (const auto& m : r.monitors) {
        std::cout << "  " << m.name << ": " << bep::to_string(m.verdict) << '\n';
    }
    for (const auto& f : r.files) std::cout << "  wrote " << f.string() << '\n';
    if (r.exit_code != bep::kExitSuccess) std::cerr << "solver failure: " << r.failure << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertial proximal solver for bilevel equilibrium problems"};
    app.set_version_flag("--version", std::string(bep::kVersion));
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "Override diagnostics.seed");

    std::string config_path, axis_spec, out_dir;
    std::size_t iterations = 2000;

    auto* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per axis value");
    sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sweep->add_option("--axis", axis_spec, "alpha=0.1,0.3 | beta=1:1,1:2 | lambda=1:1,1:0")->required();

    auto* reproduce = app.add_subcommand("reproduce-section5", "Emit the two-quadratic experiment data");
    reproduce->add_option("--out", out_dir, "Output directory")->required();
    reproduce->add_option("--iterations", iterations, "Iterations per run")->check(CLI::PositiveNumber);

    auto* diagnose = app.add_subcommand("diagnose", "Schedule classification and series check");
    diagnose->add_option("--config", config_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? bep::kExitSuccess : bep::kExitConfigError;
    }

    auto load = [&] {
        bep::ExperimentConfig cfg = bep::load_config(config_path);
        if (seed) cfg.diagnostics.seed = *seed;
        return cfg;
    };

    try {
        if (*run) return report(bep::run_experiment(load()));
        if (*sweep) {
            const auto cfg = load();
            int code = bep::kExitSuccess;
            for (const auto& r : bep::sweep(cfg, bep::parse_axis(axis_spec))) {
                code = std::max(code, report(r));
            }
            return code;
        }
        if (*reproduce) {
            const auto out = bep::reproduce_section5(out_dir, iterations, seed.value_or(42));
            std::cout << out.summary;
            for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
            return out.failed ? bep::kExitSolverFailure : bep::kExitSuccess;
        }
        if (*diagnose) {
            std::cout << bep::diagnose(load());
            return bep::kExitSuccess;
        }
    } catch (const bep::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bep::kExitConfigError;
    } catch (const bep::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return bep::kExitIoFailure;
    } catch (const bep::Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return bep::kExitSolverFailure;
    }
    return bep::kExitSuccess;
}
