#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bep/diagnostics.hpp"
#include "bep/solvers.hpp"

namespace bep {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed or semantically invalid experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Output directory or file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 1,
    kExitSolverFailure = 2,
    kExitIoFailure = 3,
};

/// Inputs of the geometric-condition series at one (u, p). For a difference f
/// the set is argmin psi; for a saddle f it is the saddle-point set S_f and
/// (u, v, q) are required.
struct SeriesInput {
    Vector p;
    std::optional<Vector> q;
    std::optional<Vector> u;
    std::optional<Vector> v;
    std::optional<ConstraintSet> set;
};

struct DiagnosticsConfig {
    bool fejer = true;
    bool series_check = true;
    bool verify_residual = true;
    std::size_t vi_samples = 32;
    std::uint64_t seed = 42;
    std::size_t series_horizon = 1000;
    /// Fejer anchor; defaults to the stopping target or the preset solution.
    std::optional<Vector> anchor;
    std::optional<SeriesInput> series;
};

struct OutputConfig {
    std::string directory = ".";
    std::string stem = "run";
};

struct ExperimentConfig {
    /// Exactly one of preset / problem is set.
    std::string preset;
    std::optional<Problem> problem;
    SolverKind solver = SolverKind::Ipa;
    ParameterSchedule schedule;
    Vector x0;
    std::optional<Vector> x1;
    StoppingRule stopping;
    InnerSolverConfig inner;
    DiagnosticsConfig diagnostics;
    OutputConfig output;
};

/// Field-by-field comparison through the canonical serialization.
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Throws ConfigError with the line/column of parse errors or the JSON path of
/// unknown and invalid fields.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Built-in problems: "section5", "saddle-example", "hmp-distance".
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

struct ResolvedProblem {
    Problem problem;
    std::optional<Vector> solution;
    std::optional<SeriesInput> series;
};

ResolvedProblem resolve_problem(const ExperimentConfig& cfg);

struct RunRecord {
    ExperimentConfig config;
    IterationTrace trace;
    ScheduleReport schedule_report;
    std::vector<MonitorReport> monitors;
    double wall_seconds = 0.0;
    std::string version = kVersion;
    int exit_code = kExitSuccess;
    std::string failure;
    std::vector<std::filesystem::path> files;
};

/// Runs the solver with the requested diagnostics. When write_files is set,
/// writes <stem>_trace.csv and <stem>_monitors.csv into the output directory
/// and throws IoError if that fails.
RunRecord run_experiment(const ExperimentConfig& cfg, bool write_files = true);

struct SweepAxis {
    enum class Kind { Alpha, Beta, Lambda };
    Kind kind = Kind::Alpha;
    std::vector<double> alphas;
    std::vector<PowerRule> rules;

    std::size_t size() const noexcept {
        return kind == Kind::Alpha ? alphas.size() : rules.size();
    }
    std::string label(std::size_t i) const;
};

/// "alpha=0.1,0.3,0.45", "beta=1:1,1:2" or "lambda=1:1,1:0" (scale:exponent).
SweepAxis parse_axis(const std::string& spec);

/// One run per axis value, executed concurrently. Writes per-run files plus
/// <stem>_sweep.csv with columns axis_value,n,err.
std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const SweepAxis& axis,
                             bool write_files = true);

struct Section5Output {
    std::vector<std::filesystem::path> files;
    std::string summary;
    bool failed = false;
};

/// Writes the trajectory, beta-sweep, alpha-sweep CSVs and a summary report.
Section5Output reproduce_section5(const std::filesystem::path& out_dir,
                                  std::size_t iterations = 2000, std::uint64_t seed = 42);

/// Schedule classification plus series check, as text.
std::string diagnose(const ExperimentConfig& cfg);

/// %.17g formatting used by every CSV writer.
std::string format_double(double value);

void write_trace_csv(const IterationTrace& trace, const std::filesystem::path& path);
void write_monitors_csv(const std::vector<MonitorReport>& monitors,
                        const std::filesystem::path& path);

}  // namespace bep
