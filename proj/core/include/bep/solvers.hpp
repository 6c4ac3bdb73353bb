#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bep/resolvent.hpp"
#include "bep/schedule.hpp"

namespace bep {

/// A bilevel problem: find x in S_f with g(x, y) >= 0 for all y in S_f, where
/// S_f solves the lower-level problem for f over K.
struct Problem {
    BifunctionSpec f;
    BifunctionSpec g;
    ConstraintSet K;

    /// Dimensions agree and the pairing has a resolvent solver.
    void validate() const;
};

enum class SolverKind {
    Ipa,        // inertial proximal algorithm
    Ppm,        // proximal point on g alone
    Rppm,       // J^{f + beta g}
    Alternate,  // J^{beta f + g} without inertia
};

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

/// x_{n-1}, x_n at iteration n.
struct IterationState {
    std::size_t n = 1;
    Vector x_prev;
    Vector x_curr;
};

struct StoppingRule {
    std::size_t max_iterations = 2000;
    double step_tolerance = 0.0;       // 0 disables
    std::optional<Vector> target;      // reference point for err
    double target_tolerance = 0.0;     // 0: target only feeds err

    void validate() const;
};

/// One step x_n -> x_{n+1}.
struct TraceRow {
    std::size_t n = 0;
    Vector x;       // x_n
    Vector anchor;  // y_n
    double lambda = 0.0;
    double beta = 0.0;
    Vector next;    // x_{n+1}
    double step_norm = 0.0;
    double vi_residual = 0.0;  // NaN when verification is off
    double err = 0.0;          // |x_{n+1} - target|, NaN without target
};

enum class TerminationReason {
    MaxIterations,
    StepTolerance,
    Target,
    InnerFailure,
    ResidualViolation,
};

std::string to_string(TerminationReason reason);

struct IterationTrace {
    std::vector<TraceRow> rows;
    TerminationReason reason = TerminationReason::MaxIterations;
    std::string message;
    IterationState final_state;

    bool failed() const noexcept {
        return reason == TerminationReason::InnerFailure ||
               reason == TerminationReason::ResidualViolation;
    }

    /// x_1, x_2, ..., x_{N+1}; index k holds x_{k+1}.
    std::vector<Vector> iterates() const;

    /// |x_n - point| for 1 <= n <= rows.size() + 1.
    double error_at(std::size_t n, const Vector& point) const;
};

struct RunOptions {
    InnerSolverConfig inner;
    bool verify_residual = true;
    std::size_t vi_samples = 32;
    std::uint64_t seed = 42;
    double residual_floor = -1e-6;
    Tolerances tolerances;
};

/// y_n = x_n + alpha (x_n - x_{n-1}); exactly x_n when alpha == 0.
Vector extrapolate(const IterationState& state, double alpha);

struct StepResult {
    IterationState state;
    Vector anchor;
    double lambda = 0.0;
    double beta = 0.0;
};

StepResult ipa_step(const IterationState& state, const Problem& problem,
                    const ParameterSchedule& sched, const InnerSolverConfig& cfg,
                    const Tolerances& tol = default_tolerances());

/// x_{n+1} = J_r^g(x_n)
IterationState ppm_step(const IterationState& state, const BifunctionSpec& g,
                        const ConstraintSet& K, double r, const InnerSolverConfig& cfg = {});

/// x_{n+1} = J_lambda^{f + beta g}(x_n)
IterationState rppm_step(const IterationState& state, const BifunctionSpec& f,
                         const BifunctionSpec& g, const ConstraintSet& K, double lambda,
                         double beta, const InnerSolverConfig& cfg = {});

/// x_{n+1} = J_lambda^{beta f + g}(x_n)
IterationState alternate_step(const IterationState& state, const Problem& problem,
                              double lambda, double beta, const InnerSolverConfig& cfg = {});

/// Iterates from x_0, x_1 until the stopping rule fires. Inner-solver failures
/// and residual violations end the run; the partial trace is kept.
IterationTrace run(const Problem& problem, SolverKind solver, const ParameterSchedule& sched,
                   const Vector& x0, const std::optional<Vector>& x1, const StoppingRule& stop,
                   const RunOptions& options = {});

}  // namespace bep
