#include "bep/solvers.hpp"

#include <cmath>
#include <limits>

namespace bep {

void Problem::validate() const {
    require_dim(K.dim(), f.dim(), "problem f");
    require_dim(K.dim(), g.dim(), "problem g");
    if (!is_supported_pairing(f, g)) {
        throw ValidationError("problem: no resolvent solver for this pairing of bifunctions");
    }
    if (f.is<SaddleBifunction>()) {
        if (!K.is<ProductSet>() || K.as<ProductSet>().parts.size() != 2 ||
            K.as<ProductSet>().parts[0].dim() != f.block_split()) {
            throw ValidationError("problem: saddle bifunctions need K = U x V matching (u, v)");
        }
        if (g.block_split() != f.block_split()) {
            throw ValidationError("problem: operator pair blocks do not match the saddle split");
        }
    }
}

std::string to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::Ipa: return "ipa";
        case SolverKind::Ppm: return "ppm";
        case SolverKind::Rppm: return "rppm";
        case SolverKind::Alternate: return "alternate";
    }
    return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
    if (name == "ipa") return SolverKind::Ipa;
    if (name == "ppm") return SolverKind::Ppm;
    if (name == "rppm") return SolverKind::Rppm;
    if (name == "alternate") return SolverKind::Alternate;
    throw ValidationError("unknown solver '" + name + "' (expected ipa, ppm, rppm or alternate)");
}

void StoppingRule::validate() const {
    if (max_iterations == 0) {
        throw ValidationError("stopping.max_iterations: must be at least 1, the rule is never evaluated otherwise");
    }
    if (!(step_tolerance >= 0.0)) throw ValidationError("stopping.step_tolerance: must be >= 0");
    if (!(target_tolerance >= 0.0)) throw ValidationError("stopping.target_tolerance: must be >= 0");
    if (target_tolerance > 0.0 && !target) {
        throw ValidationError("stopping.target_tolerance: set without a target");
    }
}

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::MaxIterations: return "max_iterations";
        case TerminationReason::StepTolerance: return "step_tolerance";
        case TerminationReason::Target: return "target";
        case TerminationReason::InnerFailure: return "inner_failure";
        case TerminationReason::ResidualViolation: return "residual_violation";
    }
    return "unknown";
}

std::vector<Vector> IterationTrace::iterates() const {
    std::vector<Vector> xs;
    if (rows.empty()) return xs;
    xs.reserve(rows.size() + 1);
    xs.push_back(rows.front().x);
    for (const auto& r : rows) xs.push_back(r.next);
    return xs;
}

double IterationTrace::error_at(std::size_t n, const Vector& point) const {
    if (n == 0 || n > rows.size() + 1) {
        throw std::out_of_range("error_at: iterate " + std::to_string(n) + " not in trace");
    }
    const Vector& x = n == 1 ? rows.front().x : rows[n - 2].next;
    return (x - point).norm();
}

Vector extrapolate(const IterationState& state, double alpha) {
    if (alpha == 0.0) return state.x_curr;
    return state.x_curr + alpha * (state.x_curr - state.x_prev);
}

namespace {

[[noreturn]] void rethrow_at(std::size_t n) {
    try {
        throw;
    } catch (const NonconvergedError& e) {
        throw NonconvergedError(std::string(e.what()) + " at n = " + std::to_string(n),
                                e.residual(), e.iterations());
    }
}

Vector resolve_at(const ResolventProblem& prob, std::size_t n, const InnerSolverConfig& cfg,
                  const Tolerances& tol) {
    try {
        return resolve(prob, cfg, tol);
    } catch (const NonconvergedError&) {
        rethrow_at(n);
    }
}

}  // namespace

StepResult ipa_step(const IterationState& state, const Problem& problem,
                    const ParameterSchedule& sched, const InnerSolverConfig& cfg,
                    const Tolerances& tol) {
    const std::size_t n = state.n;
    StepResult out;
    out.lambda = sched.lambda_at(n);
    out.beta = sched.beta_at(n);
    out.anchor = extrapolate(state, sched.alpha);
    const ResolventProblem prob{problem.f, problem.g, problem.K, out.lambda, out.beta, out.anchor};
    out.state = IterationState{n + 1, state.x_curr, resolve_at(prob, n, cfg, tol)};
    return out;
}

IterationState ppm_step(const IterationState& state, const BifunctionSpec& g,
                        const ConstraintSet& K, double r, const InnerSolverConfig& cfg) {
    const BifunctionSpec none = BifunctionSpec::zero(K.dim());
    const ResolventProblem prob{none, g, K, r, 0.0, state.x_curr};
    return {state.n + 1, state.x_curr, resolve_at(prob, state.n, cfg, default_tolerances())};
}

IterationState rppm_step(const IterationState& state, const BifunctionSpec& f,
                         const BifunctionSpec& g, const ConstraintSet& K, double lambda,
                         double beta, const InnerSolverConfig& cfg) {
    const ResolventProblem prob{f, g, K, lambda, beta, state.x_curr, true};
    return {state.n + 1, state.x_curr, resolve_at(prob, state.n, cfg, default_tolerances())};
}

IterationState alternate_step(const IterationState& state, const Problem& problem, double lambda,
                              double beta, const InnerSolverConfig& cfg) {
    const ResolventProblem prob{problem.f, problem.g, problem.K, lambda, beta, state.x_curr};
    return {state.n + 1, state.x_curr, resolve_at(prob, state.n, cfg, default_tolerances())};
}

IterationTrace run(const Problem& problem, SolverKind solver, const ParameterSchedule& sched,
                   const Vector& x0, const std::optional<Vector>& x1, const StoppingRule& stop,
                   const RunOptions& options) {
    problem.validate();
    sched.validate();
    stop.validate();
    options.inner.validate();
    if (solver == SolverKind::Ppm && !problem.f.is_zero()) {
        throw ValidationError("ppm: the proximal point method takes a single-level problem (f = 0)");
    }
    const Vector start1 = x1 ? *x1 : x0;
    for (const Vector* x : {&x0, &start1}) {
        require_dim(problem.K.dim(), x->size(), "starting point");
        if (distance(problem.K, *x) > 1e-9) {
            throw ValidationError("starting points must lie in K");
        }
    }

    const BifunctionSpec none = BifunctionSpec::zero(problem.K.dim());
    const double alpha = solver == SolverKind::Ipa ? sched.alpha : 0.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    IterationTrace trace;
    IterationState state{1, x0, start1};
    trace.reason = TerminationReason::MaxIterations;

    for (std::size_t k = 0; k < stop.max_iterations; ++k) {
        const std::size_t n = state.n;
        TraceRow row;
        row.n = n;
        row.x = state.x_curr;
        row.anchor = extrapolate(state, alpha);
        const BifunctionSpec& f = solver == SolverKind::Ppm ? none : problem.f;
        std::optional<ResolventProblem> prob;
        try {
            row.lambda = sched.lambda_at(n);
            row.beta = solver == SolverKind::Ppm ? 0.0 : sched.beta_at(n);
            prob.emplace(ResolventProblem{f, problem.g, problem.K, row.lambda, row.beta, row.anchor,
                                          solver == SolverKind::Rppm});
            row.next = resolve_at(*prob, n, options.inner, options.tolerances);
        } catch (const Error& e) {
            trace.reason = TerminationReason::InnerFailure;
            trace.message = e.what();
            break;
        }

        row.step_norm = (row.next - row.x).norm();
        row.vi_residual = options.verify_residual
                              ? vi_residual(*prob, row.next, options.vi_samples, options.seed + n)
                              : nan;
        row.err = stop.target ? (row.next - *stop.target).norm() : nan;
        trace.rows.push_back(row);
        state = IterationState{n + 1, state.x_curr, row.next};

        if (options.verify_residual && !(row.vi_residual >= options.residual_floor)) {
            trace.reason = TerminationReason::ResidualViolation;
            trace.message = "vi residual " + std::to_string(row.vi_residual) + " at n = " +
                            std::to_string(n);
            break;
        }
        if (stop.target_tolerance > 0.0 && row.err < stop.target_tolerance) {
            trace.reason = TerminationReason::Target;
            break;
        }
        if (stop.step_tolerance > 0.0 && row.step_norm < stop.step_tolerance) {
            trace.reason = TerminationReason::StepTolerance;
            break;
        }
    }
    trace.final_state = state;
    return trace;
}

}  // namespace bep
