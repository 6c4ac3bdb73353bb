#pragma once

#include <optional>

#include "bep/bifunction.hpp"
#include "bep/prox.hpp"

namespace bep {

struct InnerSolverConfig {
    std::size_t max_iterations = 50000;
    double tolerance = 1e-10;  // fixed-point residual norm
    double step_factor = 1.0;  // damping in (0, 1]

    void validate() const;
    bool operator==(const InnerSolverConfig&) const = default;
};

/// The subproblem x+ = J_lambda^{beta f + g}(anchor): find z in K with
///   beta f(z, y) + g(z, y) + (1/lambda) <z - anchor, y - z> >= 0  for all y in K.
/// With swap_penalization the weights move to g: J_lambda^{f + beta g}.
struct ResolventProblem {
    const BifunctionSpec& f;
    const BifunctionSpec& g;
    const ConstraintSet& K;
    double lambda;
    double beta;
    Vector anchor;
    bool swap_penalization = false;

    double f_weight() const noexcept { return swap_penalization ? 1.0 : beta; }
    double g_weight() const noexcept { return swap_penalization ? beta : 1.0; }
};

/// f, g both difference kind: prox of lambda (w_f psi + w_g phi) over K.
Vector resolve_difference(const ResolventProblem& prob,
                          const Tolerances& tol = default_tolerances());

/// f difference kind, g gradient kind. Solves z = prox_{lambda w_f psi}(y - lambda w_g grad phi(z))
/// by damped fixed-point iteration from project(K, y), halving the damping when
/// the residual stalls for 10 consecutive iterations.
Vector resolve_gradient(const ResolventProblem& prob, const InnerSolverConfig& cfg,
                        const std::optional<Vector>& initial = std::nullopt,
                        const Tolerances& tol = default_tolerances());

/// f saddle kind, g operator-pair kind, K = U x V. Block Gauss-Seidel over the
/// u and v blocks; each block is an affine strongly monotone variational
/// inequality solved exactly when possible.
Vector resolve_saddle(const ResolventProblem& prob, const InnerSolverConfig& cfg,
                      const std::optional<Vector>& initial = std::nullopt);

/// Dispatches on the (f, g) pairing. A zero f is accepted with any g that has
/// a solver when paired with a difference f.
Vector resolve(const ResolventProblem& prob, const InnerSolverConfig& cfg = {},
               const Tolerances& tol = default_tolerances());

bool is_supported_pairing(const BifunctionSpec& f, const BifunctionSpec& g);

/// min over sampled y in K (plus z and the projected anchor) of
///   w_f f(z, y) + w_g g(z, y) + (1/lambda) <z - anchor, y - z>.
double vi_residual(const ResolventProblem& prob, const Vector& z, std::size_t samples,
                   std::uint64_t seed = 42, double radius = 10.0);

}  // namespace bep
