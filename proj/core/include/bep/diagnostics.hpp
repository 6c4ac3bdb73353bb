#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bep/bifunction.hpp"
#include "bep/schedule.hpp"
#include "bep/solvers.hpp"

namespace bep {

/// psi^*(2p/beta) - sigma_M(2p/beta) where psi is restricted to K.
///
/// Closed forms cover quadratic, affine-squared and half squared distance
/// pieces over the whole space; other pieces use a multiscale grid search of
/// <u, y> - psi(y) over [-box, box]^d. Throws ValidationError when min psi
/// differs from 0 by more than the normalization tolerance.
double gap_difference(const ConvexPiece& psi, const ConstraintSet& M, const Vector& p,
                      double beta, const ConstraintSet& K,
                      const Tolerances& tol = default_tolerances());

inline double gap_difference(const ConvexPiece& psi, const ConstraintSet& M, const Vector& p,
                             double beta) {
    return gap_difference(psi, M, p, beta, ConstraintSet::whole_space(psi.dim()));
}

/// Fenchel conjugate of psi restricted to K.
double conjugate(const ConvexPiece& psi, const Vector& u, const ConstraintSet& K,
                 const Tolerances& tol = default_tolerances());

struct SaddleGap {
    double value = 0.0;
    /// The maximizer of the u-conjugate hit the boundary of U, so the value
    /// departs from the interior formula p^2 / ((1+v) beta^2).
    bool boundary_regime = false;
};

/// (-L(u,.))^*(2q/beta) + (L(.,v))^*(2p/beta) - sigma_{S_f}(2p/beta, 2q/beta),
/// conjugates taken over V and U respectively.
SaddleGap gap_saddle(const SaddleFunction& L, const ConstraintSet& U, const ConstraintSet& V,
                     const ConstraintSet& solution_set, const Vector& u, const Vector& v,
                     const Vector& p, const Vector& q, double beta);

struct DifferenceGap {
    ConvexPiece psi;
    ConstraintSet argmin;
    ConstraintSet K;
    Vector p;
};

struct SaddleGapInput {
    SaddleFunction L;
    ConstraintSet U;
    ConstraintSet V;
    ConstraintSet solution_set;
    Vector u, v, p, q;
};

/// Gap bracket of the geometric condition at a fixed (u, p), as a function of beta.
class GapEvaluator {
public:
    using Kind = std::variant<DifferenceGap, SaddleGapInput>;

    explicit GapEvaluator(Kind kind) : kind_(std::move(kind)) {}

    double operator()(double beta) const;
    const Kind& kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

enum class Verdict { SummablePlateau, Diverging, Inconclusive };

std::string to_string(Verdict v);

struct MonitorReport {
    std::string name;
    std::vector<double> summands;
    std::vector<double> partial_sums;
    Verdict verdict = Verdict::Inconclusive;
    /// Geometric extrapolation of the remaining tail; +infinity when diverging.
    double tail_estimate = 0.0;
};

/// Classifies the partial sums of a nonnegative series.
///
/// Plateau when the sums are all zero or the last-decade increment is below
/// plateau_relative times the sum, or when decade increments shrink by at least
/// half. Diverging when decade increments shrink by less than 10%. Decades use
/// factor 10 for N >= 100 and factor 2 below.
MonitorReport make_monitor(std::string name, std::vector<double> summands,
                           const Tolerances& tol = default_tolerances());

/// Partial sums of lambda_n beta_n gap(beta_n) for n = 1..horizon.
MonitorReport series_check(const GapEvaluator& gap, const ParameterSchedule& sched,
                           std::size_t horizon, const Tolerances& tol = default_tolerances());

struct FejerReport {
    MonitorReport distance_increase;  // sum [a_n - a_{n-1}]_+, a_n = |x_n - anchor|^2
    MonitorReport step_squares;       // sum |x_n - x_{n-1}|^2
    MonitorReport step_over_beta;     // sum |x_{n+1} - x_n| / beta_n
    MonitorReport inertial_error;     // sum 2 alpha |x_n - x_{n-1}|^2
};

/// Throws ValidationError for traces shorter than 3 rows.
FejerReport fejer_monitor(const IterationTrace& trace, const Vector& anchor, double alpha,
                          const Tolerances& tol = default_tolerances());

}  // namespace bep
