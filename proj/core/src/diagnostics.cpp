#include "bep/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "bep/prox.hpp"
#include "overloaded.hpp"

namespace bep {

using detail::overloaded;

namespace {

bool in_range(const Matrix& Q, const Vector& w, const Tolerances& tol) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Q);
    const Vector back = Q * cod.solve(w);
    return (back - w).norm() <= 1e3 * tol.support_membership * std::max(1.0, w.norm());
}

// sup over y in K of <u, y> - psi(y), by a multiscale grid on [-box, box]^d.
// Each level keeps 41 points per axis and zooms onto +-2 steps around the best
// point until the step reaches tol.conjugate_step.
double grid_conjugate(const ConvexPiece& psi, const Vector& u, const ConstraintSet& K,
                      const Tolerances& tol) {
    const Index d = u.size();
    constexpr int kPoints = 41;
    Vector center = Vector::Zero(d);
    double half = tol.conjugate_box;
    double best = -kInfinity;
    Vector best_point = center;
    while (true) {
        const double step = 2.0 * half / (kPoints - 1);
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        while (true) {
            Vector y(d);
            for (Index i = 0; i < d; ++i) y[i] = center[i] - half + step * idx[static_cast<std::size_t>(i)];
            const Vector yk = project(K, y);
            const double value = u.dot(yk) - evaluate(psi, yk);
            if (value > best) {
                best = value;
                best_point = yk;
            }
            Index axis = 0;
            while (axis < d && ++idx[static_cast<std::size_t>(axis)] == kPoints) {
                idx[static_cast<std::size_t>(axis)] = 0;
                ++axis;
            }
            if (axis == d) break;
        }
        if (step <= tol.conjugate_step) break;
        center = best_point;
        half = 2.0 * step;
    }
    return best;
}

}  // namespace

double conjugate(const ConvexPiece& psi, const Vector& u, const ConstraintSet& K,
                 const Tolerances& tol) {
    require_dim(psi.dim(), u.size(), "conjugate");
    require_dim(psi.dim(), K.dim(), "conjugate domain");
    if (!K.is<WholeSpace>()) return grid_conjugate(psi, u, K, tol);
    const double scale = std::max(1.0, u.norm());
    return std::visit(
        overloaded{
            [&](const ZeroPiece&) { return u.norm() <= tol.support_membership ? 0.0 : kInfinity; },
            [&](const QuadraticPiece& q) {
                const Vector w = u - q.b;
                if (!in_range(q.Q, w, tol)) return kInfinity;
                Eigen::CompleteOrthogonalDecomposition<Matrix> cod(q.Q);
                return 0.5 * w.dot(cod.solve(w)) - q.c;
            },
            [&](const AffineSquaredPiece& a) {
                const double t = u.dot(a.a) / a.a.squaredNorm();
                if ((u - t * a.a).norm() > tol.support_membership * scale) return kInfinity;
                if (a.weight == 0.0) return std::abs(t) <= tol.support_membership ? 0.0 : kInfinity;
                return t * a.r + t * t / (4.0 * a.weight);
            },
            [&](const HalfSquaredDistancePiece& h) {
                return support(h.target, u, tol) + 0.5 * u.squaredNorm();
            },
            [&](const IndicatorPiece& ind) { return support(ind.set, u, tol); },
            [&](const SumPiece&) { return grid_conjugate(psi, u, K, tol); },
        },
        psi.kind());
}

double gap_difference(const ConvexPiece& psi, const ConstraintSet& M, const Vector& p, double beta,
                      const ConstraintSet& K, const Tolerances& tol) {
    require_dim(psi.dim(), p.size(), "gap_difference p");
    require_dim(psi.dim(), M.dim(), "gap_difference M");
    if (!(beta > 0.0)) throw ValidationError("gap_difference: beta must be positive");
    // min psi over K = -psi^*(0)
    const double minimum = -conjugate(psi, Vector::Zero(p.size()), K, tol);
    if (!(std::abs(minimum) <= tol.normalization)) {
        throw ValidationError("gap_difference: psi must be normalized to min 0 over K (min is " +
                              std::to_string(minimum) + ")");
    }
    if (p.isZero(0.0)) return 0.0;
    const Vector u = (2.0 / beta) * p;
    if (psi.is<HalfSquaredDistancePiece>() && K.is<WholeSpace>()) {
        const double st = support(psi.as<HalfSquaredDistancePiece>().target, u, tol);
        const double sm = support(M, u, tol);
        if (std::isinf(st) && std::isinf(sm)) return 0.5 * u.squaredNorm();
        return 0.5 * u.squaredNorm() + st - sm;
    }
    const double conj = conjugate(psi, u, K, tol);
    const double sigma = support(M, u, tol);
    if (std::isinf(conj) && std::isinf(sigma)) return kInfinity;
    return conj - sigma;
}

SaddleGap gap_saddle(const SaddleFunction& L, const ConstraintSet& U, const ConstraintSet& V,
                     const ConstraintSet& solution_set, const Vector& u, const Vector& v,
                     const Vector& p, const Vector& q, double beta) {
    require_dim(L.u_dim(), U.dim(), "gap_saddle U");
    require_dim(L.v_dim(), V.dim(), "gap_saddle V");
    require_dim(L.u_dim(), u.size(), "gap_saddle u");
    require_dim(L.v_dim(), v.size(), "gap_saddle v");
    require_dim(L.u_dim(), p.size(), "gap_saddle p");
    require_dim(L.v_dim(), q.size(), "gap_saddle q");
    require_dim(L.u_dim() + L.v_dim(), solution_set.dim(), "gap_saddle S_f");
    if (!(beta > 0.0)) throw ValidationError("gap_saddle: beta must be positive");

    SaddleGap out;
    if (p.isZero(0.0) && q.isZero(0.0)) return out;
    const Vector wp = (2.0 / beta) * p;
    const Vector wq = (2.0 / beta) * q;
    Vector w(wp.size() + wq.size());
    w << wp, wq;
    const double sigma = support(solution_set, w);

    std::visit(
        overloaded{
            [&](const BilinearSaddle& b) {
                const double minus_l_conj = b.c.dot(u) + support(V, wq + b.C.transpose() * u + b.d);
                const double l_conj = support(U, wp - b.C * v - b.c) - b.d.dot(v);
                out.value = minus_l_conj + l_conj - sigma;
            },
            [&](const WeightedSquareSaddle&) {
                const double curvature = 1.0 + v[0];
                if (!(curvature > 0.0)) {
                    throw ValidationError("gap_saddle: u^2 (1 + v) is not convex in u at v <= -1");
                }
                const double uu = u[0] * u[0];
                const double minus_l_conj =
                    uu + support(V, Vector::Constant(1, wq[0] + uu));
                // sup over s in U of wp s - (1 + v) s^2
                const double interior = wp[0] / (2.0 * curvature);
                const double s = project(U, Vector::Constant(1, interior))[0];
                out.boundary_regime = s != interior;
                const double l_conj = wp[0] * s - curvature * s * s;
                out.value = minus_l_conj + l_conj - sigma;
            },
        },
        L.kind());
    return out;
}

double GapEvaluator::operator()(double beta) const {
    return std::visit(
        overloaded{
            [&](const DifferenceGap& d) { return gap_difference(d.psi, d.argmin, d.p, beta, d.K); },
            [&](const SaddleGapInput& s) {
                return gap_saddle(s.L, s.U, s.V, s.solution_set, s.u, s.v, s.p, s.q, beta).value;
            },
        },
        kind_);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::SummablePlateau: return "summable-plateau";
        case Verdict::Diverging: return "diverging";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

MonitorReport make_monitor(std::string name, std::vector<double> summands, const Tolerances& tol) {
    MonitorReport report;
    report.name = std::move(name);
    report.summands = std::move(summands);
    report.partial_sums.reserve(report.summands.size());
    double running = 0.0;
    for (double s : report.summands) {
        running += s;
        report.partial_sums.push_back(running);
    }
    const std::size_t n = report.partial_sums.size();
    if (n == 0) return report;

    const double total = report.partial_sums.back();
    if (!std::isfinite(total)) {
        report.verdict = Verdict::Diverging;
        report.tail_estimate = kInfinity;
        return report;
    }
    if (total == 0.0) {
        report.verdict = Verdict::SummablePlateau;
        return report;
    }

    const std::size_t factor = n >= 100 ? 10 : 2;
    auto sum_at = [&](std::size_t k) { return k == 0 ? 0.0 : report.partial_sums[k - 1]; };
    const std::size_t mid = n / factor;
    const std::size_t early = mid / factor;
    const double last = total - sum_at(mid);
    const double previous = sum_at(mid) - sum_at(early);
    const double ratio = previous > 0.0 ? last / previous : (last > 0.0 ? kInfinity : 0.0);

    report.tail_estimate = ratio < 1.0 ? last * ratio / (1.0 - ratio) : kInfinity;
    if (last <= tol.plateau_relative * std::abs(total) || ratio <= 0.5) {
        report.verdict = Verdict::SummablePlateau;
    } else if (ratio >= 0.9) {
        report.verdict = Verdict::Diverging;
    } else {
        report.verdict = Verdict::Inconclusive;
    }
    return report;
}

MonitorReport series_check(const GapEvaluator& gap, const ParameterSchedule& sched,
                           std::size_t horizon, const Tolerances& tol) {
    std::vector<double> summands;
    summands.reserve(horizon);
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double beta = sched.beta_at(n);
        summands.push_back(sched.lambda_at(n) * beta * gap(beta));
    }
    return make_monitor("geometric_condition", std::move(summands), tol);
}

FejerReport fejer_monitor(const IterationTrace& trace, const Vector& anchor, double alpha,
                          const Tolerances& tol) {
    if (trace.rows.size() < 3) {
        throw ValidationError("fejer_monitor: trace needs at least 3 rows, got " +
                              std::to_string(trace.rows.size()));
    }
    const auto xs = trace.iterates();
    std::vector<double> increase, squares, over_beta, inertial;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double a_now = (xs[k] - anchor).squaredNorm();
        const double a_before = (xs[k - 1] - anchor).squaredNorm();
        const double delta = (xs[k] - xs[k - 1]).squaredNorm();
        increase.push_back(std::max(0.0, a_now - a_before));
        squares.push_back(delta);
        inertial.push_back(2.0 * alpha * delta);
    }
    for (const auto& row : trace.rows) {
        over_beta.push_back(row.beta > 0.0 ? row.step_norm / row.beta : 0.0);
    }
    return FejerReport{
        make_monitor("distance_increase", std::move(increase), tol),
        make_monitor("step_squares", std::move(squares), tol),
        make_monitor("step_over_beta", std::move(over_beta), tol),
        make_monitor("inertial_error", std::move(inertial), tol),
    };
}

}  // namespace bep
