#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bep/diagnostics.hpp"

using namespace bep;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

ConstraintSet line(double a1, double a2, double r) {
    Matrix A(1, 2);
    A << a1, a2;
    return ConstraintSet::affine(A, Vector::Constant(1, r));
}

// sup of <u, y> - psi(y) over y in K intersected with [-20, 20]^2, by a 0.1
// grid followed by two zooms down to 1e-3.
double grid_conjugate(const std::function<double(const Vector&)>& psi, const Vector& u,
                      const std::function<bool(const Vector&)>& in_k = {}) {
    double best = -1e300;
    Vector c = Vector::Zero(2);
    double half = 20.0;
    for (double step : {0.1, 0.01, 0.001}) {
        const int count = static_cast<int>(std::lround(2 * half / step));
        Vector arg = c;
        for (int i = 0; i <= count; ++i) {
            for (int j = 0; j <= count; ++j) {
                const Vector y = v2(c[0] - half + i * step, c[1] - half + j * step);
                if (in_k && !in_k(y)) continue;
                const double v = u.dot(y) - psi(y);
                if (v > best) best = v, arg = y;
            }
        }
        c = arg;
        half = 10 * step;
    }
    return best;
}

IterationTrace trace_of(const std::vector<Vector>& xs) {
    IterationTrace t;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        TraceRow r;
        r.n = i + 1;
        r.x = xs[i];
        r.next = xs[i + 1];
        r.beta = 2.0 + static_cast<double>(i);
        r.step_norm = (xs[i + 1] - xs[i]).norm();
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace

TEST(GapDifference, HalfSquaredDistance) {
    const auto M = line(1, 1, 4);
    const auto psi = ConvexPiece::half_squared_distance(M);
    EXPECT_NEAR(gap_difference(psi, M, v2(1, 0), 2.0), 0.5, 1e-14);
    EXPECT_EQ(gap_difference(psi, M, v2(0, 0), 2.0), 0.0);
}

TEST(GapDifference, AffineSquaredMatchesGrid) {
    const auto psi = ConvexPiece::affine_squared(v2(1, 1), 4.0, 0.25);
    const double gap = gap_difference(psi, line(1, 1, 4), v2(1, 1), 4.0);
    EXPECT_NEAR(gap, 0.25, 1e-12);
    const Vector u = v2(0.5, 0.5);
    const double reference =
        grid_conjugate([](const Vector& y) { return 0.25 * std::pow(y[0] + y[1] - 4, 2); }, u) - u.dot(v2(2, 2));
    EXPECT_NEAR(gap, reference, 1e-4);
}

TEST(GapDifference, UnnormalizedPieceRejected) {
    const auto psi = ConvexPiece::quadratic(Matrix::Identity(2, 2), v2(0, 0), 1.0);
    EXPECT_THROW(gap_difference(psi, ConstraintSet::box(v2(0, 0), v2(0, 0)), v2(1, 0), 1.0),
                 ValidationError);
}

TEST(GapDifference, CatalogClosedFormsMatchGridOracle) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> T(0.0, 2.0), B(1.0, 8.0), S(-2.0, 2.0);
    const auto hsd_box_target = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const Vector c = v2(0.5, -1.0);
    for (int i = 0; i < 50; ++i) {
        const double beta = B(rng);
        {  // affine squared, p normal to its zero line
            const double t = S(rng);
            const Vector p = t * v2(1, 1);
            const Vector u = (2 / beta) * p;
            const double ref = grid_conjugate([](const Vector& y) { return 0.25 * std::pow(y[0] + y[1] - 4, 2); }, u) -
                               4 * (u[0] + u[1]) / 2;
            EXPECT_NEAR(gap_difference(ConvexPiece::affine_squared(v2(1, 1), 4, 0.25), line(1, 1, 4), p, beta), ref, 1e-4);
        }
        {  // half squared distance to a box, p in the normal cone at the corner (1, 1)
            const Vector p = v2(T(rng), T(rng));
            const Vector u = (2 / beta) * p;
            const double ref = grid_conjugate(
                                   [&](const Vector& y) {
                                       const Vector d = y - y.cwiseMax(0.0).cwiseMin(1.0);
                                       return 0.5 * d.squaredNorm();
                                   },
                                   u) -
                               (std::max(u[0], 0.0) + std::max(u[1], 0.0));
            EXPECT_NEAR(gap_difference(ConvexPiece::half_squared_distance(hsd_box_target), hsd_box_target, p, beta),
                        ref, 1e-4);
        }
        {  // strongly convex quadratic with a single minimizer c
            const Vector p = v2(S(rng), S(rng));
            const Vector u = (2 / beta) * p;
            const auto psi = ConvexPiece::quadratic(Matrix::Identity(2, 2), -c, 0.5 * c.squaredNorm());
            const double ref = grid_conjugate([&](const Vector& y) { return 0.5 * (y - c).squaredNorm(); }, u) - u.dot(c);
            EXPECT_NEAR(gap_difference(psi, ConstraintSet::box(c, c), p, beta), ref, 1e-4);
            EXPECT_GE(gap_difference(psi, ConstraintSet::box(c, c), p, beta), -1e-10);
        }
    }
}

TEST(Conjugate, GridFallbackOnConstrainedDomain) {
    const auto K = ConstraintSet::box(v2(0, 0), v2(3, 3));
    const auto psi = ConvexPiece::affine_squared(v2(1, 1), 4.0, 0.25);
    const Vector u = v2(0.7, -0.2);
    const double ref = grid_conjugate([](const Vector& y) { return 0.25 * std::pow(y[0] + y[1] - 4, 2); }, u,
                                      [](const Vector& y) { return y.minCoeff() >= 0 && y.maxCoeff() <= 3; });
    EXPECT_NEAR(conjugate(psi, u, K), ref, 1e-4);
}

TEST(GapSaddle, InteriorFormula) {
    const auto L = SaddleFunction::weighted_square();
    const auto unit = ConstraintSet::box(Vector::Zero(1), Vector::Ones(1));
    const auto S = ConstraintSet::box(v2(0, 0), v2(0, 1));
    const auto g = gap_saddle(L, unit, unit, S, Vector::Zero(1), Vector::Zero(1), Vector::Constant(1, 2.0),
                              Vector::Constant(1, -1.0), 2.0);
    EXPECT_NEAR(g.value, 1.0, 1e-14);
    EXPECT_FALSE(g.boundary_regime);
    for (double v : {0.0, 0.3, 1.0}) {
        for (double beta : {2.0, 5.0, 40.0}) {
            const double p = 1.5;
            const auto r = gap_saddle(L, unit, unit, S, Vector::Zero(1), Vector::Constant(1, v),
                                      Vector::Constant(1, p), Vector::Zero(1), beta);
            if (!r.boundary_regime) EXPECT_NEAR(r.value, p * p / ((1 + v) * beta * beta), 1e-14);
        }
    }
}

TEST(GapSaddle, ZeroDirectionAndPositiveQ) {
    const auto L = SaddleFunction::weighted_square();
    const auto unit = ConstraintSet::box(Vector::Zero(1), Vector::Ones(1));
    const auto S = ConstraintSet::box(v2(0, 0), v2(0, 1));
    const Vector zero = Vector::Zero(1);
    EXPECT_EQ(gap_saddle(L, unit, unit, S, zero, zero, zero, zero, 3.0).value, 0.0);
    // at v = 1 the normal cone of S allows q > 0; the q terms cancel
    const Vector one = Vector::Ones(1);
    const auto with_q = gap_saddle(L, unit, unit, S, zero, one, Vector::Constant(1, 0.5), Vector::Constant(1, 0.8), 4.0);
    const auto without_q = gap_saddle(L, unit, unit, S, zero, one, Vector::Constant(1, 0.5), zero, 4.0);
    EXPECT_NEAR(with_q.value, without_q.value, 1e-15);
}

TEST(GapSaddle, BoundaryRegimeIsFlagged) {
    const auto L = SaddleFunction::weighted_square();
    const auto unit = ConstraintSet::box(Vector::Zero(1), Vector::Ones(1));
    const auto S = ConstraintSet::box(v2(0, 0), v2(0, 1));
    const auto r = gap_saddle(L, unit, unit, S, Vector::Zero(1), Vector::Zero(1), Vector::Constant(1, 4.0),
                              Vector::Zero(1), 1.0);
    EXPECT_TRUE(r.boundary_regime);
    // clamped at s = 1: 8 s - s^2
    EXPECT_NEAR(r.value, 7.0, 1e-14);
    EXPECT_LT(r.value, 16.0);
}

TEST(GapSaddle, BilinearClosedForm) {
    const auto L = SaddleFunction::bilinear((Matrix(1, 1) << 1.0).finished(), Vector::Zero(1), Vector::Zero(1));
    const auto unit = ConstraintSet::box(-Vector::Ones(1), Vector::Ones(1));
    const auto S = ConstraintSet::box(v2(0, 0), v2(0, 0));
    const Vector zero = Vector::Zero(1);
    // sup_t (2q/b) t + sup_s (2p/b) s over [-1, 1]
    const auto r = gap_saddle(L, unit, unit, S, zero, zero, Vector::Constant(1, 1.0), Vector::Constant(1, -2.0), 4.0);
    EXPECT_NEAR(r.value, 0.5 + 1.0, 1e-14);
}

TEST(SeriesCheck, HalfSquaredDistanceWithLinearPenalty) {
    const auto M = line(1, 1, 4);
    const GapEvaluator gap(DifferenceGap{ConvexPiece::half_squared_distance(M), M, ConstraintSet::whole_space(2),
                                         v2(1, 1) / std::sqrt(2.0)});
    ParameterSchedule sched;
    std::vector<double> betas;
    for (int n = 1; n <= 1000; ++n) betas.push_back(n);
    sched.beta_override = betas;
    const auto report = series_check(gap, sched, 1000);
    EXPECT_NEAR(report.partial_sums.back(), std::numbers::pi * std::numbers::pi / 3, 1e-2);
    EXPECT_EQ(report.verdict, Verdict::SummablePlateau);
    for (std::size_t i = 1; i < report.partial_sums.size(); ++i) {
        EXPECT_GE(report.partial_sums[i], report.partial_sums[i - 1]);
    }
}

TEST(SeriesCheck, ConstantPenaltyDiverges) {
    const auto M = line(1, 1, 4);
    const GapEvaluator gap(DifferenceGap{ConvexPiece::half_squared_distance(M), M, ConstraintSet::whole_space(2),
                                         v2(1, 1) / std::sqrt(2.0)});
    const ParameterSchedule sched{0.1, {1.0, 1.0}, {3.0, 0.0}, {}, {}};
    const auto report = series_check(gap, sched, 1000);
    EXPECT_EQ(report.verdict, Verdict::Diverging);
    EXPECT_TRUE(std::isinf(report.tail_estimate));
}

TEST(SeriesCheck, ZeroDirectionPlateaus) {
    const auto M = line(1, 1, 4);
    const GapEvaluator gap(DifferenceGap{ConvexPiece::half_squared_distance(M), M, ConstraintSet::whole_space(2), v2(0, 0)});
    const auto report = series_check(gap, ParameterSchedule{}, 100);
    EXPECT_EQ(report.verdict, Verdict::SummablePlateau);
    EXPECT_EQ(report.partial_sums.back(), 0.0);
}

TEST(Monitor, Verdicts) {
    std::vector<double> geometric, harmonic, slow;
    for (int n = 1; n <= 1000; ++n) {
        geometric.push_back(std::pow(0.5, n));
        harmonic.push_back(1.0 / n);
        slow.push_back(std::pow(n, -1.05));
    }
    EXPECT_EQ(make_monitor("g", geometric).verdict, Verdict::SummablePlateau);
    EXPECT_EQ(make_monitor("h", harmonic).verdict, Verdict::Diverging);
    EXPECT_EQ(make_monitor("s", slow).verdict, Verdict::Diverging);
    EXPECT_EQ(make_monitor("e", {}).verdict, Verdict::Inconclusive);
}

TEST(Fejer, ConstantTrace) {
    const std::vector<Vector> xs(10, v2(1, 2));
    const auto r = fejer_monitor(trace_of(xs), v2(3, 1), 0.1);
    for (const auto* m : {&r.distance_increase, &r.step_squares, &r.step_over_beta, &r.inertial_error}) {
        EXPECT_EQ(m->verdict, Verdict::SummablePlateau) << m->name;
        EXPECT_EQ(m->partial_sums.back(), 0.0);
    }
}

TEST(Fejer, GeometricallyDivergingTrace) {
    std::vector<Vector> xs;
    for (int n = 0; n < 40; ++n) xs.push_back(v2(std::pow(2.0, n), 0));
    const auto r = fejer_monitor(trace_of(xs), v2(0, 0), 0.1);
    EXPECT_EQ(r.distance_increase.verdict, Verdict::Diverging);
    EXPECT_EQ(r.step_squares.verdict, Verdict::Diverging);
}

TEST(Fejer, ShortTraceRejected) {
    EXPECT_THROW(fejer_monitor(trace_of({v2(0, 0), v2(1, 1)}), v2(0, 0), 0.1), ValidationError);
}
