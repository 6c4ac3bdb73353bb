#include <gtest/gtest.h>

#include <random>

#include "bep/resolvent.hpp"
#include "oracles.hpp"

using namespace bep;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

const BifunctionSpec& lower() {
    static const auto f = BifunctionSpec::difference(ConvexPiece::affine_squared(v2(1, 1), 4.0, 0.25));
    return f;
}
const BifunctionSpec& upper() {
    static const auto g = BifunctionSpec::difference(ConvexPiece::affine_squared(v2(1, -1), 2.0, 0.25));
    return g;
}
const ConstraintSet& plane() {
    static const auto k = ConstraintSet::whole_space(2);
    return k;
}

ConstraintSet unit_product() {
    return ConstraintSet::product({ConstraintSet::box(Vector::Zero(1), Vector::Ones(1)),
                                   ConstraintSet::box(Vector::Zero(1), Vector::Ones(1))});
}

AffineMap identity1() { return {Matrix::Identity(1, 1), Vector::Zero(1)}; }

}  // namespace

TEST(ResolveDifference, UnitParameters) {
    const Vector z = resolve_difference({lower(), upper(), plane(), 1.0, 1.0, v2(0, 0.5)});
    EXPECT_LE((z - v2(1.5, 0.75)).norm(), 1e-12);
}

TEST(ResolveDifference, StationaryAnchor) {
    for (double lambda : {0.01, 1.0, 40.0}) {
        for (double beta : {0.0, 3.0, 1e4}) {
            const Vector z = resolve_difference({lower(), upper(), plane(), lambda, beta, v2(3, 1)});
            EXPECT_LE((z - v2(3, 1)).norm(), 1e-12);
        }
    }
}

TEST(ResolveDifference, ZeroPiecesProject) {
    const auto zero = BifunctionSpec::zero(2);
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const Vector z = resolve_difference({zero, zero, box, 2.0, 5.0, v2(3, -2)});
    EXPECT_EQ(z, v2(1, 0));
}

TEST(ResolveDifference, MatchesLinearSolveAndGrid) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> L(0.1, 5.0), B(0.0, 10.0), Y(-5, 5);
    for (int i = 0; i < 25; ++i) {
        const double lambda = L(rng), beta = B(rng);
        const oracle::Vec2 y(Y(rng), Y(rng));
        const Vector z = resolve_difference({lower(), upper(), plane(), lambda, beta, y});
        EXPECT_LE((z - oracle::two_quadratic_resolvent(lambda, beta, y)).norm(), 1e-10);
        const auto grid = oracle::zoom_argmin(
            [&](const oracle::Vec2& x) {
                return lambda * (beta * oracle::psi(x) + oracle::phi(x)) + 0.5 * (x - y).squaredNorm();
            },
            y, 8.0);
        EXPECT_LE((grid - z).cwiseAbs().maxCoeff(), 2e-3);
    }
}

TEST(ResolveDifference, SwappedPenalizationWeightsUpperLevel) {
    const Vector y = v2(0.4, -1.0);
    ResolventProblem p{lower(), upper(), plane(), 0.8, 3.0, y, true};
    const Vector z = resolve(p);
    EXPECT_LE((z - oracle::two_quadratic_resolvent(0.8, 1.0, y, 1.0, 3.0)).norm(), 1e-12);
}

TEST(ResolveDifference, VanishingPenaltyIsUpperOnlyResolvent) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> Y(-5, 5);
    const auto none = BifunctionSpec::zero(2);
    for (int i = 0; i < 50; ++i) {
        const Vector y = v2(Y(rng), Y(rng));
        const Vector with_f = resolve({lower(), upper(), plane(), 1.3, 0.0, y});
        const Vector g_only = resolve({none, upper(), plane(), 1.3, 0.0, y});
        EXPECT_LE((with_f - g_only).norm(), 1e-12);
    }
}

TEST(ResolveDifference, NonexpansiveInAnchor) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> Y(-5, 5);
    for (int i = 0; i < 50; ++i) {
        const Vector a = v2(Y(rng), Y(rng)), b = v2(Y(rng), Y(rng));
        const Vector za = resolve_difference({lower(), upper(), plane(), 2.0, 4.0, a});
        const Vector zb = resolve_difference({lower(), upper(), plane(), 2.0, 4.0, b});
        EXPECT_LE((za - zb).norm(), (a - b).norm() + 1e-12);
    }
}

TEST(ResolveGradient, IdentityField) {
    const auto g = BifunctionSpec::gradient(
        ConvexPiece::quadratic(Matrix::Identity(2, 2), v2(0, 0), 0.0), 1.0);
    const Vector z = resolve_gradient({BifunctionSpec::zero(2), g, plane(), 1.0, 1.0, v2(2, 0)}, {});
    EXPECT_LE((z - v2(1, 0)).norm(), 1e-9);
}

TEST(ResolveGradient, MatchesCoupledLinearSolve) {
    const auto g = BifunctionSpec::gradient(ConvexPiece::affine_squared(v2(1, -1), 2.0, 0.25), 0.0);
    const Vector y = v2(0, 0.5);
    const Vector z = resolve_gradient({lower(), g, plane(), 0.5, 1.0, y}, {});
    // the gradient field of phi gives the same stationarity system as the difference form
    EXPECT_LE((z - oracle::two_quadratic_resolvent(0.5, 1.0, y)).norm(), 1e-8);
}

TEST(ResolveGradient, StationaryAnchorAndUniqueness) {
    const auto g = BifunctionSpec::gradient(
        ConvexPiece::quadratic(Matrix::Identity(2, 2), v2(-3, -1), 5.0), 1.0);
    const ResolventProblem p{lower(), g, plane(), 0.9, 2.0, v2(3, 1)};
    EXPECT_LE((resolve_gradient(p, {}) - v2(3, 1)).norm(), 1e-10);

    const ResolventProblem q{lower(), g, plane(), 0.9, 2.0, v2(-2, 4)};
    const InnerSolverConfig cfg;
    const Vector a = resolve_gradient(q, cfg, v2(10, 10));
    const Vector b = resolve_gradient(q, cfg, v2(-10, 3));
    EXPECT_LE((a - b).norm(), 10 * cfg.tolerance);
    EXPECT_GE(vi_residual(q, a, 32, 42), -1e-6);
}

TEST(ResolveGradient, BudgetExhaustionReportsNonconvergence) {
    const auto g = BifunctionSpec::gradient(
        ConvexPiece::quadratic(Matrix::Identity(2, 2), v2(0, 0), 0.0), 1.0);
    InnerSolverConfig cfg;
    cfg.max_iterations = 3;
    EXPECT_THROW(resolve_gradient({lower(), g, plane(), 1.9, 5.0, v2(7, -3)}, cfg), NonconvergedError);
}

TEST(ResolveSaddle, VanishingDataProjects) {
    const AffineMap zero{Matrix::Zero(1, 1), Vector::Zero(1)};
    const auto f = BifunctionSpec::saddle(SaddleFunction::weighted_square());
    const auto g = BifunctionSpec::operator_pair(zero, zero);
    const Vector z = resolve_saddle({f, g, unit_product(), 1.0, 0.0, v2(1.7, -0.3)}, {});
    EXPECT_LE((z - v2(1, 0)).norm(), 1e-12);
}

TEST(ResolveSaddle, WeightedSquareMatchesGridMerit) {
    const auto f = BifunctionSpec::saddle(SaddleFunction::weighted_square());
    const auto g = BifunctionSpec::operator_pair(identity1(), identity1());
    const oracle::Vec2 anchor(0.5, 0.5);
    const auto K = unit_product();
    const ResolventProblem p{f, g, K, 1.0, 1.0, anchor};
    const Vector z = resolve_saddle(p, {});
    const auto grid = oracle::grid_argmin(
        [&](const oracle::Vec2& c) { return -oracle::saddle_merit(c, anchor, 1.0, 1.0); },
        oracle::Vec2(0.5, 0.5), 0.5, 1e-3);
    EXPECT_LE((grid - z).cwiseAbs().maxCoeff(), 2e-3);
    EXPECT_NEAR(oracle::saddle_merit(z, anchor, 1.0, 1.0), 0.0, 1e-9);
    EXPECT_GE(vi_residual(p, z, 64, 42), -1e-6);
}

TEST(ResolveSaddle, SolutionPointIsFixed) {
    // (0, 0) solves both levels and A, B vanish there
    const auto f = BifunctionSpec::saddle(SaddleFunction::weighted_square());
    const auto g = BifunctionSpec::operator_pair(identity1(), identity1());
    for (double beta : {0.0, 1.0, 100.0}) {
        const Vector z = resolve_saddle({f, g, unit_product(), 0.7, beta, v2(0, 0)}, {});
        EXPECT_LE(z.norm(), 1e-12);
    }
}

TEST(ResolveSaddle, BilinearAgreesFromDifferentStarts) {
    const auto f = BifunctionSpec::saddle(SaddleFunction::bilinear(
        (Matrix(1, 1) << 1.0).finished(), Vector::Constant(1, -0.5), Vector::Constant(1, 0.25)));
    const auto g = BifunctionSpec::operator_pair(identity1(), identity1());
    const auto K = unit_product();
    const ResolventProblem p{f, g, K, 0.5, 2.0, v2(0.8, 0.1)};
    const InnerSolverConfig cfg;
    const Vector a = resolve_saddle(p, cfg, v2(0, 0));
    const Vector b = resolve_saddle(p, cfg, v2(1, 1));
    EXPECT_LE((a - b).norm(), 10 * cfg.tolerance);
    EXPECT_GE(vi_residual(p, a, 64, 3), -1e-6);
}

TEST(Resolve, UnsupportedPairingThrows) {
    const auto g = BifunctionSpec::operator_pair(identity1(), identity1());
    EXPECT_THROW(resolve({lower(), g, plane(), 1.0, 1.0, v2(0, 0)}), UnsupportedError);
    EXPECT_FALSE(is_supported_pairing(g, lower()));
}

TEST(ViResidual, ZeroBifunctionsAtAnchor) {
    const auto none = BifunctionSpec::zero(2);
    EXPECT_EQ(vi_residual({none, none, plane(), 1.0, 1.0, v2(1, 2)}, v2(1, 2), 32, 42), 0.0);
}

TEST(ViResidual, DetectsPerturbation) {
    const ResolventProblem p{lower(), upper(), plane(), 1.0, 2.0, v2(0, 0.5)};
    const Vector z = resolve(p);
    EXPECT_GE(vi_residual(p, z, 32, 42), -1e-8);
    EXPECT_LT(vi_residual(p, z + v2(0.1, 0), 32, 42), 0.0);
}
