#include <gtest/gtest.h>

#include <random>

#include "bep/prox.hpp"
#include "oracles.hpp"

using namespace bep;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

ConvexPiece lower_psi() { return ConvexPiece::affine_squared(v2(1, 1), 4.0, 0.25); }

ProxRequest request(const ConvexPiece& h, double w, Vector y, ConstraintSet K) {
    return ProxRequest{h, w, std::move(y), std::move(K)};
}

}  // namespace

TEST(Prox, ShrinkageOfHalfSquaredNorm) {
    const auto h = ConvexPiece::quadratic(Matrix::Identity(2, 2), v2(0, 0), 0.0);
    const Vector z = prox(request(h, 1.0, v2(2, 0), ConstraintSet::whole_space(2)));
    EXPECT_NEAR((z - v2(1, 0)).norm(), 0.0, 1e-14);
}

TEST(Prox, AffineSquaredMatchesLinearSolveAndGrid) {
    const Vector z = prox(request(lower_psi(), 2.0, v2(0, 0), ConstraintSet::whole_space(2)));
    EXPECT_NEAR(z[0], 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(z[1], 4.0 / 3.0, 1e-12);
    const auto grid = oracle::grid_argmin(
        [](const oracle::Vec2& x) { return 2.0 * oracle::psi(x) + 0.5 * x.squaredNorm(); },
        oracle::Vec2(1, 1), 2.0, 1e-3);
    EXPECT_LE(std::abs(grid[0] - z[0]), 2e-3);
    EXPECT_LE(std::abs(grid[1] - z[1]), 2e-3);
}

TEST(Prox, StationaryAnchorIsFixed) {
    const Vector z = prox(request(lower_psi(), 3.7, v2(3, 1), ConstraintSet::whole_space(2)));
    EXPECT_LE((z - v2(3, 1)).norm(), 1e-12);
}

TEST(Prox, IndicatorIsProjection) {
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const Vector z = prox(request(ConvexPiece::indicator(box), 1.0, v2(1.5, -0.2),
                                  ConstraintSet::whole_space(2)));
    EXPECT_EQ(z, v2(1, 0));
}

TEST(Prox, HalfSquaredDistanceClosedForm) {
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const Vector y = v2(3, 0.5);
    const Vector z = prox(request(ConvexPiece::half_squared_distance(box), 1.0, y,
                                  ConstraintSet::whole_space(2)));
    EXPECT_LE((z - v2(2, 0.5)).norm(), 1e-14);
}

TEST(Prox, BoxConstrainedQuadraticMatchesGrid) {
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const Vector y = v2(2.5, -1.0);
    const Vector z = prox(request(lower_psi(), 0.7, y, box));
    const auto grid = oracle::grid_argmin(
        [&](const oracle::Vec2& x) { return 0.7 * oracle::psi(x) + 0.5 * (x - y).squaredNorm(); },
        oracle::Vec2(0.5, 0.5), 0.5, 1e-3);
    EXPECT_LE(std::abs(grid[0] - z[0]), 2e-3);
    EXPECT_LE(std::abs(grid[1] - z[1]), 2e-3);
}

TEST(Prox, QuadraticOnAffineDomain) {
    Matrix A(1, 2);
    A << 1, -1;
    const auto line = ConstraintSet::affine(A, Vector::Constant(1, 2.0));
    const Vector z = prox(request(lower_psi(), 1e6, v2(0, 0), line));
    // nearly the intersection of x1 - x2 = 2 with x1 + x2 = 4
    EXPECT_LE((z - v2(3, 1)).norm(), 1e-5);
    EXPECT_NEAR(z[0] - z[1], 2.0, 1e-12);
}

TEST(Prox, ResidualSignsCorrectAndPerturbedPoints) {
    const auto req = request(lower_psi(), 2.0, v2(0, 0), ConstraintSet::whole_space(2));
    const Vector z = prox(req);
    EXPECT_GE(prox_residual(req, z, 64), -1e-8);
    EXPECT_LT(prox_residual(req, z + v2(0.1, 0), 64), -1e-4);
    const auto zero = request(ConvexPiece::zero(2), 1.0, v2(1, 2), ConstraintSet::whole_space(2));
    EXPECT_EQ(prox_residual(zero, v2(1, 2), 16), 0.0);
}

TEST(Prox, FirmNonexpansivenessOnSamples) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-5, 5);
    const auto box = ConstraintSet::box(v2(-1, -1), v2(2, 2));
    const ConvexPiece h = ConvexPiece::sum(
        {lower_psi(), ConvexPiece::affine_squared(v2(1, -1), 2.0, 0.25)});
    for (int i = 0; i < 100; ++i) {
        const Vector y1 = v2(U(rng), U(rng)), y2 = v2(U(rng), U(rng));
        for (const auto& K : {ConstraintSet::whole_space(2), box}) {
            const Vector p1 = prox(request(h, 1.5, y1, K));
            const Vector p2 = prox(request(h, 1.5, y2, K));
            EXPECT_LE((p1 - p2).norm(), (y1 - y2).norm() + 1e-10);
            // firm: |p1 - p2|^2 <= <p1 - p2, y1 - y2>
            EXPECT_LE((p1 - p2).squaredNorm(), (p1 - p2).dot(y1 - y2) + 1e-9);
        }
    }
}

TEST(Prox, VanishingWeightApproachesProjection) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(-5, 5);
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    for (int i = 0; i < 20; ++i) {
        const Vector y = v2(U(rng), U(rng));
        const Vector z = prox(request(lower_psi(), 1e-8, y, box));
        EXPECT_LE((z - project(box, y)).norm(), 1e-5);
    }
}

TEST(Prox, RandomWeightsMatchGridOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> W(0.1, 5.0), Y(-5, 5);
    for (int i = 0; i < 100; ++i) {
        const double w = W(rng);
        const oracle::Vec2 y(Y(rng), Y(rng));
        const Vector z = prox(request(lower_psi(), w, y, ConstraintSet::whole_space(2)));
        const auto grid = oracle::zoom_argmin(
            [&](const oracle::Vec2& x) { return w * oracle::psi(x) + 0.5 * (x - y).squaredNorm(); },
            y, 8.0);
        EXPECT_LE((grid - z).cwiseAbs().maxCoeff(), 2e-3) << "w " << w;
    }
}

TEST(Prox, RejectsTwoIndicators) {
    const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
    const auto h = ConvexPiece::sum({ConvexPiece::indicator(box), ConvexPiece::indicator(box)});
    EXPECT_THROW(prox(request(h, 1.0, v2(0, 0), ConstraintSet::whole_space(2))), UnsupportedError);
}

TEST(Prox, NonconvergenceReportsResidual) {
    Tolerances tight = default_tolerances();
    tight.projected_max_iterations = 2;
    const auto box = ConstraintSet::box(v2(-10, -10), v2(10, 10));
    try {
        // ill conditioned, so two projected-gradient steps cannot settle
        const Matrix Q = (Matrix(2, 2) << 1.0, 0.0, 0.0, 100.0).finished();
        prox(request(ConvexPiece::quadratic(Q, v2(1, 1), 0.0), 1.0, v2(5, -3), box), tight);
        FAIL() << "expected nonconvergence";
    } catch (const NonconvergedError& e) {
        EXPECT_GT(e.residual(), 0.0);
        EXPECT_EQ(e.iterations(), 2u);
    }
}
