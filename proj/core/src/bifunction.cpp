#include "bep/bifunction.hpp"

#include <cmath>

#include "overloaded.hpp"

namespace bep {

using detail::overloaded;

SaddleFunction SaddleFunction::bilinear(Matrix C, Vector c, Vector d) {
    require_dim(C.rows(), c.size(), "bilinear saddle u-term");
    require_dim(C.cols(), d.size(), "bilinear saddle v-term");
    if (C.size() == 0) throw ValidationError("bilinear saddle: empty coupling matrix");
    return SaddleFunction(BilinearSaddle{std::move(C), std::move(c), std::move(d)});
}

SaddleFunction SaddleFunction::weighted_square() { return SaddleFunction(WeightedSquareSaddle{}); }

Index SaddleFunction::u_dim() const noexcept {
    if (const auto* b = std::get_if<BilinearSaddle>(&kind_)) return b->C.rows();
    return 1;
}

Index SaddleFunction::v_dim() const noexcept {
    if (const auto* b = std::get_if<BilinearSaddle>(&kind_)) return b->C.cols();
    return 1;
}

double SaddleFunction::value(const Vector& u, const Vector& v) const {
    require_dim(u_dim(), u.size(), "saddle u");
    require_dim(v_dim(), v.size(), "saddle v");
    return std::visit(
        overloaded{
            [&](const BilinearSaddle& b) { return u.dot(b.C * v) + b.c.dot(u) + b.d.dot(v); },
            [&](const WeightedSquareSaddle&) { return u[0] * u[0] * (1.0 + v[0]); },
        },
        kind_);
}

Vector SaddleFunction::grad_u(const Vector& u, const Vector& v) const {
    return std::visit(
        overloaded{
            [&](const BilinearSaddle& b) -> Vector { return b.C * v + b.c; },
            [&](const WeightedSquareSaddle&) -> Vector {
                return Vector::Constant(1, 2.0 * u[0] * (1.0 + v[0]));
            },
        },
        kind_);
}

Vector SaddleFunction::grad_v(const Vector& u, const Vector&) const {
    return std::visit(
        overloaded{
            [&](const BilinearSaddle& b) -> Vector { return b.C.transpose() * u + b.d; },
            [&](const WeightedSquareSaddle&) -> Vector { return Vector::Constant(1, u[0] * u[0]); },
        },
        kind_);
}

Matrix SaddleFunction::curvature_u(const Vector& v) const {
    return std::visit(
        overloaded{
            [&](const BilinearSaddle& b) -> Matrix { return Matrix::Zero(b.C.rows(), b.C.rows()); },
            [&](const WeightedSquareSaddle&) -> Matrix {
                return Matrix::Constant(1, 1, 2.0 * (1.0 + v[0]));
            },
        },
        kind_);
}

BifunctionSpec BifunctionSpec::difference(ConvexPiece h) {
    const Index dim = h.dim();
    return BifunctionSpec(DifferenceBifunction{std::move(h)}, dim, 0);
}

BifunctionSpec BifunctionSpec::gradient(ConvexPiece potential, double modulus) {
    if (!is_smooth(potential)) {
        throw ValidationError("gradient bifunction: potential must be differentiable");
    }
    if (!(modulus >= 0.0)) throw ValidationError("gradient bifunction: modulus must be >= 0");
    const Index dim = potential.dim();
    return BifunctionSpec(GradientBifunction{std::move(potential), modulus}, dim, 0);
}

BifunctionSpec BifunctionSpec::saddle(SaddleFunction L) {
    const Index split = L.u_dim();
    const Index dim = split + L.v_dim();
    return BifunctionSpec(SaddleBifunction{std::move(L)}, dim, split);
}

BifunctionSpec BifunctionSpec::operator_pair(AffineMap A, AffineMap B) {
    for (const auto* m : {&A, &B}) {
        if (m->matrix.rows() != m->matrix.cols() || m->matrix.rows() == 0) {
            throw ValidationError("operator pair: maps must be square");
        }
        require_dim(m->matrix.rows(), m->offset.size(), "operator pair offset");
    }
    const Index split = A.matrix.rows();
    const Index dim = split + B.matrix.rows();
    return BifunctionSpec(OperatorPairBifunction{std::move(A), std::move(B)}, dim, split);
}

BifunctionSpec BifunctionSpec::zero(Index dim) { return difference(ConvexPiece::zero(dim)); }

bool BifunctionSpec::is_zero() const noexcept {
    const auto* d = std::get_if<DifferenceBifunction>(&kind_);
    return d != nullptr && d->h.is<ZeroPiece>();
}

double evaluate(const BifunctionSpec& f, const Vector& x, const Vector& y) {
    require_dim(f.dim(), x.size(), "bifunction x");
    require_dim(f.dim(), y.size(), "bifunction y");
    const Index s = f.block_split();
    return std::visit(
        overloaded{
            [&](const DifferenceBifunction& d) { return evaluate(d.h, y) - evaluate(d.h, x); },
            [&](const GradientBifunction& g) { return gradient(g.potential, x).dot(y - x); },
            [&](const SaddleBifunction& sb) {
                const Index t = f.dim() - s;
                return sb.L.value(y.head(s), x.tail(t)) - sb.L.value(x.head(s), y.tail(t));
            },
            [&](const OperatorPairBifunction& op) {
                const Index t = f.dim() - s;
                const Vector u1 = x.head(s), v1 = x.tail(t);
                return op.A(u1).dot(y.head(s) - u1) + op.B(v1).dot(y.tail(t) - v1);
            },
        },
        f.kind());
}

MonotonicityReport check_monotone(const BifunctionSpec& f, const ConstraintSet& K,
                                  const Tolerances& tol) {
    require_dim(f.dim(), K.dim(), "monotonicity domain");
    const double modulus = f.is<GradientBifunction>() ? f.as<GradientBifunction>().modulus : 0.0;
    std::mt19937_64 rng(tol.seed);
    MonotonicityReport report;
    report.worst = -kInfinity;
    for (std::size_t i = 0; i < tol.monotonicity_samples; ++i) {
        const Vector x = sample_point(K, rng, tol.sample_radius);
        const Vector y = sample_point(K, rng, tol.sample_radius);
        const double fxy = evaluate(f, x, y);
        const double fyx = evaluate(f, y, x);
        const double excess = fxy + fyx + modulus * (x - y).squaredNorm();
        const double scale = std::max(1.0, std::abs(fxy) + std::abs(fyx));
        report.worst = std::max(report.worst, excess);
        report.worst_diagonal = std::max(report.worst_diagonal, std::abs(evaluate(f, x, x)));
        if (!(excess <= tol.monotonicity_slack * scale)) report.monotone = false;
    }
    if (report.worst_diagonal != 0.0) report.monotone = false;
    return report;
}

bool check_convex_concave(const SaddleFunction& L, const ConstraintSet& U, const ConstraintSet& V,
                          const Tolerances& tol) {
    require_dim(L.u_dim(), U.dim(), "saddle U");
    require_dim(L.v_dim(), V.dim(), "saddle V");
    std::mt19937_64 rng(tol.seed);
    for (std::size_t i = 0; i < tol.monotonicity_samples; ++i) {
        const Vector u1 = sample_point(U, rng, tol.sample_radius);
        const Vector u2 = sample_point(U, rng, tol.sample_radius);
        const Vector v1 = sample_point(V, rng, tol.sample_radius);
        const Vector v2 = sample_point(V, rng, tol.sample_radius);
        const Vector um = 0.5 * (u1 + u2), vm = 0.5 * (v1 + v2);
        const double convex_gap = 0.5 * (L.value(u1, v1) + L.value(u2, v1)) - L.value(um, v1);
        const double concave_gap = L.value(u1, vm) - 0.5 * (L.value(u1, v1) + L.value(u1, v2));
        if (convex_gap < -tol.convex_concave_slack || concave_gap < -tol.convex_concave_slack) {
            return false;
        }
    }
    return true;
}

}  // namespace bep
