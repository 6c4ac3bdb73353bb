#pragma once

#include <variant>

#include "bep/convex_piece.hpp"

namespace bep {

/// L(u, v) = u^T C v + c^T u + d^T v
struct BilinearSaddle {
    Matrix C;
    Vector c;
    Vector d;
};

/// L(u, v) = u^2 (1 + v) on scalars, convex-concave for v > -1.
struct WeightedSquareSaddle {};

/// Convex-concave function whose u-gradient is affine in u and whose v-gradient
/// does not depend on v. Both catalog kinds have this shape, which the saddle
/// resolvent exploits.
class SaddleFunction {
public:
    using Kind = std::variant<BilinearSaddle, WeightedSquareSaddle>;

    static SaddleFunction bilinear(Matrix C, Vector c, Vector d);
    static SaddleFunction weighted_square();

    const Kind& kind() const noexcept { return kind_; }
    Index u_dim() const noexcept;
    Index v_dim() const noexcept;

    double value(const Vector& u, const Vector& v) const;
    Vector grad_u(const Vector& u, const Vector& v) const;
    Vector grad_v(const Vector& u, const Vector& v) const;
    /// Hessian of L(., v); constant in u.
    Matrix curvature_u(const Vector& v) const;

private:
    explicit SaddleFunction(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// x -> matrix * x + offset
struct AffineMap {
    Matrix matrix;
    Vector offset;

    Vector operator()(const Vector& x) const { return matrix * x + offset; }
};

/// f(x, y) = h(y) - h(x)
struct DifferenceBifunction {
    ConvexPiece h;
};

/// f(x, y) = <grad phi(x), y - x>, with phi a smooth convex piece.
/// modulus is the strong-monotonicity constant claimed for the field.
struct GradientBifunction {
    ConvexPiece potential;
    double modulus = 0.0;
};

/// f((u1, v1), (u2, v2)) = L(u2, v1) - L(u1, v2)
struct SaddleBifunction {
    SaddleFunction L;
};

/// g((u1, v1), (u2, v2)) = <A u1, u2 - u1> + <B v1, v2 - v1>
struct OperatorPairBifunction {
    AffineMap A;
    AffineMap B;
};

/// An equilibrium bifunction from one of the structured monotone classes.
class BifunctionSpec {
public:
    using Kind = std::variant<DifferenceBifunction, GradientBifunction, SaddleBifunction,
                              OperatorPairBifunction>;

    static BifunctionSpec difference(ConvexPiece h);
    static BifunctionSpec gradient(ConvexPiece potential, double modulus);
    static BifunctionSpec saddle(SaddleFunction L);
    static BifunctionSpec operator_pair(AffineMap A, AffineMap B);
    /// f = 0, realized as the difference bifunction of the zero piece.
    static BifunctionSpec zero(Index dim);

    const Kind& kind() const noexcept { return kind_; }
    Index dim() const noexcept { return dim_; }
    /// Split point of (u, v) for the saddle and operator-pair kinds; 0 otherwise.
    Index block_split() const noexcept { return split_; }

    template <class T>
    bool is() const noexcept { return std::holds_alternative<T>(kind_); }

    template <class T>
    const T& as() const { return std::get<T>(kind_); }

    bool is_zero() const noexcept;

private:
    BifunctionSpec(Kind kind, Index dim, Index split)
        : kind_(std::move(kind)), dim_(dim), split_(split) {}

    Kind kind_;
    Index dim_;
    Index split_;
};

double evaluate(const BifunctionSpec& f, const Vector& x, const Vector& y);

struct MonotonicityReport {
    /// max over samples of f(x,y) + f(y,x) + modulus * |x - y|^2
    double worst = 0.0;
    /// max over samples of |f(x,x)|
    double worst_diagonal = 0.0;
    bool monotone = true;
};

/// Sampled check of f(x,y) + f(y,x) <= -modulus |x-y|^2 on pairs drawn from K.
MonotonicityReport check_monotone(const BifunctionSpec& f, const ConstraintSet& K,
                                  const Tolerances& tol = default_tolerances());

/// Sampled second-difference test: convex in u, concave in v on U x V.
bool check_convex_concave(const SaddleFunction& L, const ConstraintSet& U,
                          const ConstraintSet& V,
                          const Tolerances& tol = default_tolerances());

}  // namespace bep
