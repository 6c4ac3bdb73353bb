#pragma once

#include <variant>
#include <vector>

#include "bep/constraint_set.hpp"

namespace bep {

class ConvexPiece;

struct ZeroPiece {
    Index dim = 0;
};

/// 1/2 x^T Q x + b^T x + c with Q symmetric positive semidefinite.
struct QuadraticPiece {
    Matrix Q;
    Vector b;
    double c = 0.0;
};

/// weight * (<a, x> - r)^2
struct AffineSquaredPiece {
    Vector a;
    double r = 0.0;
    double weight = 0.0;
};

/// 1/2 d(x, target)^2
struct HalfSquaredDistancePiece {
    ConstraintSet target;
};

struct IndicatorPiece {
    ConstraintSet set;
};

struct SumPiece {
    std::vector<ConvexPiece> terms;
};

/// A convex function from the closed-form catalog.
class ConvexPiece {
public:
    using Kind = std::variant<ZeroPiece, QuadraticPiece, AffineSquaredPiece,
                              HalfSquaredDistancePiece, IndicatorPiece, SumPiece>;

    static ConvexPiece zero(Index dim);
    static ConvexPiece quadratic(Matrix Q, Vector b, double c,
                                 const Tolerances& tol = default_tolerances());
    static ConvexPiece affine_squared(Vector a, double r, double weight);
    static ConvexPiece half_squared_distance(ConstraintSet target);
    static ConvexPiece indicator(ConstraintSet set);
    static ConvexPiece sum(std::vector<ConvexPiece> terms);

    const Kind& kind() const noexcept { return kind_; }
    Index dim() const noexcept { return dim_; }

    template <class T>
    bool is() const noexcept { return std::holds_alternative<T>(kind_); }

    template <class T>
    const T& as() const { return std::get<T>(kind_); }

private:
    ConvexPiece(Kind kind, Index dim) : kind_(std::move(kind)), dim_(dim) {}

    Kind kind_;
    Index dim_;
};

/// h(x). Returns +infinity only for indicator pieces outside their set.
double evaluate(const ConvexPiece& h, const Vector& x);

/// True when the piece (and all its summands) is differentiable everywhere.
bool is_smooth(const ConvexPiece& h);

/// Gradient of a smooth piece; throws UnsupportedError for indicators.
Vector gradient(const ConvexPiece& h, const Vector& x);

/// Lipschitz constant of the gradient (largest Hessian eigenvalue for
/// quadratic pieces, 1 for half squared distances).
double gradient_lipschitz(const ConvexPiece& h);

/// Quadratic model h(x) = 1/2 x^T H x + g^T x + c. Only filled for pieces whose
/// value is exactly quadratic: zero, quadratic, affine-squared, and half squared
/// distance to an affine subspace or the whole space.
struct QuadraticModel {
    Matrix hessian;
    Vector linear;
    double constant = 0.0;
};

bool has_quadratic_model(const ConvexPiece& h);
QuadraticModel quadratic_model(const ConvexPiece& h);

}  // namespace bep
