#pragma once

#include <random>
#include <variant>
#include <vector>

#include "bep/common.hpp"

namespace bep {

class ConstraintSet;

struct WholeSpace {
    Index dim = 0;
};

/// Componentwise bounds; entries may be +-infinity.
struct Box {
    Vector lower;
    Vector upper;
};

/// {x : A x = b}. The pseudo-inverse and a particular point are cached at
/// construction.
struct AffineSubspace {
    Matrix A;
    Vector b;
    Matrix pinv;       // A^+
    Vector particular; // A^+ b, the minimum-norm point of the subspace
};

/// {x : <normal, x> <= offset}
struct Halfspace {
    Vector normal;
    double offset = 0.0;
};

struct ProductSet {
    std::vector<ConstraintSet> parts;
};

/// Closed convex set with an exact Euclidean projection.
class ConstraintSet {
public:
    using Kind = std::variant<WholeSpace, Box, AffineSubspace, Halfspace, ProductSet>;

    static ConstraintSet whole_space(Index dim);
    static ConstraintSet box(Vector lower, Vector upper);
    static ConstraintSet affine(Matrix A, Vector b,
                                const Tolerances& tol = default_tolerances());
    static ConstraintSet halfspace(Vector normal, double offset);
    static ConstraintSet product(std::vector<ConstraintSet> parts);

    const Kind& kind() const noexcept { return kind_; }
    Index dim() const noexcept { return dim_; }

    template <class T>
    bool is() const noexcept { return std::holds_alternative<T>(kind_); }

    template <class T>
    const T& as() const { return std::get<T>(kind_); }

private:
    explicit ConstraintSet(Kind kind, Index dim) : kind_(std::move(kind)), dim_(dim) {}

    Kind kind_;
    Index dim_;
};

/// Support function sup_{y in K} <u, y>; +infinity when unbounded.
double support(const ConstraintSet& set, const Vector& u,
               const Tolerances& tol = default_tolerances());

/// Euclidean distance from x to its projection onto the set.
double distance(const ConstraintSet& set, const Vector& x);

bool contains(const ConstraintSet& set, const Vector& x, double slack);

/// Draws a point of the set. Bounded boxes are sampled uniformly; every other
/// kind projects a uniform point of [-radius, radius]^d onto the set, so
/// boundary points are drawn with positive probability.
Vector sample_point(const ConstraintSet& set, std::mt19937_64& rng, double radius);

}  // namespace bep
