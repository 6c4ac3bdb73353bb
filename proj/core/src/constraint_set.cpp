#include "bep/constraint_set.hpp"

#include <cmath>
#include <numeric>

#include "bep/prox.hpp"
#include "overloaded.hpp"

namespace bep {

ConstraintSet ConstraintSet::whole_space(Index dim) {
    if (dim <= 0) throw ValidationError("whole space: dimension must be positive");
    return ConstraintSet(WholeSpace{dim}, dim);
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
    require_dim(lower.size(), upper.size(), "box bounds");
    if (lower.size() == 0) throw ValidationError("box: empty bounds");
    for (Index i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
            throw ValidationError("box: lower bound exceeds upper bound at index " +
                                  std::to_string(i));
        }
    }
    const Index dim = lower.size();
    return ConstraintSet(Box{std::move(lower), std::move(upper)}, dim);
}

ConstraintSet ConstraintSet::affine(Matrix A, Vector b, const Tolerances& tol) {
    require_dim(A.rows(), b.size(), "affine subspace rows");
    if (A.cols() == 0) throw ValidationError("affine subspace: zero columns");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    Matrix pinv = cod.pseudoInverse();
    Vector particular = pinv * b;
    const double residual = (A * particular - b).norm();
    if (residual >= tol.affine_consistency * std::max(1.0, b.norm())) {
        throw ValidationError("affine subspace: inconsistent system (least-squares residual " +
                              std::to_string(residual) + ")");
    }
    const Index dim = A.cols();
    return ConstraintSet(
        AffineSubspace{std::move(A), std::move(b), std::move(pinv), std::move(particular)}, dim);
}

ConstraintSet ConstraintSet::halfspace(Vector normal, double offset) {
    if (normal.size() == 0 || normal.norm() == 0.0) {
        throw ValidationError("halfspace: normal must be nonzero");
    }
    const Index dim = normal.size();
    return ConstraintSet(Halfspace{std::move(normal), offset}, dim);
}

ConstraintSet ConstraintSet::product(std::vector<ConstraintSet> parts) {
    if (parts.empty()) throw ValidationError("product: no factors");
    Index dim = 0;
    for (const auto& p : parts) dim += p.dim();
    return ConstraintSet(ProductSet{std::move(parts)}, dim);
}

using detail::overloaded;

double support(const ConstraintSet& set, const Vector& u, const Tolerances& tol) {
    require_dim(set.dim(), u.size(), "support");
    const double scale = std::max(1.0, u.norm());
    return std::visit(
        overloaded{
            [&](const WholeSpace&) { return u.norm() <= tol.support_membership ? 0.0 : kInfinity; },
            [&](const Box& box) {
                double s = 0.0;
                for (Index i = 0; i < u.size(); ++i) {
                    if (u[i] > 0.0) s += u[i] * box.upper[i];
                    else if (u[i] < 0.0) s += u[i] * box.lower[i];
                }
                return s;
            },
            [&](const AffineSubspace& a) {
                // Finite only on the row space of A.
                const Vector in_rows = a.pinv * (a.A * u);
                if ((u - in_rows).norm() > tol.support_membership * scale) return kInfinity;
                return u.dot(a.particular);
            },
            [&](const Halfspace& h) {
                const double t = u.dot(h.normal) / h.normal.squaredNorm();
                if (t < -tol.support_membership * scale ||
                    (u - t * h.normal).norm() > tol.support_membership * scale) {
                    return u.norm() <= tol.support_membership ? 0.0 : kInfinity;
                }
                return std::max(t, 0.0) * h.offset;
            },
            [&](const ProductSet& p) {
                double s = 0.0;
                Index offset = 0;
                for (const auto& part : p.parts) {
                    s += support(part, u.segment(offset, part.dim()), tol);
                    offset += part.dim();
                }
                return s;
            },
        },
        set.kind());
}

double distance(const ConstraintSet& set, const Vector& x) {
    return (x - project(set, x)).norm();
}

bool contains(const ConstraintSet& set, const Vector& x, double slack) {
    return distance(set, x) <= slack;
}

Vector sample_point(const ConstraintSet& set, std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (set.is<Box>()) {
        const auto& box = set.as<Box>();
        Vector y(box.lower.size());
        for (Index i = 0; i < y.size(); ++i) {
            const double lo = std::isfinite(box.lower[i]) ? box.lower[i] : -radius;
            const double hi = std::isfinite(box.upper[i]) ? box.upper[i] : radius;
            const double a = std::min(lo, hi), b = std::max(lo, hi);
            y[i] = a + (b - a) * unit(rng);
        }
        return project(set, y);
    }
    if (set.is<ProductSet>()) {
        Vector y(set.dim());
        Index offset = 0;
        for (const auto& part : set.as<ProductSet>().parts) {
            y.segment(offset, part.dim()) = sample_point(part, rng, radius);
            offset += part.dim();
        }
        return y;
    }
    Vector y(set.dim());
    for (Index i = 0; i < y.size(); ++i) y[i] = -radius + 2.0 * radius * unit(rng);
    return project(set, y);
}

}  // namespace bep
