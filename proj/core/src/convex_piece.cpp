#include "bep/convex_piece.hpp"

#include <cmath>

#include "bep/prox.hpp"
#include "overloaded.hpp"

namespace bep {

using detail::overloaded;

ConvexPiece ConvexPiece::zero(Index dim) {
    if (dim <= 0) throw ValidationError("zero piece: dimension must be positive");
    return ConvexPiece(ZeroPiece{dim}, dim);
}

ConvexPiece ConvexPiece::quadratic(Matrix Q, Vector b, double c, const Tolerances& tol) {
    if (Q.rows() != Q.cols()) throw ValidationError("quadratic piece: Q must be square");
    require_dim(Q.rows(), b.size(), "quadratic piece linear term");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > tol.symmetry) {
        throw ValidationError("quadratic piece: Q is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < tol.min_eigenvalue) {
        throw ValidationError("quadratic piece: Q has a negative eigenvalue " +
                              std::to_string(eig.eigenvalues().minCoeff()));
    }
    const Index dim = Q.rows();
    return ConvexPiece(QuadraticPiece{std::move(Q), std::move(b), c}, dim);
}

ConvexPiece ConvexPiece::affine_squared(Vector a, double r, double weight) {
    if (weight < 0.0) throw ValidationError("affine-squared piece: weight must be >= 0");
    if (a.size() == 0 || a.norm() == 0.0) {
        throw ValidationError("affine-squared piece: direction must be nonzero");
    }
    const Index dim = a.size();
    return ConvexPiece(AffineSquaredPiece{std::move(a), r, weight}, dim);
}

ConvexPiece ConvexPiece::half_squared_distance(ConstraintSet target) {
    const Index dim = target.dim();
    return ConvexPiece(HalfSquaredDistancePiece{std::move(target)}, dim);
}

ConvexPiece ConvexPiece::indicator(ConstraintSet set) {
    const Index dim = set.dim();
    return ConvexPiece(IndicatorPiece{std::move(set)}, dim);
}

ConvexPiece ConvexPiece::sum(std::vector<ConvexPiece> terms) {
    if (terms.empty()) throw ValidationError("sum piece: no terms");
    const Index dim = terms.front().dim();
    for (const auto& t : terms) require_dim(dim, t.dim(), "sum piece term");
    return ConvexPiece(SumPiece{std::move(terms)}, dim);
}

double evaluate(const ConvexPiece& h, const Vector& x) {
    require_dim(h.dim(), x.size(), "evaluate");
    return std::visit(
        overloaded{
            [](const ZeroPiece&) { return 0.0; },
            [&](const QuadraticPiece& q) { return 0.5 * x.dot(q.Q * x) + q.b.dot(x) + q.c; },
            [&](const AffineSquaredPiece& a) {
                const double t = a.a.dot(x) - a.r;
                return a.weight * t * t;
            },
            [&](const HalfSquaredDistancePiece& d) {
                return 0.5 * (x - project(d.target, x)).squaredNorm();
            },
            [&](const IndicatorPiece& ind) {
                return contains(ind.set, x, 1e-12 * std::max(1.0, x.norm())) ? 0.0 : kInfinity;
            },
            [&](const SumPiece& s) {
                double v = 0.0;
                for (const auto& t : s.terms) v += evaluate(t, x);
                return v;
            },
        },
        h.kind());
}

bool is_smooth(const ConvexPiece& h) {
    if (h.is<IndicatorPiece>()) return false;
    if (h.is<SumPiece>()) {
        for (const auto& t : h.as<SumPiece>().terms) {
            if (!is_smooth(t)) return false;
        }
    }
    return true;
}

Vector gradient(const ConvexPiece& h, const Vector& x) {
    require_dim(h.dim(), x.size(), "gradient");
    return std::visit(
        overloaded{
            [&](const ZeroPiece&) -> Vector { return Vector::Zero(x.size()); },
            [&](const QuadraticPiece& q) -> Vector { return q.Q * x + q.b; },
            [&](const AffineSquaredPiece& a) -> Vector {
                return 2.0 * a.weight * (a.a.dot(x) - a.r) * a.a;
            },
            [&](const HalfSquaredDistancePiece& d) -> Vector { return x - project(d.target, x); },
            [&](const IndicatorPiece&) -> Vector {
                throw UnsupportedError("gradient: indicator pieces are not differentiable");
            },
            [&](const SumPiece& s) -> Vector {
                Vector g = Vector::Zero(x.size());
                for (const auto& t : s.terms) g += gradient(t, x);
                return g;
            },
        },
        h.kind());
}

double gradient_lipschitz(const ConvexPiece& h) {
    return std::visit(
        overloaded{
            [](const ZeroPiece&) { return 0.0; },
            [](const QuadraticPiece& q) {
                Eigen::SelfAdjointEigenSolver<Matrix> eig(q.Q, Eigen::EigenvaluesOnly);
                return std::max(0.0, eig.eigenvalues().maxCoeff());
            },
            [](const AffineSquaredPiece& a) { return 2.0 * a.weight * a.a.squaredNorm(); },
            [](const HalfSquaredDistancePiece& d) { return d.target.is<WholeSpace>() ? 0.0 : 1.0; },
            [](const IndicatorPiece&) { return 0.0; },
            [](const SumPiece& s) {
                double L = 0.0;
                for (const auto& t : s.terms) L += gradient_lipschitz(t);
                return L;
            },
        },
        h.kind());
}

bool has_quadratic_model(const ConvexPiece& h) {
    return std::visit(
        overloaded{
            [](const ZeroPiece&) { return true; },
            [](const QuadraticPiece&) { return true; },
            [](const AffineSquaredPiece&) { return true; },
            [](const HalfSquaredDistancePiece& d) {
                return d.target.is<WholeSpace>() || d.target.is<AffineSubspace>();
            },
            [](const IndicatorPiece&) { return false; },
            [](const SumPiece& s) {
                for (const auto& t : s.terms) {
                    if (!has_quadratic_model(t)) return false;
                }
                return true;
            },
        },
        h.kind());
}

QuadraticModel quadratic_model(const ConvexPiece& h) {
    const Index n = h.dim();
    QuadraticModel m{Matrix::Zero(n, n), Vector::Zero(n), 0.0};
    std::visit(
        overloaded{
            [](const ZeroPiece&) {},
            [&](const QuadraticPiece& q) {
                m.hessian = q.Q;
                m.linear = q.b;
                m.constant = q.c;
            },
            [&](const AffineSquaredPiece& a) {
                m.hessian = 2.0 * a.weight * a.a * a.a.transpose();
                m.linear = -2.0 * a.weight * a.r * a.a;
                m.constant = a.weight * a.r * a.r;
            },
            [&](const HalfSquaredDistancePiece& d) {
                if (d.target.is<WholeSpace>()) return;
                if (!d.target.is<AffineSubspace>()) {
                    throw UnsupportedError("quadratic model: distance target is not affine");
                }
                // x - P_M x = P x - c with P = A^+ A and c = A^+ b.
                const auto& a = d.target.as<AffineSubspace>();
                m.hessian = a.pinv * a.A;
                m.linear = -a.particular;
                m.constant = 0.5 * a.particular.squaredNorm();
            },
            [](const IndicatorPiece&) {
                throw UnsupportedError("quadratic model: indicator piece");
            },
            [&](const SumPiece& s) {
                for (const auto& t : s.terms) {
                    const auto sub = quadratic_model(t);
                    m.hessian += sub.hessian;
                    m.linear += sub.linear;
                    m.constant += sub.constant;
                }
            },
        },
        h.kind());
    return m;
}

}  // namespace bep
