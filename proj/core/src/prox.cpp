#include "bep/prox.hpp"

#include <cmath>
#include <random>

#include "overloaded.hpp"

namespace bep {

using detail::overloaded;

Vector project(const ConstraintSet& K, const Vector& x) {
    require_dim(K.dim(), x.size(), "project");
    return std::visit(
        overloaded{
            [&](const WholeSpace&) -> Vector { return x; },
            [&](const Box& b) -> Vector { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
            [&](const AffineSubspace& a) -> Vector { return x - a.pinv * (a.A * x - a.b); },
            [&](const Halfspace& h) -> Vector {
                const double excess = h.normal.dot(x) - h.offset;
                if (excess <= 0.0) return x;
                return x - (excess / h.normal.squaredNorm()) * h.normal;
            },
            [&](const ProductSet& p) -> Vector {
                Vector z(x.size());
                Index offset = 0;
                for (const auto& part : p.parts) {
                    z.segment(offset, part.dim()) = project(part, x.segment(offset, part.dim()));
                    offset += part.dim();
                }
                return z;
            },
        },
        K.kind());
}

namespace {

struct Flattened {
    std::vector<WeightedPiece> smooth;
    std::vector<const ConstraintSet*> indicators;
};

void flatten(double weight, const ConvexPiece& piece, Flattened& out) {
    if (weight == 0.0 || piece.is<ZeroPiece>()) return;
    if (piece.is<SumPiece>()) {
        for (const auto& t : piece.as<SumPiece>().terms) flatten(weight, t, out);
    } else if (piece.is<IndicatorPiece>()) {
        out.indicators.push_back(&piece.as<IndicatorPiece>().set);
    } else {
        out.smooth.push_back({weight, &piece});
    }
}

Vector solve_quadratic_whole_space(const Matrix& system, const Vector& rhs) {
    Eigen::LLT<Matrix> llt(system);
    return llt.solve(rhs);
}

// min 1/2 z^T S z - r^T z subject to A z = b, through a null-space basis of A.
Vector solve_quadratic_affine(const Matrix& system, const Vector& rhs, const AffineSubspace& a) {
    Eigen::JacobiSVD<Matrix> svd(a.A, Eigen::ComputeFullV);
    const Index n = a.A.cols();
    const Index rank = svd.rank();
    if (rank == n) return a.particular;
    const Matrix N = svd.matrixV().rightCols(n - rank);
    const Matrix reduced = N.transpose() * system * N;
    const Vector reduced_rhs = N.transpose() * (rhs - system * a.particular);
    const Vector t = reduced.ldlt().solve(reduced_rhs);
    return a.particular + N * t;
}

Vector projected_gradient(std::span<const WeightedPiece> terms, const Vector& anchor,
                          const ConstraintSet& domain, const Tolerances& tol) {
    double lipschitz = 1.0;
    for (const auto& t : terms) lipschitz += t.weight * gradient_lipschitz(*t.piece);
    const double step = 1.0 / lipschitz;
    // Constant momentum for a 1-strongly convex objective.
    const double sq = std::sqrt(lipschitz);
    const double momentum = (sq - 1.0) / (sq + 1.0);

    auto grad = [&](const Vector& z) {
        Vector g = z - anchor;
        for (const auto& t : terms) g += t.weight * gradient(*t.piece, z);
        return g;
    };

    Vector z = project(domain, anchor);
    Vector v = z;
    for (std::size_t k = 0; k < tol.projected_max_iterations; ++k) {
        Vector next = project(domain, v - step * grad(v));
        const double moved = (next - z).norm();
        v = next + momentum * (next - z);
        z = std::move(next);
        if (moved < tol.projected_step_tolerance) return z;
    }
    const double residual = (z - project(domain, z - step * grad(z))).norm();
    throw NonconvergedError("prox: projected-gradient solve did not converge", residual,
                            tol.projected_max_iterations);
}

}  // namespace

Vector prox_sum(std::span<const WeightedPiece> terms, const Vector& anchor,
                const ConstraintSet& domain, const Tolerances& tol) {
    require_dim(domain.dim(), anchor.size(), "prox anchor");
    Flattened flat;
    for (const auto& t : terms) {
        if (t.weight < 0.0) throw ValidationError("prox: term weights must be nonnegative");
        require_dim(domain.dim(), t.piece->dim(), "prox term");
        flatten(t.weight, *t.piece, flat);
    }

    const ConstraintSet* effective = &domain;
    if (!flat.indicators.empty()) {
        if (flat.indicators.size() > 1 || !domain.is<WholeSpace>()) {
            throw UnsupportedError("prox: intersections of constraint sets are not supported");
        }
        effective = flat.indicators.front();
    }
    if (flat.smooth.empty()) return project(*effective, anchor);

    bool quadratic = true;
    for (const auto& t : flat.smooth) quadratic = quadratic && has_quadratic_model(*t.piece);

    if (quadratic && (effective->is<WholeSpace>() || effective->is<AffineSubspace>())) {
        const Index n = anchor.size();
        Matrix system = Matrix::Identity(n, n);
        Vector rhs = anchor;
        for (const auto& t : flat.smooth) {
            const auto m = quadratic_model(*t.piece);
            system += t.weight * m.hessian;
            rhs -= t.weight * m.linear;
        }
        if (effective->is<WholeSpace>()) return solve_quadratic_whole_space(system, rhs);
        return solve_quadratic_affine(system, rhs, effective->as<AffineSubspace>());
    }

    if (flat.smooth.size() == 1 && effective->is<WholeSpace>() &&
        flat.smooth.front().piece->is<HalfSquaredDistancePiece>()) {
        const double w = flat.smooth.front().weight;
        const auto& target = flat.smooth.front().piece->as<HalfSquaredDistancePiece>().target;
        return (anchor + w * project(target, anchor)) / (1.0 + w);
    }

    return projected_gradient(flat.smooth, anchor, *effective, tol);
}

Vector prox(const ProxRequest& req, const Tolerances& tol) {
    if (!(req.weight > 0.0)) throw ValidationError("prox: weight must be positive");
    const WeightedPiece term{req.weight, &req.piece};
    return prox_sum(std::span<const WeightedPiece>(&term, 1), req.anchor, req.domain, tol);
}

double prox_residual(const ProxRequest& req, const Vector& z, std::size_t samples,
                     std::uint64_t seed, double radius) {
    require_dim(req.domain.dim(), z.size(), "prox residual");
    const double hz = evaluate(req.piece, z);
    auto term = [&](const Vector& y) {
        return req.weight * (evaluate(req.piece, y) - hz) + (y - z).dot(z - req.anchor);
    };
    double worst = term(z);
    worst = std::min(worst, term(project(req.domain, req.anchor)));
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        worst = std::min(worst, term(sample_point(req.domain, rng, radius)));
    }
    return worst;
}

}  // namespace bep
