#include "bep/resolvent.hpp"

#include <cmath>
#include <random>

namespace bep {

void InnerSolverConfig::validate() const {
    if (max_iterations == 0) throw ValidationError("inner.max_iterations: must be positive");
    if (!(tolerance > 0.0)) throw ValidationError("inner.tolerance: must be positive");
    if (!(step_factor > 0.0 && step_factor <= 1.0)) {
        throw ValidationError("inner.step_factor: must lie in (0, 1]");
    }
}

namespace {

void check_common(const ResolventProblem& prob) {
    if (!(prob.lambda > 0.0)) throw ValidationError("resolvent: lambda must be positive");
    if (!(prob.beta >= 0.0)) throw ValidationError("resolvent: beta must be nonnegative");
    require_dim(prob.K.dim(), prob.anchor.size(), "resolvent anchor");
    require_dim(prob.K.dim(), prob.f.dim(), "resolvent f");
    require_dim(prob.K.dim(), prob.g.dim(), "resolvent g");
}

// Damped fixed-point loop shared by the gradient and saddle solvers. The
// damping halves whenever the residual fails to decrease for 10 consecutive
// iterations.
template <class Map>
Vector damped_fixed_point(Map&& map, Vector z, const InnerSolverConfig& cfg, const char* what) {
    double theta = cfg.step_factor;
    double previous = kInfinity;
    int stalled = 0;
    double residual = kInfinity;
    for (std::size_t k = 0; k < cfg.max_iterations; ++k) {
        Vector mapped = map(z);
        residual = (mapped - z).norm();
        if (!std::isfinite(residual)) break;
        if (residual < cfg.tolerance) return mapped;
        if (residual >= previous) {
            if (++stalled >= 10) {
                theta *= 0.5;
                stalled = 0;
            }
        } else {
            stalled = 0;
        }
        previous = residual;
        z += theta * (mapped - z);
    }
    throw NonconvergedError(what, residual, cfg.max_iterations);
}

// x in S with <M x - r, w - x> >= 0 for all w in S, M strongly monotone.
Vector solve_affine_vi(const Matrix& M, const Vector& r, const ConstraintSet& S,
                       const InnerSolverConfig& cfg) {
    if (S.is<WholeSpace>()) return M.partialPivLu().solve(r);
    const bool diagonal = (M - Matrix(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    if (S.is<Box>() && diagonal) {
        const auto& box = S.as<Box>();
        return (r.array() / M.diagonal().array()).matrix().cwiseMax(box.lower).cwiseMin(box.upper);
    }
    const Matrix sym = 0.5 * (M + M.transpose());
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
    const double norm = Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
    const double tau = mu / (norm * norm);
    Vector x = project(S, M.partialPivLu().solve(r));
    for (std::size_t k = 0; k < cfg.max_iterations; ++k) {
        Vector next = project(S, x - tau * (M * x - r));
        const double moved = (next - x).norm();
        x = std::move(next);
        if (moved < 0.1 * cfg.tolerance) return x;
    }
    throw NonconvergedError("saddle resolvent: block variational inequality did not converge",
                            (project(S, x - tau * (M * x - r)) - x).norm(), cfg.max_iterations);
}

}  // namespace

bool is_supported_pairing(const BifunctionSpec& f, const BifunctionSpec& g) {
    if (f.is<DifferenceBifunction>()) {
        return g.is<DifferenceBifunction>() || g.is<GradientBifunction>();
    }
    return f.is<SaddleBifunction>() && g.is<OperatorPairBifunction>();
}

Vector resolve_difference(const ResolventProblem& prob, const Tolerances& tol) {
    check_common(prob);
    if (!prob.f.is<DifferenceBifunction>() || !prob.g.is<DifferenceBifunction>()) {
        throw UnsupportedError("resolve_difference: both bifunctions must be difference kind");
    }
    const WeightedPiece terms[] = {
        {prob.lambda * prob.f_weight(), &prob.f.as<DifferenceBifunction>().h},
        {prob.lambda * prob.g_weight(), &prob.g.as<DifferenceBifunction>().h},
    };
    return prox_sum(terms, prob.anchor, prob.K, tol);
}

Vector resolve_gradient(const ResolventProblem& prob, const InnerSolverConfig& cfg,
                        const std::optional<Vector>& initial, const Tolerances& tol) {
    check_common(prob);
    cfg.validate();
    if (!prob.f.is<DifferenceBifunction>() || !prob.g.is<GradientBifunction>()) {
        throw UnsupportedError(
            "resolve_gradient: needs a difference lower level and a gradient upper level");
    }
    const WeightedPiece term{prob.lambda * prob.f_weight(), &prob.f.as<DifferenceBifunction>().h};
    const ConvexPiece& potential = prob.g.as<GradientBifunction>().potential;
    const double field_weight = prob.lambda * prob.g_weight();

    auto map = [&](const Vector& z) {
        const Vector shifted = prob.anchor - field_weight * gradient(potential, z);
        return prox_sum(std::span<const WeightedPiece>(&term, 1), shifted, prob.K, tol);
    };
    Vector start = initial ? project(prob.K, *initial) : project(prob.K, prob.anchor);
    return damped_fixed_point(map, std::move(start), cfg,
                              "resolve_gradient: inner fixed-point iteration did not converge");
}

Vector resolve_saddle(const ResolventProblem& prob, const InnerSolverConfig& cfg,
                      const std::optional<Vector>& initial) {
    check_common(prob);
    cfg.validate();
    if (!prob.f.is<SaddleBifunction>() || !prob.g.is<OperatorPairBifunction>()) {
        throw UnsupportedError("resolve_saddle: needs a saddle lower level and an operator pair");
    }
    if (!prob.K.is<ProductSet>() || prob.K.as<ProductSet>().parts.size() != 2) {
        throw UnsupportedError("resolve_saddle: K must be a product U x V");
    }
    const auto& L = prob.f.as<SaddleBifunction>().L;
    const auto& ops = prob.g.as<OperatorPairBifunction>();
    const auto& U = prob.K.as<ProductSet>().parts[0];
    const auto& V = prob.K.as<ProductSet>().parts[1];
    const Index nu = L.u_dim(), nv = L.v_dim();
    require_dim(nu, U.dim(), "resolve_saddle U");
    require_dim(nv, V.dim(), "resolve_saddle V");
    require_dim(nu, ops.A.matrix.rows(), "resolve_saddle A");
    require_dim(nv, ops.B.matrix.rows(), "resolve_saddle B");

    const double inv_lambda = 1.0 / prob.lambda;
    const double wf = prob.f_weight(), wg = prob.g_weight();
    const Vector y1 = prob.anchor.head(nu), y2 = prob.anchor.tail(nv);
    const Matrix Mv = inv_lambda * Matrix::Identity(nv, nv) + wg * ops.B.matrix;

    // One Gauss-Seidel sweep: exact u-block given v, then exact v-block given u.
    auto sweep = [&](const Vector& z) {
        const Vector v = z.tail(nv);
        const Matrix Mu = inv_lambda * Matrix::Identity(nu, nu) + wg * ops.A.matrix +
                          wf * L.curvature_u(v);
        const Vector ru = inv_lambda * y1 - wg * ops.A.offset -
                          wf * L.grad_u(Vector::Zero(nu), v);
        const Vector u_next = solve_affine_vi(Mu, ru, U, cfg);
        const Vector rv = inv_lambda * y2 - wg * ops.B.offset + wf * L.grad_v(u_next, v);
        Vector out(nu + nv);
        out << u_next, solve_affine_vi(Mv, rv, V, cfg);
        return out;
    };
    Vector start = project(prob.K, initial ? *initial : prob.anchor);
    return damped_fixed_point(sweep, std::move(start), cfg,
                              "resolve_saddle: block iteration did not converge");
}

Vector resolve(const ResolventProblem& prob, const InnerSolverConfig& cfg, const Tolerances& tol) {
    if (prob.f.is<DifferenceBifunction>() && prob.g.is<DifferenceBifunction>()) {
        return resolve_difference(prob, tol);
    }
    if (prob.f.is<DifferenceBifunction>() && prob.g.is<GradientBifunction>()) {
        return resolve_gradient(prob, cfg, std::nullopt, tol);
    }
    if (prob.f.is<SaddleBifunction>() && prob.g.is<OperatorPairBifunction>()) {
        return resolve_saddle(prob, cfg);
    }
    throw UnsupportedError("resolve: unsupported pairing of bifunction kinds");
}

double vi_residual(const ResolventProblem& prob, const Vector& z, std::size_t samples,
                   std::uint64_t seed, double radius) {
    require_dim(prob.K.dim(), z.size(), "vi_residual");
    const double wf = prob.f_weight(), wg = prob.g_weight();
    auto term = [&](const Vector& y) {
        const double fz = wf == 0.0 ? 0.0 : wf * evaluate(prob.f, z, y);
        return fz + wg * evaluate(prob.g, z, y) + (z - prob.anchor).dot(y - z) / prob.lambda;
    };
    double worst = term(z);
    worst = std::min(worst, term(project(prob.K, prob.anchor)));
    std::mt19937_64 rng(seed);
    // Alternate global draws with draws near z at shrinking scales, so that
    // small violations localized around z are still seen.
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < samples; ++i) {
        if (i % 2 == 0) {
            worst = std::min(worst, term(sample_point(prob.K, rng, radius)));
            continue;
        }
        Vector dir(z.size());
        for (Index j = 0; j < z.size(); ++j) dir[j] = gauss(rng);
        const double scale = std::pow(10.0, -static_cast<double>((i / 2) % 4));
        worst = std::min(worst, term(project(prob.K, z + scale * dir.normalized())));
    }
    return worst;
}

}  // namespace bep
