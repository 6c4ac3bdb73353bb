#pragma once

#include <span>

#include "bep/convex_piece.hpp"

namespace bep {

/// Euclidean projection onto K.
Vector project(const ConstraintSet& K, const Vector& x);

/// argmin over domain of weight * piece(z) + 1/2 |z - anchor|^2
struct ProxRequest {
    ConvexPiece piece;
    double weight = 1.0;
    Vector anchor;
    ConstraintSet domain;
};

struct WeightedPiece {
    double weight;
    const ConvexPiece* piece;
};

/// argmin over domain of sum_i w_i h_i(z) + 1/2 |z - anchor|^2.
///
/// Quadratic terms over the whole space or an affine subspace are solved
/// exactly (linear or KKT solve). A lone half squared distance over the whole
/// space uses the closed form (y + w P_M y) / (1 + w). Everything else falls
/// back to an accelerated projected-gradient loop with step 1 / (sum w_i L_i + 1);
/// it throws NonconvergedError when the iteration budget runs out.
///
/// Indicator terms are folded into the domain; this requires the domain to be
/// the whole space and at most one indicator.
Vector prox_sum(std::span<const WeightedPiece> terms, const Vector& anchor,
                const ConstraintSet& domain, const Tolerances& tol = default_tolerances());

Vector prox(const ProxRequest& req, const Tolerances& tol = default_tolerances());

/// min over sampled y in K (plus the projected anchor and z) of
/// weight (h(y) - h(z)) + <y - z, z - anchor>. Nonnegative up to rounding for
/// the exact prox point.
double prox_residual(const ProxRequest& req, const Vector& z, std::size_t samples,
                     std::uint64_t seed = 42, double radius = 10.0);

}  // namespace bep
