#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A user-supplied object violates its construction invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested combination of objects has no solver.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// An inner iterative solve exhausted its budget.
class NonconvergedError : public Error {
public:
    NonconvergedError(const std::string& what, double residual, std::size_t iterations)
        : Error(what + " (residual " + std::to_string(residual) + " after " +
                std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// Numerical thresholds shared by the model, prox and diagnostics code.
struct Tolerances {
    double symmetry = 1e-12;          // |Q - Q^T|
    double min_eigenvalue = -1e-10;   // PSD check
    double affine_consistency = 1e-10;
    double support_membership = 1e-12;

    std::size_t projected_max_iterations = 10000;
    double projected_step_tolerance = 1e-12;

    std::size_t monotonicity_samples = 100;
    double monotonicity_slack = 1e-10;
    double convex_concave_slack = 1e-8;

    std::uint64_t seed = 42;
    double sample_radius = 10.0;

    double normalization = 1e-8;
    double conjugate_box = 20.0;
    double conjugate_step = 1e-3;

    double plateau_relative = 1e-6;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

inline void require_dim(Index expected, Index got, const char* what) {
    if (expected != got) {
        throw DimensionError(std::string(what) + ": expected dimension " +
                             std::to_string(expected) + ", got " + std::to_string(got));
    }
}

}  // namespace bep
