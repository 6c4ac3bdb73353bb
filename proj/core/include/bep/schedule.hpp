#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bep/common.hpp"

namespace bep {

/// scale * base^(sign * exponent). The base is n for step sizes and (1 + n)
/// for penalization weights.
struct PowerRule {
    double scale = 1.0;
    double exponent = 0.0;

    bool operator==(const PowerRule&) const = default;
};

/// Step sizes lambda_n = a n^(-r), penalization beta_n = b (1+n)^s and the
/// inertial constant alpha. Explicit overrides replace the rules on their
/// prefix (index 0 holds n = 1).
struct ParameterSchedule {
    double alpha = 0.0;
    PowerRule lambda{1.0, 1.0};
    PowerRule beta{1.0, 1.0};
    std::optional<std::vector<double>> lambda_override;
    std::optional<std::vector<double>> beta_override;

    /// Throws ValidationError on alpha outside [0,1] or nonpositive values.
    void validate() const;

    double lambda_at(std::size_t n) const;
    double beta_at(std::size_t n) const;

    bool operator==(const ParameterSchedule&) const = default;
};

enum class TheoremMatch {
    Weak,                     // liminf lambda > 0, beta -> inf
    StrongWithGeometric,      // sum lambda = inf
    StrongWithoutGeometric,   // lambda -> 0, sum lambda = inf, beta -> inf, liminf lambda*beta > 0
};

std::string to_string(TheoremMatch m);

struct ScheduleReport {
    bool liminf_lambda_positive = false;
    bool lambda_to_zero = false;
    bool sum_lambda_divergent = false;
    bool beta_to_infinity = false;
    bool liminf_lambda_beta_positive = false;
    bool ratio_summable = false;
    bool alpha_admissible = false;
    /// Set when flags were estimated from an explicit override prefix.
    bool inconclusive = false;
    double lambda_exponent = 0.0;
    double beta_exponent = 0.0;
    std::vector<TheoremMatch> matches;

    bool matches_theorem(TheoremMatch m) const;
    std::string summary() const;
};

ScheduleReport classify_schedule(const ParameterSchedule& sched);

}  // namespace bep
