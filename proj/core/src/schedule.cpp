#include "bep/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bep {

namespace {

void validate_override(const std::optional<std::vector<double>>& seq, const char* name) {
    if (!seq) return;
    if (seq->empty()) throw ValidationError(std::string("schedule.") + name + "_override: empty");
    for (std::size_t i = 0; i < seq->size(); ++i) {
        if (!((*seq)[i] > 0.0) || !std::isfinite((*seq)[i])) {
            throw ValidationError(std::string("schedule.") + name + "_override[" +
                                  std::to_string(i) + "]: must be positive and finite");
        }
    }
}

double from_override(const std::vector<double>& seq, std::size_t n, const char* name) {
    if (n == 0 || n > seq.size()) {
        throw ValidationError(std::string(name) + " override has no entry for n = " +
                              std::to_string(n));
    }
    return seq[n - 1];
}

// Least-squares slope of log(values) against log(base(n)) on the second half of
// the prefix.
double fitted_exponent(const std::vector<double>& seq, double shift) {
    const std::size_t first = seq.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = first; i < seq.size(); ++i) {
        const double x = std::log(static_cast<double>(i + 1) + shift);
        const double y = std::log(seq[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 2 || denom <= 0.0) return 0.0;
    const double slope = (count * sxy - sx * sy) / denom;
    // Snap estimates that are numerically integral or zero.
    const double snapped = std::round(slope * 1e6) / 1e6;
    return snapped == 0.0 ? 0.0 : snapped;
}

}  // namespace

void ParameterSchedule::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("schedule.alpha: must lie in [0, 1], got " + std::to_string(alpha));
    }
    if (!(lambda.scale > 0.0)) throw ValidationError("schedule.lambda.scale: must be positive");
    if (!(lambda.exponent >= 0.0)) throw ValidationError("schedule.lambda.exponent: must be >= 0");
    if (!(beta.scale > 0.0)) throw ValidationError("schedule.beta.scale: must be positive");
    if (!(beta.exponent >= 0.0)) throw ValidationError("schedule.beta.exponent: must be >= 0");
    validate_override(lambda_override, "lambda");
    validate_override(beta_override, "beta");
}

double ParameterSchedule::lambda_at(std::size_t n) const {
    if (lambda_override) return from_override(*lambda_override, n, "lambda");
    if (n == 0) throw ValidationError("lambda_n is indexed from n = 1");
    return lambda.scale * std::pow(static_cast<double>(n), -lambda.exponent);
}

double ParameterSchedule::beta_at(std::size_t n) const {
    if (beta_override) return from_override(*beta_override, n, "beta");
    return beta.scale * std::pow(1.0 + static_cast<double>(n), beta.exponent);
}

std::string to_string(TheoremMatch m) {
    switch (m) {
        case TheoremMatch::Weak: return "weak";
        case TheoremMatch::StrongWithGeometric: return "strong-with-geometric-condition";
        case TheoremMatch::StrongWithoutGeometric: return "strong-without-geometric-condition";
    }
    return "unknown";
}

bool ScheduleReport::matches_theorem(TheoremMatch m) const {
    return std::find(matches.begin(), matches.end(), m) != matches.end();
}

std::string ScheduleReport::summary() const {
    std::ostringstream os;
    auto flag = [&](const char* name, bool v) { os << "  " << name << ": " << (v ? "yes" : "no") << '\n'; };
    os << "lambda exponent " << lambda_exponent << ", beta exponent " << beta_exponent
       << (inconclusive ? " (estimated from override prefix, inconclusive)" : "") << '\n';
    flag("liminf lambda_n > 0", liminf_lambda_positive);
    flag("lambda_n -> 0", lambda_to_zero);
    flag("sum lambda_n = inf", sum_lambda_divergent);
    flag("beta_n -> inf", beta_to_infinity);
    flag("liminf lambda_n beta_n > 0", liminf_lambda_beta_positive);
    flag("sum lambda_n / beta_n < inf", ratio_summable);
    flag("alpha < 1/3", alpha_admissible);
    os << "  matches:";
    if (matches.empty()) os << " none";
    for (auto m : matches) os << ' ' << to_string(m);
    os << '\n';
    return os.str();
}

ScheduleReport classify_schedule(const ParameterSchedule& sched) {
    ScheduleReport r;
    r.lambda_exponent = sched.lambda.exponent;
    r.beta_exponent = sched.beta.exponent;
    if (sched.lambda_override) {
        r.lambda_exponent = -fitted_exponent(*sched.lambda_override, 0.0);
        r.inconclusive = true;
    }
    if (sched.beta_override) {
        r.beta_exponent = fitted_exponent(*sched.beta_override, 1.0);
        r.inconclusive = true;
    }
    const double rl = r.lambda_exponent;
    const double sb = r.beta_exponent;

    r.liminf_lambda_positive = rl <= 0.0;
    r.lambda_to_zero = rl > 0.0;
    r.sum_lambda_divergent = rl <= 1.0;
    r.beta_to_infinity = sb > 0.0;
    r.liminf_lambda_beta_positive = sb >= rl;
    r.ratio_summable = rl + sb > 1.0;
    r.alpha_admissible = sched.alpha < 1.0 / 3.0;

    if (r.alpha_admissible) {
        if (r.liminf_lambda_positive && r.beta_to_infinity) r.matches.push_back(TheoremMatch::Weak);
        if (r.sum_lambda_divergent) r.matches.push_back(TheoremMatch::StrongWithGeometric);
        if (r.lambda_to_zero && r.sum_lambda_divergent && r.beta_to_infinity &&
            r.liminf_lambda_beta_positive) {
            r.matches.push_back(TheoremMatch::StrongWithoutGeometric);
        }
    }
    return r;
}

}  // namespace bep
