#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace semicert {

/// Declared jump of f inside [-a, a]; both one-sided limits must be finite.
struct Discontinuity {
    double point = 0.0;
    double left_limit = 0.0;
    double right_limit = 0.0;
};

/// Scalar nonlinearity f with amplitude threshold a. f must satisfy the sign
/// condition u*f(u) >= 0 for |u| >= a and may jump at finitely many declared
/// points inside [-a, a].
struct Nonlinearity {
    double threshold_a = 0.0;
    std::function<double(double)> rule;
    std::vector<Discontinuity> discontinuities;
    std::string label;
};

/// f clamped to f(a) above a and f(-a) below -a, with its sup bound mu.
struct TruncatedNonlinearity {
    Nonlinearity base;
    double a = 0.0;
    double f_at_plus_a = 0.0;
    double f_at_minus_a = 0.0;
    double mu = 0.0;

    double operator()(double u) const;
};

struct SignConditionReport {
    bool pass = true;
    std::optional<double> witness;  // u with u*f(u) < 0, when failing
    double witness_product = 0.0;
};

/// Evaluate f at u; at a declared discontinuity returns the midpoint of the
/// one-sided limits so the map is total.
double evaluate(const Nonlinearity& f, double u);

/// Structural validation: returns one message per violated invariant.
std::vector<std::string> validate(const Nonlinearity& f);

/// Samples u*f(u) on [-u_max,-a] and [a,u_max]; fails with a witness sample.
SignConditionReport check_sign_condition(const Nonlinearity& f, double u_max, int n_samples);

TruncatedNonlinearity truncate(const Nonlinearity& f);

/// Max of |F| over a dense sample of [-a,a], the endpoints and the declared
/// one-sided limits, with one refinement pass around the sample argmax.
double sup_bound(const TruncatedNonlinearity& F, int n_samples);

std::vector<Nonlinearity> builtin_catalog();
std::optional<Nonlinearity> find_builtin(const std::string& label);

}  // namespace semicert
