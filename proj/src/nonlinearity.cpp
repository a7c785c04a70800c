#include "semicert/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semicert {

double evaluate(const Nonlinearity& f, double u) {
    if (!std::isfinite(u)) throw std::domain_error("evaluate: non-finite argument");
    for (const auto& d : f.discontinuities)
        if (u == d.point) return 0.5 * (d.left_limit + d.right_limit);
    return f.rule(u);
}

std::vector<std::string> validate(const Nonlinearity& f) {
    std::vector<std::string> errors;
    if (!(f.threshold_a >= 0.0) || !std::isfinite(f.threshold_a))
        errors.push_back("threshold a must be a nonnegative finite number");
    if (!f.rule) errors.push_back("missing evaluation rule");
    for (const auto& d : f.discontinuities) {
        if (std::abs(d.point) > f.threshold_a)
            errors.push_back("discontinuity at " + std::to_string(d.point) +
                             " lies outside [-a, a]");
        if (!std::isfinite(d.left_limit) || !std::isfinite(d.right_limit))
            errors.push_back("one-sided limits at " + std::to_string(d.point) +
                             " must be finite");
    }
    return errors;
}

SignConditionReport check_sign_condition(const Nonlinearity& f, double u_max, int n_samples) {
    const double a = f.threshold_a;
    if (!(u_max > a)) throw std::invalid_argument("check_sign_condition: u_max must exceed a");
    if (n_samples < 100) throw std::invalid_argument("check_sign_condition: need at least 100 samples");

    SignConditionReport report;
    auto probe = [&](double u) {
        const double p = u * evaluate(f, u);
        if (p < 0.0 && report.pass) {
            report.pass = false;
            report.witness = u;
            report.witness_product = p;
        }
    };
    for (int j = 0; j < n_samples; ++j) {
        const double t = static_cast<double>(j) / (n_samples - 1);
        const double u = a + t * (u_max - a);
        probe(u);
        probe(-u);
        if (!report.pass) break;
    }
    return report;
}

double TruncatedNonlinearity::operator()(double u) const {
    if (u >= a) return f_at_plus_a;
    if (u <= -a) return f_at_minus_a;
    return evaluate(base, u);
}

double sup_bound(const TruncatedNonlinearity& F, int n_samples) {
    if (n_samples < 1000) throw std::invalid_argument("sup_bound: need at least 1000 samples");
    const double a = F.a;
    double best = std::max(std::abs(F.f_at_plus_a), std::abs(F.f_at_minus_a));
    for (const auto& d : F.base.discontinuities) {
        best = std::max(best, std::abs(d.left_limit));
        best = std::max(best, std::abs(d.right_limit));
    }
    if (a == 0.0) return best;

    auto scan = [&](double lo, double hi, int n, double& arg) {
        for (int j = 0; j < n; ++j) {
            const double u = lo + (hi - lo) * static_cast<double>(j) / (n - 1);
            const double v = std::abs(F(u));
            if (v > best) {
                best = v;
                arg = u;
            }
        }
    };
    double argmax = -a;
    scan(-a, a, n_samples, argmax);
    // one refinement pass around the sample argmax
    const double step = 2.0 * a / (n_samples - 1);
    scan(std::max(-a, argmax - step), std::min(a, argmax + step), 1001, argmax);
    return best;
}

TruncatedNonlinearity truncate(const Nonlinearity& f) {
    TruncatedNonlinearity F;
    F.base = f;
    F.a = f.threshold_a;
    F.f_at_plus_a = evaluate(f, f.threshold_a);
    F.f_at_minus_a = evaluate(f, -f.threshold_a);
    F.mu = sup_bound(F, 100000);
    return F;
}

std::vector<Nonlinearity> builtin_catalog() {
    std::vector<Nonlinearity> catalog;

    catalog.push_back({1.0, [](double u) { return u * u * u - 1.0; }, {}, "cubic_shift"});
    catalog.push_back({0.0, [](double u) { return std::sinh(u); }, {}, "sinh"});
    catalog.push_back({std::log(2.0), [](double u) { return std::exp(u) - 2.0; }, {}, "exp_shift"});

    const double base = 0.25 * 0.25 * 0.25 - 1.0;
    catalog.push_back({1.0,
                       [](double u) {
                           const double s = u > 0.25 ? 1.0 : (u < 0.25 ? -1.0 : 0.0);
                           return u * u * u - 1.0 + 0.25 * s;
                       },
                       {{0.25, base - 0.25, base + 0.25}},
                       "cubic_step"});
    return catalog;
}

std::optional<Nonlinearity> find_builtin(const std::string& label) {
    for (auto& f : builtin_catalog())
        if (f.label == label) return f;
    return std::nullopt;
}

}  // namespace semicert
