#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semicert/fixed_point.hpp"
#include "semicert/grid.hpp"
#include "semicert/nonlinearity.hpp"

namespace semicert {

struct DomainSpec {
    int dim = 1;
    std::vector<double> lengths{1.0};
    std::vector<int> cells{128};

    bool operator==(const DomainSpec&) const = default;
};

struct PiecewisePoint {
    double u = 0.0;
    double f = 0.0;
    bool operator==(const PiecewisePoint&) const = default;
};

struct DiscontinuitySpec {
    double point = 0.0;
    double left_limit = 0.0;
    double right_limit = 0.0;
    bool operator==(const DiscontinuitySpec&) const = default;
};

/// Either a builtin catalog label or an explicit breakpoint table with linear
/// interpolation inside [-a, a]; declared discontinuities split the table.
struct NonlinearitySpec {
    enum class Kind { builtin, piecewise };
    Kind kind = Kind::builtin;
    std::string builtin_label = "cubic_shift";
    double a = 0.0;  // piecewise only; builtins carry their own threshold
    std::vector<PiecewisePoint> table;
    std::vector<DiscontinuitySpec> discontinuities;

    bool operator==(const NonlinearitySpec&) const = default;
};

struct SolverSpec {
    double theta = 0.5;
    int anderson_depth = 0;
    double tol_update = 1e-10;
    double tol_residual = 1e-10;
    int max_iter = 500;
    enum class Initial { zero, constant };
    Initial initial = Initial::zero;
    double initial_constant = 0.0;

    bool operator==(const SolverSpec&) const = default;
};

struct OutputSpec {
    std::string solution_csv = "solution.csv";
    std::string report_json = "report.json";

    bool operator==(const OutputSpec&) const = default;
};

struct CertificateSpec {
    double tol_residual = 1e-8;
    double tol_apriori = 1e-8;
    std::optional<double> tol_amp;  // default_tol_amp when absent
    double kernel_slack = 0.05;
    int kernel_sources = 5;
    double sign_u_max = 10.0;
    int sign_samples = 1000;

    bool operator==(const CertificateSpec&) const = default;
};

struct RunConfig {
    DomainSpec domain;
    double k = 1.0;
    NonlinearitySpec nonlinearity;
    SolverSpec solver;
    OutputSpec output;
    CertificateSpec certificates;

    bool operator==(const RunConfig&) const = default;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;  // every validation error, not just the first
};

ParseResult parse_config(const std::string& path);
ParseResult parse_config_text(const std::string& text);

/// Canonical text form; parse_config_text(write_config(c)) == c.
std::string write_config(const RunConfig& config);

BoxDomain make_domain(const DomainSpec& spec);
Nonlinearity make_nonlinearity(const NonlinearitySpec& spec);
SolverOptions make_solver_options(const SolverSpec& spec, const BoxDomain& domain);

}  // namespace semicert
