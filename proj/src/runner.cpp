#include "semicert/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace semicert {

namespace {

using nlohmann::json;

json check_json(const CheckResult& c) {
    return {{"pass", c.pass}, {"margin", c.margin}, {"value", c.value}};
}

json energy_json(const EnergyTerms& t) {
    return {{"gradient", t.gradient}, {"mass", t.mass}, {"nonlinearity", t.nonlinearity}};
}

class Fnv1a {
public:
    void feed(const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001b3ull;
        }
    }
    void feed(const std::string& s) { feed(s.data(), s.size()); }
    void feed(double v) { feed(&v, sizeof(v)); }
    std::string hex() const {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

json config_json(const RunConfig& cfg) {
    json j;
    j["domain"] = {{"dim", cfg.domain.dim}, {"lengths", cfg.domain.lengths},
                   {"cells", cfg.domain.cells}};
    j["equation"] = {{"k", cfg.k}};
    json nl;
    if (cfg.nonlinearity.kind == NonlinearitySpec::Kind::builtin) {
        nl["builtin"] = cfg.nonlinearity.builtin_label;
    } else {
        nl["kind"] = "piecewise";
        nl["a"] = cfg.nonlinearity.a;
        json table = json::array();
        for (const auto& p : cfg.nonlinearity.table) table.push_back({p.u, p.f});
        nl["table"] = table;
        json disc = json::array();
        for (const auto& d : cfg.nonlinearity.discontinuities)
            disc.push_back({d.point, d.left_limit, d.right_limit});
        nl["discontinuities"] = disc;
    }
    j["nonlinearity"] = nl;
    j["solver"] = {{"theta", cfg.solver.theta},
                   {"anderson_depth", cfg.solver.anderson_depth},
                   {"tol_update", cfg.solver.tol_update},
                   {"tol_residual", cfg.solver.tol_residual},
                   {"max_iter", cfg.solver.max_iter}};
    j["certificates"] = {{"tol_residual", cfg.certificates.tol_residual},
                         {"tol_apriori", cfg.certificates.tol_apriori},
                         {"kernel_slack", cfg.certificates.kernel_slack},
                         {"kernel_sources", cfg.certificates.kernel_sources}};
    return j;
}

}  // namespace

json solve_report_json(const SolveReport& report) {
    return {{"status", to_string(report.status)},
            {"iterations", report.iterations},
            {"final_residual", report.final_residual},
            {"final_update", report.final_update},
            {"mu", report.mu},
            {"residual_history", report.residual_history},
            {"theta_trace", report.theta_trace}};
}

json certificate_report_json(const CertificateReport& report) {
    json j;
    j["residual"] = check_json(report.residual);
    j["apriori_sup"] = check_json(report.apriori_sup);
    j["amplitude"] = check_json(report.amplitude);
    j["tol_amp"] = report.tol_amp;
    j["energy"] = {{"plus", energy_json(report.energy.plus)},
                   {"minus", energy_json(report.energy.minus)}};
    if (report.max_principle) {
        const auto& m = *report.max_principle;
        j["max_principle"] = {{"node", m.node},        {"at_max", m.at_max},
                              {"u", m.u_value},        {"neg_laplacian", m.neg_laplacian},
                              {"k2_u", m.k2_u},        {"f", m.f_value}};
    } else {
        j["max_principle"] = nullptr;
    }
    return j;
}

std::string run_hash(const RunConfig& config, const SolveReport& solve, const GridField& u) {
    Fnv1a h;
    h.feed(write_config(config));
    h.feed(to_string(solve.status));
    h.feed(static_cast<double>(solve.iterations));
    h.feed(solve.final_residual);
    for (double v : u.values()) h.feed(v);
    return h.hex();
}

std::string solution_csv_text(const GridField& u) {
    const BoxDomain& d = u.domain();
    const int dim = d.dim();
    std::ostringstream out;
    out.precision(17);
    out << "x";
    if (dim > 1) out << ",y";
    if (dim > 2) out << ",z";
    out << ",u\n";

    std::array<int, 3> node{0, 0, 0};  // full-grid multi-index, 0..cells(axis)
    std::array<int, 3> extent{1, 1, 1};
    for (int axis = 0; axis < dim; ++axis) extent[axis] = d.cells(axis) + 1;

    for (int k = 0; k < extent[2]; ++k)
        for (int j = 0; j < extent[1]; ++j)
            for (int i = 0; i < extent[0]; ++i) {
                node = {i, j, k};
                bool boundary = false;
                for (int axis = 0; axis < dim; ++axis)
                    if (node[axis] == 0 || node[axis] == d.cells(axis)) boundary = true;
                double value = 0.0;
                if (!boundary) {
                    std::size_t idx = 0, stride = 1;
                    for (int axis = 0; axis < dim; ++axis) {
                        idx += static_cast<std::size_t>(node[axis] - 1) * stride;
                        stride *= static_cast<std::size_t>(d.interior(axis));
                    }
                    value = u[idx];
                }
                for (int axis = 0; axis < dim; ++axis)
                    out << (axis ? "," : "") << node[axis] * d.spacing(axis);
                out << "," << value << "\n";
            }
    return out.str();
}

void write_solution_csv(const std::string& path, const GridField& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << solution_csv_text(u);
}

RunOutcome run_solve(const RunConfig& config, bool write_outputs) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    RunOutcome outcome;
    json& report = outcome.report;
    report["version"] = kArtifactVersion;
    report["config"] = config_json(config);

    const BoxDomain domain = make_domain(config.domain);
    const Nonlinearity f = make_nonlinearity(config.nonlinearity);
    const double a = f.threshold_a;

    const double u_max = std::max(config.certificates.sign_u_max, 2.0 * a + 1.0);
    const auto sign = check_sign_condition(f, u_max, config.certificates.sign_samples);
    report["sign_check"] = {{"pass", sign.pass},
                            {"u_max", u_max},
                            {"witness", sign.witness ? json(*sign.witness) : json(nullptr)}};
    if (!sign.pass) {
        report["error"] = "sign condition u*f(u) >= 0 fails for |u| >= a";
        outcome.exit_code = kExitValidation;
        if (write_outputs) {
            std::ofstream out(config.output.report_json);
            out << report.dump(2) << "\n";
        }
        return outcome;
    }

    const TruncatedNonlinearity F = truncate(f);
    const ShiftedLaplacian A = assemble(domain, config.k);
    const SolverOptions opts = make_solver_options(config.solver, domain);

    auto [u, solve] = picard_solve(A, F, opts);
    report["solve"] = solve_report_json(solve);

    CertificateTolerances tols;
    tols.residual = config.certificates.tol_residual;
    tols.apriori = config.certificates.tol_apriori;
    tols.amplitude = config.certificates.tol_amp;
    const CertificateReport certs = run_certificates(A, F, u, tols);
    report["certificates"] = certificate_report_json(certs);

    report["hash"] = run_hash(config, solve, u);
    const auto t1 = clock::now();
    report["timings"] = {
        {"total_seconds", std::chrono::duration<double>(t1 - t0).count()}};

    const bool certs_pass = certs.residual.pass && certs.apriori_sup.pass && certs.amplitude.pass;
    if (solve.status != SolveStatus::converged)
        outcome.exit_code = kExitNoConvergence;
    else if (!certs_pass)
        outcome.exit_code = kExitCertificateFailure;

    if (write_outputs) {
        write_solution_csv(config.output.solution_csv, u);
        std::ofstream out(config.output.report_json);
        if (!out) throw std::runtime_error("cannot open output file: " + config.output.report_json);
        out << report.dump(2) << "\n";
    }
    outcome.solution = std::move(u);
    return outcome;
}

StudyReport run_convergence_study(const RunConfig& config, int levels) {
    if (levels < 3)
        throw std::invalid_argument("run_convergence_study: need at least 3 refinement levels");

    const Nonlinearity f = make_nonlinearity(config.nonlinearity);
    const TruncatedNonlinearity F = truncate(f);

    StudyReport study;
    std::vector<GridField> solutions;
    for (int level = 0; level < levels; ++level) {
        DomainSpec dspec = config.domain;
        for (auto& n : dspec.cells) n <<= level;
        const BoxDomain domain = make_domain(dspec);
        const ShiftedLaplacian A = assemble(domain, config.k);
        auto [u, solve] = picard_solve(A, F, make_solver_options(config.solver, domain));

        StudyLevel entry;
        entry.cells = dspec.cells;
        entry.converged = solve.status == SolveStatus::converged;
        entry.sup_u = sup_norm(u);
        entry.overshoot = std::max(0.0, entry.sup_u - F.a);
        study.levels.push_back(entry);
        solutions.push_back(std::move(u));
        if (!entry.converged) {
            study.complete = false;
            return study;
        }
    }

    // sup-norm differences on the coarse level's nodes; coarse interior index
    // mi maps to fine index 2*mi + 1 per axis under cell doubling
    std::vector<double> diffs;
    for (int level = 0; level + 1 < levels; ++level) {
        const GridField& coarse = solutions[level];
        const GridField& fine = solutions[level + 1];
        const BoxDomain& dc = coarse.domain();
        const BoxDomain& df = fine.domain();
        double diff = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            const auto mi = dc.node_multi_index(i);
            std::size_t fi = 0, stride = 1;
            for (int axis = 0; axis < df.dim(); ++axis) {
                fi += static_cast<std::size_t>(2 * mi[axis] + 1) * stride;
                stride *= static_cast<std::size_t>(df.interior(axis));
            }
            diff = std::max(diff, std::abs(coarse[i] - fine[fi]));
        }
        diffs.push_back(diff);
        study.levels[level].diff_to_next = diff;
    }
    for (std::size_t j = 0; j + 1 < diffs.size(); ++j)
        study.observed_orders.push_back(std::log2(diffs[j] / diffs[j + 1]));
    study.complete = true;
    return study;
}

KernelCheckReport run_kernel_check(const RunConfig& config) {
    const BoxDomain domain = make_domain(config.domain);
    if (domain.dim() != 3)
        throw std::invalid_argument("run_kernel_check: kernel comparison needs dim = 3");
    const ShiftedLaplacian A = assemble(domain, config.k);

    KernelCheckReport report;
    report.mass_value = yukawa_mass(config.k);
    report.mass_expected = 1.0 / (config.k * config.k);
    bool pass = std::abs(report.mass_value - report.mass_expected) <=
                1e-3 * report.mass_expected;

    std::mt19937 rng(20240817u);
    std::uniform_int_distribution<std::size_t> pick(0, domain.interior_count() - 1);
    std::vector<std::size_t> sources;
    while (sources.size() < static_cast<std::size_t>(config.certificates.kernel_sources)) {
        const std::size_t s = pick(rng);
        if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
    }
    for (std::size_t s : sources) {
        auto bound = verify_kernel_bound(A, s, config.certificates.kernel_slack);
        pass = pass && bound.pass;
        report.sources.emplace_back(s, bound);
    }
    report.pass = pass;
    return report;
}

json study_report_json(const StudyReport& report) {
    json levels = json::array();
    for (const auto& level : report.levels)
        levels.push_back({{"cells", level.cells},
                          {"converged", level.converged},
                          {"sup_u", level.sup_u},
                          {"overshoot", level.overshoot},
                          {"diff_to_next", level.diff_to_next}});
    return {{"complete", report.complete},
            {"levels", levels},
            {"observed_orders", report.observed_orders}};
}

json kernel_check_json(const KernelCheckReport& report) {
    json sources = json::array();
    for (const auto& [index, bound] : report.sources)
        sources.push_back({{"source", index},
                           {"pass", bound.pass},
                           {"worst_ratio", bound.worst_ratio},
                           {"min_value", bound.min_value},
                           {"nodes_checked", bound.nodes_checked}});
    return {{"pass", report.pass},
            {"yukawa_mass", report.mass_value},
            {"yukawa_mass_expected", report.mass_expected},
            {"sources", sources}};
}

}  // namespace semicert
