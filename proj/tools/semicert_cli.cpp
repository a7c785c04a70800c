#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "semicert/runner.hpp"

namespace {

using namespace semicert;

int load_config(const std::string& path, RunConfig& out) {
    auto parsed = parse_config(path);
    if (!parsed.config) {
        std::cerr << "invalid config:\n";
        for (const auto& e : parsed.errors) std::cerr << "  " << e << "\n";
        return kExitValidation;
    }
    out = *parsed.config;
    return kExitOk;
}

int cmd_solve(const std::string& config_path) {
    RunConfig cfg;
    if (int rc = load_config(config_path, cfg)) return rc;
    try {
        RunOutcome outcome = run_solve(cfg);
        const auto& r = outcome.report;
        const std::string status =
            r.contains("solve") ? r["solve"]["status"].get<std::string>() : "aborted";
        std::cout << "status: " << status << "\n";
        if (r.contains("certificates")) {
            const auto& c = r["certificates"];
            std::cout << "residual:  " << (c["residual"]["pass"].get<bool>() ? "pass" : "FAIL")
                      << " (sup " << c["residual"]["value"].get<double>() << ")\n"
                      << "apriori:   " << (c["apriori_sup"]["pass"].get<bool>() ? "pass" : "FAIL")
                      << " (sup|u| " << c["apriori_sup"]["value"].get<double>() << ")\n"
                      << "amplitude: " << (c["amplitude"]["pass"].get<bool>() ? "pass" : "FAIL")
                      << " (sup|u| " << c["amplitude"]["value"].get<double>() << ")\n";
        }
        if (r.contains("error")) std::cout << "error: " << r["error"].get<std::string>() << "\n";
        std::cout << "report: " << cfg.output.report_json << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_study(const std::string& config_path, int levels) {
    RunConfig cfg;
    if (int rc = load_config(config_path, cfg)) return rc;
    try {
        StudyReport study = run_convergence_study(cfg, levels);
        const auto j = study_report_json(study);
        std::ofstream out(cfg.output.report_json);
        out << j.dump(2) << "\n";
        std::cout << j.dump(2) << "\n";
        return study.complete ? kExitOk : kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_kernel_check(const std::string& config_path) {
    RunConfig cfg;
    if (int rc = load_config(config_path, cfg)) return rc;
    try {
        KernelCheckReport report = run_kernel_check(cfg);
        const auto j = kernel_check_json(report);
        std::ofstream out(cfg.output.report_json);
        out << j.dump(2) << "\n";
        std::cout << j.dump(2) << "\n";
        return report.pass ? kExitOk : kExitCertificateFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_catalog() {
    for (const auto& f : builtin_catalog()) {
        std::printf("%-12s a = %-10.6g discontinuities:", f.label.c_str(), f.threshold_a);
        if (f.discontinuities.empty()) std::printf(" none");
        for (const auto& d : f.discontinuities)
            std::printf(" %g (limits %g / %g)", d.point, d.left_limit, d.right_limit);
        std::printf("\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semilinear Dirichlet solver with bound certification"};
    app.require_subcommand(1);

    std::string config_path;
    int levels = 3;

    auto* solve = app.add_subcommand("solve", "solve, certify and persist one configuration");
    solve->add_option("--config", config_path, "config file")->required();

    auto* study = app.add_subcommand("study", "grid convergence study");
    study->add_option("--config", config_path, "config file")->required();
    study->add_option("--levels", levels, "refinement levels (>= 3)");

    auto* kernel = app.add_subcommand("kernel-check", "Green-kernel domination and mass identity");
    kernel->add_option("--config", config_path, "config file")->required();

    app.add_subcommand("catalog", "list builtin nonlinearities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? semicert::kExitValidation : semicert::kExitOk;
    }

    if (solve->parsed()) return cmd_solve(config_path);
    if (study->parsed()) return cmd_study(config_path, levels);
    if (kernel->parsed()) return cmd_kernel_check(config_path);
    return cmd_catalog();
}
