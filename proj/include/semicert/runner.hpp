#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semicert/certificates.hpp"
#include "semicert/config.hpp"

namespace semicert {

inline constexpr const char* kArtifactVersion = "0.1.0";

// process exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitCertificateFailure = 3;

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::optional<GridField> solution;
};

/// truncate -> sign check -> assemble -> picard -> certificates -> persist.
/// Writes the solution CSV and report JSON unless write_outputs is false.
RunOutcome run_solve(const RunConfig& config, bool write_outputs = true);

struct StudyLevel {
    std::vector<int> cells;
    bool converged = false;
    double sup_u = 0.0;
    double overshoot = 0.0;  // max(0, sup|u| - a)
    double diff_to_next = 0.0;  // sup-norm difference to the next level on common nodes
};

struct StudyReport {
    bool complete = false;
    std::vector<StudyLevel> levels;
    std::vector<double> observed_orders;  // log2(d_j / d_{j+1})
};

/// Solves at `levels` refinements, doubling cells per axis each time.
StudyReport run_convergence_study(const RunConfig& config, int levels);

struct KernelCheckReport {
    bool pass = false;
    double mass_value = 0.0;
    double mass_expected = 0.0;
    std::vector<std::pair<std::size_t, KernelBoundReport>> sources;
};

/// Kernel-domination check at fixed-seed random sources plus the 1/k^2 mass
/// identity. 3D only.
KernelCheckReport run_kernel_check(const RunConfig& config);

/// Full-grid CSV (boundary nodes included, value 0). Header x[,y[,z]],u.
void write_solution_csv(const std::string& path, const GridField& u);
std::string solution_csv_text(const GridField& u);

nlohmann::json certificate_report_json(const CertificateReport& report);
nlohmann::json solve_report_json(const SolveReport& report);
nlohmann::json study_report_json(const StudyReport& report);
nlohmann::json kernel_check_json(const KernelCheckReport& report);

/// FNV-1a over the canonical config text, solver outcome and solution bytes;
/// timings excluded so identical configs reproduce the hash.
std::string run_hash(const RunConfig& config, const SolveReport& solve, const GridField& u);

}  // namespace semicert
