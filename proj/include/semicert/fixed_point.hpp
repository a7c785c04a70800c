#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semicert/elliptic_operator.hpp"
#include "semicert/grid.hpp"
#include "semicert/nonlinearity.hpp"

namespace semicert {

struct SolverOptions {
    double theta = 0.5;          // Picard damping factor in (0, 1]
    int anderson_depth = 0;      // acceleration window; 0 disables
    double tol_update = 1e-10;   // sup-norm change between iterates
    double tol_residual = 1e-10; // sup norm of A u + F(u)
    int max_iter = 500;
    std::optional<GridField> initial_guess;  // zero field when absent
};

enum class SolveStatus { converged, max_iter_reached, diverged };

std::string to_string(SolveStatus status);

struct SolveReport {
    SolveStatus status = SolveStatus::max_iter_reached;
    int iterations = 0;
    std::vector<double> residual_history;  // sup norm of A u + F(u) per iteration
    double final_update = 0.0;
    double final_residual = 0.0;
    double mu = 0.0;
    std::vector<double> theta_trace;
};

using ScalarFn = std::function<double(double)>;

/// T(u) = -A^{-1} F(u), the Green-operator fixed-point map.
GridField apply_T(const ShiftedLaplacian& A, const TruncatedNonlinearity& F, const GridField& u);

/// Damped Picard iteration u <- (1-theta) u + theta T(u), halving theta on
/// residual increase (floor 1/64), with optional Anderson acceleration.
/// Non-convergence is a reported status, never silent.
std::pair<GridField, SolveReport> picard_solve(const ShiftedLaplacian& A,
                                               const TruncatedNonlinearity& F,
                                               const SolverOptions& opts);

/// Same iteration against an arbitrary scalar nonlinearity (used for raw-f runs).
std::pair<GridField, SolveReport> picard_solve_fn(const ShiftedLaplacian& A, const ScalarFn& fn,
                                                  const SolverOptions& opts);

/// Newton on R(u) = A u + F(u) with backtracking line search; rejects
/// nonlinearities with declared discontinuities. Derivative is finite-difference
/// approximated when not supplied.
std::pair<GridField, SolveReport> newton_solve(const ShiftedLaplacian& A,
                                               const TruncatedNonlinearity& F,
                                               const SolverOptions& opts,
                                               const std::optional<ScalarFn>& derivative = std::nullopt);

}  // namespace semicert
