#pragma once

#include <cstddef>
#include <optional>

#include "semicert/grid.hpp"

namespace semicert {

struct LinearSolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Discrete shifted Laplacian A = -Delta_h + k^2 I on the interior nodes of a
/// box, Dirichlet rows eliminated. Symmetric positive definite M-matrix:
/// diagonal sum_i 2/h_i^2 + k^2, off-diagonal -1/h_i^2 to each axis neighbor.
class ShiftedLaplacian {
public:
    ShiftedLaplacian(BoxDomain domain, double k);

    const BoxDomain& domain() const { return domain_; }
    double k() const { return k_; }
    double diagonal() const { return diag_; }
    double off_diagonal(int axis) const { return -inv_h2_[axis]; }

    GridField apply(const GridField& u) const;

    /// -Delta_h u alone (no k^2 shift); used by the maximum-principle probe.
    GridField apply_laplacian(const GridField& u) const;

private:
    BoxDomain domain_;
    double k_;
    double diag_;
    std::array<double, 3> inv_h2_{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> stride_{0, 0, 0};
};

ShiftedLaplacian assemble(const BoxDomain& d, double k);

/// Solves A w = b by diagonally preconditioned conjugate gradients to relative
/// residual <= tol; the discrete Green operator applied to b.
GridField green_apply(const ShiftedLaplacian& A, const GridField& b, double tol = 1e-12,
                      LinearSolveStats* stats = nullptr);

/// Dense Cholesky path for small problems; must agree with green_apply.
GridField green_apply_direct(const ShiftedLaplacian& A, const GridField& b);

/// Discrete G(., y): solve A g = e_y / prod(h_i) (cell-volume scaled unit source).
GridField green_kernel_column(const ShiftedLaplacian& A, std::size_t source_index);

/// Free-space screened-Laplace kernel e^{-k r} / (4 pi r).
double yukawa(double r, double k);

struct QuadratureSpec {
    double tail_tol = 1e-8;
    int intervals = 1 << 14;
};

/// Integral of the radial reduction r e^{-k r} over [0, R] with tail < tail_tol;
/// equals 1/k^2 up to quadrature error.
double yukawa_mass(double k, const QuadratureSpec& quad = {});

struct KernelBoundReport {
    bool pass = false;
    double worst_ratio = 0.0;   // max of G_h / yukawa over checked nodes
    double min_value = 0.0;     // most negative column entry over checked nodes
    std::size_t nodes_checked = 0;
    std::size_t worst_node = 0;
};

/// Checks 0 <= G_h(x, y) <= yukawa(|x-y|, k) * (1 + slack) at every node with
/// |x - y| >= 2 max(h_i). 3D only: the free-space kernel comparison is 3D-specific.
KernelBoundReport verify_kernel_bound(const ShiftedLaplacian& A, std::size_t source_index,
                                      double slack);

}  // namespace semicert
