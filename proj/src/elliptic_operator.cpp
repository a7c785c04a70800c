#include "semicert/elliptic_operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace semicert {

ShiftedLaplacian::ShiftedLaplacian(BoxDomain domain, double k)
    : domain_(std::move(domain)), k_(k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("ShiftedLaplacian: k must be positive");
    diag_ = k_ * k_;
    std::size_t stride = 1;
    for (int axis = 0; axis < domain_.dim(); ++axis) {
        const double h = domain_.spacing(axis);
        inv_h2_[axis] = 1.0 / (h * h);
        diag_ += 2.0 * inv_h2_[axis];
        stride_[axis] = stride;
        stride *= static_cast<std::size_t>(domain_.interior(axis));
    }
}

ShiftedLaplacian assemble(const BoxDomain& d, double k) { return {d, k}; }

GridField ShiftedLaplacian::apply_laplacian(const GridField& u) const {
    require_same_domain(u, GridField(domain_), "ShiftedLaplacian::apply");
    GridField out(domain_);
    const int dim = domain_.dim();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto mi = domain_.node_multi_index(i);
        double v = (diag_ - k_ * k_) * u[i];
        for (int axis = 0; axis < dim; ++axis) {
            if (mi[axis] > 0) v -= inv_h2_[axis] * u[i - stride_[axis]];
            if (mi[axis] < domain_.interior(axis) - 1) v -= inv_h2_[axis] * u[i + stride_[axis]];
        }
        out[i] = v;
    }
    return out;
}

GridField ShiftedLaplacian::apply(const GridField& u) const {
    GridField out = apply_laplacian(u);
    const double k2 = k_ * k_;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += k2 * u[i];
    return out;
}

GridField green_apply(const ShiftedLaplacian& A, const GridField& b, double tol,
                      LinearSolveStats* stats) {
    require_same_domain(b, GridField(A.domain()), "green_apply");
    const std::size_t n = b.size();
    GridField x(A.domain());

    double bnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) bnorm2 += b[i] * b[i];
    if (bnorm2 == 0.0) {
        if (stats) *stats = {0, 0.0};
        return x;
    }
    const double bnorm = std::sqrt(bnorm2);
    const double inv_diag = 1.0 / A.diagonal();

    GridField r = b;
    GridField z(A.domain());
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
    GridField p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    const int max_iter = static_cast<int>(10 * n) + 100;
    int it = 0;
    double rel = 1.0;
    for (; it < max_iter; ++it) {
        GridField Ap = A.apply(p);
        double pAp = 0.0;
        for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        const double alpha = rz / pAp;
        double rnorm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm2 += r[i] * r[i];
        }
        rel = std::sqrt(rnorm2) / bnorm;
        if (rel <= tol) {
            ++it;
            break;
        }
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (stats) *stats = {it, rel};
    if (rel > tol)
        throw std::runtime_error("green_apply: CG stalled after " + std::to_string(it) +
                                 " iterations, relative residual " + std::to_string(rel));
    return x;
}

GridField green_apply_direct(const ShiftedLaplacian& A, const GridField& b) {
    require_same_domain(b, GridField(A.domain()), "green_apply_direct");
    const std::size_t n = b.size();
    if (n > 4000)
        throw std::invalid_argument("green_apply_direct: dense factorization limited to N <= 4000");

    // Assemble dense A column by column, then Cholesky.
    std::vector<double> M(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        GridField e(A.domain());
        e[j] = 1.0;
        GridField col = A.apply(e);
        for (std::size_t i = 0; i < n; ++i) M[i * n + j] = col[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double d = M[j * n + j];
        for (std::size_t p = 0; p < j; ++p) d -= M[j * n + p] * M[j * n + p];
        if (d <= 0.0) throw std::runtime_error("green_apply_direct: matrix not positive definite");
        const double Ljj = std::sqrt(d);
        M[j * n + j] = Ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = M[i * n + j];
            for (std::size_t p = 0; p < j; ++p) s -= M[i * n + p] * M[j * n + p];
            M[i * n + j] = s / Ljj;
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t p = 0; p < i; ++p) s -= M[i * n + p] * y[p];
        y[i] = s / M[i * n + i];
    }
    GridField x(A.domain());
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t p = ii + 1; p < n; ++p) s -= M[p * n + ii] * x[p];
        x[ii] = s / M[ii * n + ii];
    }
    return x;
}

GridField green_kernel_column(const ShiftedLaplacian& A, std::size_t source_index) {
    if (source_index >= A.domain().interior_count())
        throw std::out_of_range("green_kernel_column: source index out of range");
    GridField b(A.domain());
    b[source_index] = 1.0 / A.domain().cell_volume();
    return green_apply(A, b);
}

double yukawa(double r, double k) {
    if (!(r > 0.0)) throw std::domain_error("yukawa: kernel is singular at r <= 0");
    if (!(k > 0.0)) throw std::invalid_argument("yukawa: k must be positive");
    return std::exp(-k * r) / (4.0 * std::numbers::pi * r);
}

double yukawa_mass(double k, const QuadratureSpec& quad) {
    if (!(k > 0.0)) throw std::invalid_argument("yukawa_mass: k must be positive");
    // Radial reduction of the R^3 integral: integral of r e^{-k r} dr.
    // Tail beyond R is (R/k + 1/k^2) e^{-k R}.
    double R = 1.0 / k;
    while ((R / k + 1.0 / (k * k)) * std::exp(-k * R) >= quad.tail_tol) R *= 2.0;

    auto integrand = [k](double r) { return r * std::exp(-k * r); };
    const int n = quad.intervals;  // composite Simpson, n even
    const double h = R / n;
    double s = integrand(0.0) + integrand(R);
    for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * integrand(j * h);
    return s * h / 3.0;
}

KernelBoundReport verify_kernel_bound(const ShiftedLaplacian& A, std::size_t source_index,
                                      double slack) {
    if (A.domain().dim() != 3)
        throw std::invalid_argument("verify_kernel_bound: free-space kernel comparison needs dim = 3");
    if (slack < 0.0) throw std::invalid_argument("verify_kernel_bound: slack must be nonnegative");

    const GridField column = green_kernel_column(A, source_index);
    const auto y = A.domain().node_coordinates(source_index);
    const double r_min = 2.0 * A.domain().max_spacing();

    KernelBoundReport report;
    report.worst_node = source_index;
    for (std::size_t i = 0; i < column.size(); ++i) {
        const auto x = A.domain().node_coordinates(i);
        double r2 = 0.0;
        for (int axis = 0; axis < 3; ++axis) r2 += (x[axis] - y[axis]) * (x[axis] - y[axis]);
        const double r = std::sqrt(r2);
        if (r < r_min) continue;
        ++report.nodes_checked;
        report.min_value = std::min(report.min_value, column[i]);
        const double ratio = column[i] / yukawa(r, A.k());
        if (ratio > report.worst_ratio) {
            report.worst_ratio = ratio;
            report.worst_node = i;
        }
    }
    report.pass = report.nodes_checked > 0 && report.min_value >= -1e-12 &&
                  report.worst_ratio <= 1.0 + slack;
    return report;
}

}  // namespace semicert
