#include "semicert/certificates.hpp"

#include <cmath>

namespace semicert {

namespace {

// Sum over all grid edges (boundary values zero) of D+u . D+v scaled by the
// cell volume; discrete counterpart of the gradient integral.
double edge_inner(const BoxDomain& d, const GridField& u, const GridField& v) {
    const double vol = d.cell_volume();
    double total = 0.0;
    for (int axis = 0; axis < d.dim(); ++axis) {
        std::size_t stride = 1;
        for (int ax = 0; ax < axis; ++ax) stride *= static_cast<std::size_t>(d.interior(ax));
        const double inv_h2 = 1.0 / (d.spacing(axis) * d.spacing(axis));
        const int m = d.interior(axis);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto mi = d.node_multi_index(i);
            // edge to the +axis neighbor (boundary when last interior node)
            const double u_hi = mi[axis] < m - 1 ? u[i + stride] : 0.0;
            const double v_hi = mi[axis] < m - 1 ? v[i + stride] : 0.0;
            total += (u_hi - u[i]) * (v_hi - v[i]) * inv_h2 * vol;
            // edge from the -axis boundary
            if (mi[axis] == 0) total += u[i] * v[i] * inv_h2 * vol;
        }
    }
    return total;
}

EnergyTerms energy_terms(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                         const GridField& u, const GridField& test, bool mirrored) {
    const double sign = mirrored ? -1.0 : 1.0;
    const double vol = A.domain().cell_volume();
    const double k2 = A.k() * A.k();
    EnergyTerms terms;
    GridField w = mirrored ? negate(u) : u;
    terms.gradient = edge_inner(A.domain(), w, test);
    for (std::size_t i = 0; i < u.size(); ++i) {
        terms.mass += k2 * sign * u[i] * test[i] * vol;
        terms.nonlinearity += sign * F(u[i]) * test[i] * vol;
    }
    return terms;
}

}  // namespace

CheckResult check_residual(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                           const GridField& u, double tol) {
    GridField r = A.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] += F(u[i]);
    const double residual_sup = sup_norm(r);
    return {residual_sup <= tol, tol - residual_sup, residual_sup};
}

CheckResult check_apriori_sup(const GridField& u, double mu, double k, double tol) {
    if (mu < 0.0) throw std::invalid_argument("check_apriori_sup: mu must be nonnegative");
    if (!(k > 0.0)) throw std::invalid_argument("check_apriori_sup: k must be positive");
    const double sup = sup_norm(u);
    const double bound = mu / (k * k);
    return {sup <= bound + tol, bound + tol - sup, sup};
}

double default_tol_amp(const BoxDomain& d) {
    const double h = d.max_spacing();
    return std::max(10.0 * h * h, 1e-10);
}

CheckResult check_amplitude_bound(const GridField& u, double a, double tol_amp) {
    if (a < 0.0) throw std::invalid_argument("check_amplitude_bound: a must be nonnegative");
    const double sup = sup_norm(u);
    return {sup <= a + tol_amp, a + tol_amp - sup, sup};
}

EnergyIdentity energy_identity_check(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                                     const GridField& u, double a) {
    require_same_domain(u, GridField(A.domain()), "energy_identity_check");
    EnergyIdentity id;
    id.plus = energy_terms(A, F, u, positive_part(u, a), false);
    id.minus = energy_terms(A, F, u, positive_part(negate(u), a), true);
    return id;
}

std::optional<MaxPrincipleRecord> maximum_principle_probe(const ShiftedLaplacian& A,
                                                          const Nonlinearity& f,
                                                          const GridField& u, double a) {
    require_same_domain(u, GridField(A.domain()), "maximum_principle_probe");
    if (u.size() == 0) return std::nullopt;
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (u[i] > u[imax]) imax = i;
        if (u[i] < u[imin]) imin = i;
    }

    auto record_at = [&](std::size_t node, bool at_max) {
        const GridField lap = A.apply_laplacian(u);
        MaxPrincipleRecord rec;
        rec.node = node;
        rec.at_max = at_max;
        rec.u_value = u[node];
        rec.neg_laplacian = lap[node];
        rec.k2_u = A.k() * A.k() * u[node];
        rec.f_value = evaluate(f, u[node]);
        return rec;
    };

    if (u[imax] > a) return record_at(imax, true);
    if (u[imin] < -a) return record_at(imin, false);
    return std::nullopt;
}

CertificateReport run_certificates(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                                   const GridField& u, const CertificateTolerances& tols) {
    CertificateReport report;
    report.tol_amp = tols.amplitude.value_or(default_tol_amp(A.domain()));
    report.residual = check_residual(A, F, u, tols.residual);
    report.apriori_sup = check_apriori_sup(u, F.mu, A.k(), tols.apriori);
    report.amplitude = check_amplitude_bound(u, F.a, report.tol_amp);
    report.energy = energy_identity_check(A, F, u, F.a);
    report.max_principle = maximum_principle_probe(A, F.base, u, F.a);
    return report;
}

}  // namespace semicert
