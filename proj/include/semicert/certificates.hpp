#pragma once

#include <cstddef>
#include <optional>

#include "semicert/elliptic_operator.hpp"
#include "semicert/fixed_point.hpp"
#include "semicert/grid.hpp"
#include "semicert/nonlinearity.hpp"

namespace semicert {

struct CheckResult {
    bool pass = false;
    double margin = 0.0;  // pass == (margin >= 0)
    double value = 0.0;   // the quantity that was bounded
};

/// Discrete energy terms obtained by pairing the equation with (u-a)_+ (plus
/// side) and (-u-a)_+ (minus side). For a discrete solution with |u| <= a all
/// terms vanish; each is nonnegative for any field with small residual.
struct EnergyTerms {
    double gradient = 0.0;
    double mass = 0.0;
    double nonlinearity = 0.0;
};

struct EnergyIdentity {
    EnergyTerms plus;   // test function (u - a)_+
    EnergyTerms minus;  // test function (-u - a)_+
};

struct MaxPrincipleRecord {
    std::size_t node = 0;
    bool at_max = true;  // false: mirrored check at the minimum against -a
    double u_value = 0.0;
    double neg_laplacian = 0.0;  // -Delta_h u at the node
    double k2_u = 0.0;
    double f_value = 0.0;  // raw f, midpoint convention at declared jumps
};

struct CertificateReport {
    CheckResult residual;
    CheckResult apriori_sup;   // sup|u| <= mu/k^2 + tol
    CheckResult amplitude;     // sup|u| <= a + tol_amp
    EnergyIdentity energy;
    std::optional<MaxPrincipleRecord> max_principle;
    double tol_amp = 0.0;
};

/// residual_sup = sup|A u + F(u)|; pass iff <= tol.
CheckResult check_residual(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                           const GridField& u, double tol);

CheckResult check_apriori_sup(const GridField& u, double mu, double k, double tol);

/// Default amplitude slack: a second-order discretization may overshoot the
/// exact bound |u| <= a by O(h^2).
double default_tol_amp(const BoxDomain& d);

CheckResult check_amplitude_bound(const GridField& u, double a, double tol_amp);

EnergyIdentity energy_identity_check(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                                     const GridField& u, double a);

/// Locates the extremum of u; when it escapes [-a, a], returns the term triple
/// whose positive sum exhibits the maximum-principle contradiction.
std::optional<MaxPrincipleRecord> maximum_principle_probe(const ShiftedLaplacian& A,
                                                          const Nonlinearity& f,
                                                          const GridField& u, double a);

struct CertificateTolerances {
    double residual = 1e-8;
    double apriori = 1e-8;
    std::optional<double> amplitude;  // default_tol_amp when absent
};

CertificateReport run_certificates(const ShiftedLaplacian& A, const TruncatedNonlinearity& F,
                                   const GridField& u, const CertificateTolerances& tols = {});

}  // namespace semicert
