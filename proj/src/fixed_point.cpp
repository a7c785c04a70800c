#include "semicert/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace semicert {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter_reached: return "max_iter_reached";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

GridField apply_T(const ShiftedLaplacian& A, const TruncatedNonlinearity& F, const GridField& u) {
    GridField b(A.domain());
    require_same_domain(u, b, "apply_T");
    for (std::size_t i = 0; i < u.size(); ++i) b[i] = -F(u[i]);
    return green_apply(A, b);
}

namespace {

bool all_finite(const GridField& u) {
    for (double v : u.values())
        if (!std::isfinite(v)) return false;
    return true;
}

GridField residual_field(const ShiftedLaplacian& A, const ScalarFn& fn, const GridField& u) {
    GridField r = A.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] += fn(u[i]);
    return r;
}

// sup norm that propagates non-finite entries instead of ignoring them
double residual_sup(const GridField& r) {
    if (!all_finite(r)) return std::numeric_limits<double>::quiet_NaN();
    return sup_norm(r);
}

GridField initial_iterate(const ShiftedLaplacian& A, const SolverOptions& opts) {
    if (opts.initial_guess) {
        require_same_domain(*opts.initial_guess, GridField(A.domain()), "initial guess");
        return *opts.initial_guess;
    }
    return GridField(A.domain());
}

void check_options(const SolverOptions& opts) {
    if (!(opts.theta > 0.0) || opts.theta > 1.0)
        throw std::invalid_argument("solver options: theta must lie in (0, 1]");
    if (!(opts.tol_update > 0.0) || !(opts.tol_residual > 0.0))
        throw std::invalid_argument("solver options: tolerances must be positive");
    if (opts.anderson_depth < 0)
        throw std::invalid_argument("solver options: anderson_depth must be >= 0");
    if (opts.max_iter < 1) throw std::invalid_argument("solver options: max_iter must be >= 1");
}

// Anderson mixing over a window of (iterate, map value) pairs. Solves the small
// least-squares problem on residual differences by ridge-regularized normal
// equations and returns the mixed next iterate.
class AndersonWindow {
public:
    explicit AndersonWindow(int depth) : depth_(depth) {}

    GridField next(const GridField& u, const GridField& t, double theta) {
        const std::size_t n = u.size();
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = t[i] - u[i];

        GridField out(u.domain());
        const int m = static_cast<int>(us_.size());
        if (m == 0) {
            for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - theta) * u[i] + theta * t[i];
        } else {
            // columns: w - w_j for the m stored previous residuals
            std::vector<std::vector<double>> dW(m, std::vector<double>(n));
            for (int j = 0; j < m; ++j)
                for (std::size_t i = 0; i < n; ++i) dW[j][i] = w[i] - ws_[j][i];

            std::vector<double> G(m * m, 0.0), rhs(m, 0.0);
            double trace = 0.0;
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b <= a; ++b) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < n; ++i) s += dW[a][i] * dW[b][i];
                    G[a * m + b] = G[b * m + a] = s;
                }
                trace += G[a * m + a];
                for (std::size_t i = 0; i < n; ++i) rhs[a] += dW[a][i] * w[i];
            }
            const double ridge = 1e-12 * std::max(trace, 1.0);
            for (int a = 0; a < m; ++a) G[a * m + a] += ridge;
            std::vector<double> gamma = solve_small(G, rhs, m);

            for (std::size_t i = 0; i < n; ++i) {
                double umix = u[i], tmix = t[i];
                for (int j = 0; j < m; ++j) {
                    umix -= gamma[j] * (u[i] - us_[j][i]);
                    tmix -= gamma[j] * (t[i] - ts_[j][i]);
                }
                out[i] = (1.0 - theta) * umix + theta * tmix;
            }
        }

        us_.push_back(u.values());
        ts_.push_back(t.values());
        ws_.push_back(std::move(w));
        while (static_cast<int>(us_.size()) > depth_) {
            us_.pop_front();
            ts_.pop_front();
            ws_.pop_front();
        }
        return out;
    }

private:
    static std::vector<double> solve_small(std::vector<double> M, std::vector<double> b, int m) {
        for (int c = 0; c < m; ++c) {
            int piv = c;
            for (int r = c + 1; r < m; ++r)
                if (std::abs(M[r * m + c]) > std::abs(M[piv * m + c])) piv = r;
            if (piv != c) {
                for (int j = 0; j < m; ++j) std::swap(M[c * m + j], M[piv * m + j]);
                std::swap(b[c], b[piv]);
            }
            const double d = M[c * m + c];
            if (d == 0.0) continue;
            for (int r = c + 1; r < m; ++r) {
                const double factor = M[r * m + c] / d;
                for (int j = c; j < m; ++j) M[r * m + j] -= factor * M[c * m + j];
                b[r] -= factor * b[c];
            }
        }
        std::vector<double> x(m, 0.0);
        for (int r = m - 1; r >= 0; --r) {
            double s = b[r];
            for (int j = r + 1; j < m; ++j) s -= M[r * m + j] * x[j];
            x[r] = M[r * m + r] != 0.0 ? s / M[r * m + r] : 0.0;
        }
        return x;
    }

    int depth_;
    std::deque<std::vector<double>> us_, ts_, ws_;
};

}  // namespace

std::pair<GridField, SolveReport> picard_solve_fn(const ShiftedLaplacian& A, const ScalarFn& fn,
                                                  const SolverOptions& opts) {
    check_options(opts);
    constexpr double kThetaFloor = 1.0 / 64.0;

    GridField u = initial_iterate(A, opts);
    SolveReport report;
    if (!all_finite(u)) {
        report.status = SolveStatus::diverged;
        report.final_residual = std::numeric_limits<double>::quiet_NaN();
        return {u, report};
    }
    double residual = residual_sup(residual_field(A, fn, u));
    report.residual_history.push_back(residual);
    if (residual <= opts.tol_residual) {
        report.status = SolveStatus::converged;
        report.final_residual = residual;
        return {u, report};
    }

    double theta = opts.theta;
    AndersonWindow anderson(std::max(opts.anderson_depth, 1));

    for (int it = 1; it <= opts.max_iter; ++it) {
        GridField b(A.domain());
        for (std::size_t i = 0; i < u.size(); ++i) b[i] = -fn(u[i]);
        if (!all_finite(b)) {
            report.status = SolveStatus::diverged;
            report.iterations = it;
            report.final_residual = std::numeric_limits<double>::quiet_NaN();
            return {u, report};
        }
        GridField t = green_apply(A, b);

        GridField u_next = opts.anderson_depth > 0 ? anderson.next(u, t, theta)
                                                   : GridField(A.domain());
        if (opts.anderson_depth == 0)
            for (std::size_t i = 0; i < u.size(); ++i)
                u_next[i] = (1.0 - theta) * u[i] + theta * t[i];

        report.iterations = it;
        report.theta_trace.push_back(theta);

        if (!all_finite(u_next)) {
            report.status = SolveStatus::diverged;
            report.final_residual = std::numeric_limits<double>::quiet_NaN();
            return {u_next, report};
        }

        double update = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            update = std::max(update, std::abs(u_next[i] - u[i]));

        const double residual_next = residual_sup(residual_field(A, fn, u_next));
        report.residual_history.push_back(residual_next);
        if (!std::isfinite(residual_next)) {
            report.status = SolveStatus::diverged;
            report.final_residual = residual_next;
            return {u_next, report};
        }
        if (residual_next > residual) theta = std::max(theta * 0.5, kThetaFloor);

        u = std::move(u_next);
        residual = residual_next;
        report.final_update = update;
        report.final_residual = residual;
        if (residual <= opts.tol_residual && update <= opts.tol_update) {
            report.status = SolveStatus::converged;
            return {u, report};
        }
    }
    report.status = SolveStatus::max_iter_reached;
    return {u, report};
}

std::pair<GridField, SolveReport> picard_solve(const ShiftedLaplacian& A,
                                               const TruncatedNonlinearity& F,
                                               const SolverOptions& opts) {
    auto [u, report] = picard_solve_fn(A, [&F](double v) { return F(v); }, opts);
    report.mu = F.mu;
    return {std::move(u), report};
}

std::pair<GridField, SolveReport> newton_solve(const ShiftedLaplacian& A,
                                               const TruncatedNonlinearity& F,
                                               const SolverOptions& opts,
                                               const std::optional<ScalarFn>& derivative) {
    check_options(opts);
    if (!F.base.discontinuities.empty())
        throw std::invalid_argument("newton_solve: unsupported for nonlinearities with declared discontinuities");

    auto fprime = [&](double v) -> double {
        if (derivative) return (*derivative)(v);
        const double delta = 1e-7 * std::max(1.0, std::abs(v));
        return (F(v + delta) - F(v - delta)) / (2.0 * delta);
    };
    const ScalarFn fn = [&F](double v) { return F(v); };

    GridField u = initial_iterate(A, opts);
    SolveReport report;
    report.mu = F.mu;
    GridField rvec = residual_field(A, fn, u);
    double residual = residual_sup(rvec);
    report.residual_history.push_back(residual);
    report.final_residual = residual;
    if (residual <= opts.tol_residual) {
        report.status = SolveStatus::converged;
        return {u, report};
    }

    const std::size_t n = u.size();
    for (int it = 1; it <= opts.max_iter; ++it) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = fprime(u[i]);

        // CG on J = A + diag(d), Jacobi preconditioned
        auto apply_J = [&](const GridField& v) {
            GridField out = A.apply(v);
            for (std::size_t i = 0; i < n; ++i) out[i] += d[i] * v[i];
            return out;
        };
        GridField s(A.domain());
        {
            GridField r(A.domain());
            for (std::size_t i = 0; i < n; ++i) r[i] = -rvec[i];
            double bnorm = 0.0;
            for (std::size_t i = 0; i < n; ++i) bnorm += r[i] * r[i];
            bnorm = std::sqrt(bnorm);
            GridField z(A.domain()), p(A.domain());
            double rz = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diag = A.diagonal() + d[i];
                z[i] = diag > 0.0 ? r[i] / diag : r[i];
                rz += r[i] * z[i];
                p[i] = z[i];
            }
            bool breakdown = false;
            const int cg_max = static_cast<int>(10 * n) + 100;
            for (int cg = 0; cg < cg_max; ++cg) {
                GridField Jp = apply_J(p);
                double pJp = 0.0;
                for (std::size_t i = 0; i < n; ++i) pJp += p[i] * Jp[i];
                if (!(pJp > 0.0)) {
                    breakdown = true;
                    break;
                }
                const double alpha = rz / pJp;
                double rnorm = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    s[i] += alpha * p[i];
                    r[i] -= alpha * Jp[i];
                    rnorm += r[i] * r[i];
                }
                if (std::sqrt(rnorm) <= 1e-12 * bnorm) break;
                double rz_next = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double diag = A.diagonal() + d[i];
                    z[i] = diag > 0.0 ? r[i] / diag : r[i];
                    rz_next += r[i] * z[i];
                }
                const double beta = rz_next / rz;
                rz = rz_next;
                for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            }
            if (breakdown) {
                report.status = SolveStatus::diverged;
                report.iterations = it;
                return {u, report};
            }
        }

        // backtracking line search on the sup-norm residual
        double lambda = 1.0;
        GridField u_try(A.domain());
        GridField r_try(A.domain());
        double residual_try = residual;
        bool accepted = false;
        while (lambda >= 1.0 / (1 << 20)) {
            for (std::size_t i = 0; i < n; ++i) u_try[i] = u[i] + lambda * s[i];
            r_try = residual_field(A, fn, u_try);
            residual_try = residual_sup(r_try);
            if (std::isfinite(residual_try) && residual_try <= (1.0 - 1e-4 * lambda) * residual) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        report.iterations = it;
        report.theta_trace.push_back(lambda);
        if (!accepted) {
            // residual already at its attainable floor
            report.status = residual <= opts.tol_residual ? SolveStatus::converged
                                                          : SolveStatus::diverged;
            return {u, report};
        }

        double update = 0.0;
        for (std::size_t i = 0; i < n; ++i) update = std::max(update, std::abs(lambda * s[i]));
        u = std::move(u_try);
        rvec = std::move(r_try);
        residual = residual_try;
        report.residual_history.push_back(residual);
        report.final_update = update;
        report.final_residual = residual;
        if (residual <= opts.tol_residual && update <= opts.tol_update) {
            report.status = SolveStatus::converged;
            return {u, report};
        }
        u_try = GridField(A.domain());
        r_try = GridField(A.domain());
    }
    report.status = SolveStatus::max_iter_reached;
    return {u, report};
}

}  // namespace semicert
