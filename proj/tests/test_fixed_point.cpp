#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "semicert/fixed_point.hpp"

using namespace semicert;

namespace {

TruncatedNonlinearity builtin_truncated(const std::string& label) {
    auto f = find_builtin(label);
    REQUIRE(f.has_value());
    return truncate(*f);
}

}  // namespace

TEST_CASE("apply_T on the degenerate truncation is zero") {
    BoxDomain d({1.0}, {32});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("sinh");
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    GridField u(d);
    for (auto& v : u.values()) v = dist(rng);
    CHECK(sup_norm(apply_T(A, F, u)) == 0.0);
}

TEST_CASE("apply_T(0) matches the closed-form linear solve") {
    BoxDomain d({1.0}, {256});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    GridField t = apply_T(A, F, GridField(d));  // F(0) = -1, so T(0) = A^{-1} 1
    const std::size_t mid = 127;
    CHECK(t[mid] == doctest::Approx(1.0 - 1.0 / std::cosh(0.5)).epsilon(1e-4));
}

TEST_CASE("apply_T stays in the Schauder ball") {
    BoxDomain d({1.0, 1.0}, {16, 16});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    const double radius = F.mu / (A.k() * A.k());
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(-5.0 * radius, 5.0 * radius);
    for (int trial = 0; trial < 25; ++trial) {
        GridField u(d);
        for (auto& v : u.values()) v = dist(rng);
        CHECK(sup_norm(apply_T(A, F, u)) <= radius + 1e-8);
    }
}

TEST_CASE("picard: sinh collapses to zero immediately") {
    BoxDomain d({1.0}, {64});
    ShiftedLaplacian A(d, 1.0);
    auto [u, report] = picard_solve(A, builtin_truncated("sinh"), {});
    CHECK(report.status == SolveStatus::converged);
    CHECK(report.iterations <= 2);
    CHECK(sup_norm(u) == 0.0);
    CHECK(report.final_residual == 0.0);
}

TEST_CASE("picard: cubic_shift 1D") {
    BoxDomain d({1.0}, {128});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    auto [u, report] = picard_solve(A, F, {});
    REQUIRE(report.status == SolveStatus::converged);
    CHECK(u[63] == doctest::Approx(0.1130).epsilon(1e-3));

    // converged iterate satisfies the fixed-point equation
    GridField t = apply_T(A, F, u);
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(u[i] - t[i]));
    CHECK(diff <= 10.0 * SolverOptions{}.tol_update);

    // residual re-evaluated independently of the solver's bookkeeping
    GridField r = A.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] += F(u[i]);
    CHECK(sup_norm(r) <= SolverOptions{}.tol_residual);
}

TEST_CASE("picard: exp_shift stays inside [0, ln 2]") {
    BoxDomain d({1.0}, {128});
    ShiftedLaplacian A(d, 1.0);
    auto [u, report] = picard_solve(A, builtin_truncated("exp_shift"), {});
    REQUIRE(report.status == SolveStatus::converged);
    for (double v : u.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= std::log(2.0));
    }
}

TEST_CASE("picard: discontinuous cubic_step converges with |u| <= 1") {
    BoxDomain d({1.0}, {128});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_step");
    auto [u, report] = picard_solve(A, F, {});
    REQUIRE(report.status == SolveStatus::converged);
    CHECK(report.final_residual <= 1e-8);
    CHECK(sup_norm(u) <= 1.0);
}

TEST_CASE("picard with anderson acceleration reaches the same fixed point") {
    BoxDomain d({1.0}, {128});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    SolverOptions accel;
    accel.anderson_depth = 3;
    auto [u_plain, rep_plain] = picard_solve(A, F, {});
    auto [u_accel, rep_accel] = picard_solve(A, F, accel);
    REQUIRE(rep_plain.status == SolveStatus::converged);
    REQUIRE(rep_accel.status == SolveStatus::converged);
    double diff = 0.0;
    for (std::size_t i = 0; i < u_plain.size(); ++i)
        diff = std::max(diff, std::abs(u_plain[i] - u_accel[i]));
    CHECK(diff <= 1e-8);
}

TEST_CASE("picard reports divergence on a non-finite iterate instead of throwing") {
    BoxDomain d({1.0}, {16});
    ShiftedLaplacian A(d, 1.0);
    TruncatedNonlinearity blowup;
    blowup.base = {1.0, [](double u) { return u; }, {}, "blowup"};
    blowup.a = 1.0;
    blowup.f_at_plus_a = std::numeric_limits<double>::quiet_NaN();
    blowup.f_at_minus_a = -1.0;
    blowup.mu = 1.0;
    SolverOptions opts;
    opts.initial_guess = GridField(d, 5.0);
    auto [u, report] = picard_solve(A, blowup, opts);
    CHECK(report.status == SolveStatus::diverged);
}

TEST_CASE("picard determinism: identical options, identical reports") {
    BoxDomain d({1.0}, {64});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    auto [u1, r1] = picard_solve(A, F, {});
    auto [u2, r2] = picard_solve(A, F, {});
    CHECK(u1.values() == u2.values());
    CHECK(r1.residual_history == r2.residual_history);
    CHECK(r1.theta_trace == r2.theta_trace);
    CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("solver options are validated") {
    BoxDomain d({1.0}, {16});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    SolverOptions bad;
    bad.theta = 0.0;
    CHECK_THROWS_AS(picard_solve(A, F, bad), std::invalid_argument);
    bad = {};
    bad.tol_residual = -1.0;
    CHECK_THROWS_AS(picard_solve(A, F, bad), std::invalid_argument);
    bad = {};
    bad.max_iter = 0;
    CHECK_THROWS_AS(picard_solve(A, F, bad), std::invalid_argument);
}

TEST_CASE("newton agrees with picard on the smooth case") {
    BoxDomain d({1.0}, {128});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    auto [u_p, rep_p] = picard_solve(A, F, {});
    auto [u_n, rep_n] = newton_solve(A, F, {});
    REQUIRE(rep_p.status == SolveStatus::converged);
    REQUIRE(rep_n.status == SolveStatus::converged);
    double diff = 0.0;
    for (std::size_t i = 0; i < u_p.size(); ++i)
        diff = std::max(diff, std::abs(u_p[i] - u_n[i]));
    CHECK(diff <= 1e-8);
}

TEST_CASE("newton with an analytic derivative") {
    BoxDomain d({1.0}, {64});
    ShiftedLaplacian A(d, 1.0);
    auto F = builtin_truncated("cubic_shift");
    ScalarFn dF = [&F](double u) { return std::abs(u) < F.a ? 3.0 * u * u : 0.0; };
    auto [u_fd, rep_fd] = newton_solve(A, F, {});
    auto [u_an, rep_an] = newton_solve(A, F, {}, dF);
    REQUIRE(rep_fd.status == SolveStatus::converged);
    REQUIRE(rep_an.status == SolveStatus::converged);
    for (std::size_t i = 0; i < u_fd.size(); ++i)
        CHECK(u_fd[i] == doctest::Approx(u_an[i]).epsilon(1e-9));
}

TEST_CASE("newton rejects discontinuous nonlinearities") {
    BoxDomain d({1.0}, {32});
    ShiftedLaplacian A(d, 1.0);
    CHECK_THROWS_AS(newton_solve(A, builtin_truncated("cubic_step"), {}), std::invalid_argument);
}

TEST_CASE("newton: zero truncation converges at once") {
    BoxDomain d({1.0}, {32});
    ShiftedLaplacian A(d, 1.0);
    auto [u, report] = newton_solve(A, builtin_truncated("sinh"), {});
    CHECK(report.status == SolveStatus::converged);
    CHECK(report.iterations <= 1);
    CHECK(sup_norm(u) == 0.0);
}
