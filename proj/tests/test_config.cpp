#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semicert/config.hpp"
#include "semicert/runner.hpp"

using namespace semicert;

namespace {

const char* kMinimalConfig = R"(
[domain]
dim = 1
cells = 32

[nonlinearity]
builtin = cubic_shift
)";

std::string temp_path(const std::string& name) {
    return std::string("/tmp/semicert_test_") + name;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
    auto result = parse_config_text(kMinimalConfig);
    REQUIRE(result.config.has_value());
    CHECK(result.errors.empty());
    const RunConfig& cfg = *result.config;
    CHECK(cfg.domain.dim == 1);
    CHECK(cfg.domain.cells == std::vector<int>{32});
    CHECK(cfg.k == 1.0);
    CHECK(cfg.solver.theta == 0.5);
    CHECK(cfg.solver.max_iter == 500);
    CHECK(cfg.nonlinearity.builtin_label == "cubic_shift");
}

TEST_CASE("validation collects every error") {
    auto result = parse_config_text(R"(
[domain]
dim = 5
cells = 1

[equation]
k = 0

[nonlinearity]
builtin = no_such_thing

[solver]
theta = 2.0
)");
    CHECK_FALSE(result.config.has_value());
    CHECK(result.errors.size() >= 4);
    auto has = [&](const std::string& needle) {
        for (const auto& e : result.errors)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    };
    CHECK(has("k must be positive"));
    CHECK(has("unknown builtin"));
    CHECK(has("dim must be"));
    CHECK(has("theta"));
}

TEST_CASE("discontinuity outside [-a, a] is rejected") {
    auto result = parse_config_text(R"(
[domain]
dim = 1
cells = 16

[nonlinearity]
kind = piecewise
a = 1.0
table = -1:-2, 1:0
discontinuities = 2.0:0:1
)");
    CHECK_FALSE(result.config.has_value());
    bool found = false;
    for (const auto& e : result.errors)
        if (e.find("outside [-a, a]") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("malformed piecewise table") {
    auto result = parse_config_text(R"(
[domain]
dim = 1
cells = 16

[nonlinearity]
kind = piecewise
a = 1.0
table = -1:-2, oops
)");
    CHECK_FALSE(result.config.has_value());

    auto sparse = parse_config_text(R"(
[domain]
dim = 1
cells = 16

[nonlinearity]
kind = piecewise
a = 1.0
table = -0.5:-2, 0.5:0
)");
    CHECK_FALSE(sparse.config.has_value());  // table must cover [-a, a]
}

TEST_CASE("missing file") {
    auto result = parse_config("/nonexistent/path.ini");
    CHECK_FALSE(result.config.has_value());
    REQUIRE(result.errors.size() == 1);
}

TEST_CASE("config round trip") {
    RunConfig cfg;
    cfg.domain = {2, {1.0, 2.0}, {16, 32}};
    cfg.k = 1.75;
    cfg.nonlinearity.kind = NonlinearitySpec::Kind::piecewise;
    cfg.nonlinearity.builtin_label = "cubic_shift";  // ignored for piecewise
    cfg.nonlinearity.a = 1.0;
    cfg.nonlinearity.table = {{-1.0, -2.0}, {0.0, -1.0}, {1.0, 0.0}};
    cfg.nonlinearity.discontinuities = {{0.25, -1.234375, -0.734375}};
    cfg.solver.theta = 0.375;
    cfg.solver.anderson_depth = 3;
    cfg.solver.initial = SolverSpec::Initial::constant;
    cfg.solver.initial_constant = 0.125;
    cfg.certificates.tol_amp = 1e-6;

    auto parsed = parse_config_text(write_config(cfg));
    REQUIRE(parsed.config.has_value());
    // builtin_label is not serialized for piecewise configs
    parsed.config->nonlinearity.builtin_label = cfg.nonlinearity.builtin_label;
    CHECK(*parsed.config == cfg);

    RunConfig builtin_cfg;
    auto parsed2 = parse_config_text(write_config(builtin_cfg));
    REQUIRE(parsed2.config.has_value());
    CHECK(*parsed2.config == builtin_cfg);
}

TEST_CASE("piecewise nonlinearity interpolates and splits at jumps") {
    NonlinearitySpec spec;
    spec.kind = NonlinearitySpec::Kind::piecewise;
    spec.a = 1.0;
    spec.table = {{-1.0, -2.0}, {0.0, -1.0}, {1.0, 0.0}};
    spec.discontinuities = {{0.5, -0.75, -0.25}};
    Nonlinearity f = make_nonlinearity(spec);

    CHECK(evaluate(f, -0.5) == doctest::Approx(-1.5));
    CHECK(evaluate(f, 0.25) == doctest::Approx(-0.875));   // toward the left limit
    CHECK(evaluate(f, 0.5) == doctest::Approx(-0.5));      // midpoint of the jump
    CHECK(evaluate(f, 0.75) == doctest::Approx(-0.125));   // right limit toward f(1)
    CHECK(evaluate(f, 1.0) == doctest::Approx(0.0));
    CHECK(evaluate(f, 2.0) == doctest::Approx(0.5));  // linear extension of the last segment
}

TEST_CASE("run_solve writes CSV with boundary rows and a report") {
    RunConfig cfg;
    cfg.domain = {1, {1.0}, {16}};
    cfg.nonlinearity.builtin_label = "cubic_shift";
    cfg.output.solution_csv = temp_path("sol.csv");
    cfg.output.report_json = temp_path("rep.json");

    RunOutcome outcome = run_solve(cfg);
    CHECK(outcome.exit_code == kExitOk);

    std::ifstream csv(cfg.output.solution_csv);
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,u");
    int rows = 0;
    double first_x = -1.0, first_u = -1.0;
    std::string line;
    while (std::getline(csv, line)) {
        if (rows == 0) std::sscanf(line.c_str(), "%lf,%lf", &first_x, &first_u);
        ++rows;
    }
    CHECK(rows == 17);  // 15 interior + 2 boundary nodes
    CHECK(first_x == 0.0);
    CHECK(first_u == 0.0);

    std::ifstream rep(cfg.output.report_json);
    REQUIRE(rep.good());
    auto j = nlohmann::json::parse(rep);
    CHECK(j["solve"]["status"] == "converged");
    CHECK(j["certificates"]["residual"]["pass"].get<bool>());
    CHECK(j.contains("hash"));
    CHECK(j.contains("timings"));
    std::remove(cfg.output.solution_csv.c_str());
    std::remove(cfg.output.report_json.c_str());
}

TEST_CASE("sign-condition failure aborts with a witness and exit code 1") {
    RunConfig cfg;
    cfg.domain = {1, {1.0}, {16}};
    cfg.nonlinearity.kind = NonlinearitySpec::Kind::piecewise;
    cfg.nonlinearity.a = 1.0;
    cfg.nonlinearity.table = {{-10.0, 10.0}, {10.0, -10.0}};  // f = -u
    cfg.output.report_json = temp_path("abort.json");
    cfg.output.solution_csv = temp_path("abort.csv");

    RunOutcome outcome = run_solve(cfg, false);
    CHECK(outcome.exit_code == kExitValidation);
    CHECK_FALSE(outcome.report["sign_check"]["pass"].get<bool>());
    CHECK_FALSE(outcome.report["sign_check"]["witness"].is_null());
    CHECK_FALSE(outcome.report.contains("solve"));
}

TEST_CASE("sinh run produces an all-zero solution CSV") {
    RunConfig cfg;
    cfg.domain = {1, {1.0}, {16}};
    cfg.nonlinearity.builtin_label = "sinh";
    RunOutcome outcome = run_solve(cfg, false);
    CHECK(outcome.exit_code == kExitOk);
    REQUIRE(outcome.solution.has_value());
    CHECK(sup_norm(*outcome.solution) == 0.0);
    std::istringstream csv(solution_csv_text(*outcome.solution));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        const auto comma = line.rfind(',');
        CHECK(std::stod(line.substr(comma + 1)) == 0.0);
    }
}

TEST_CASE("determinism: identical config gives identical run hash") {
    RunConfig cfg;
    cfg.domain = {1, {1.0}, {32}};
    cfg.nonlinearity.builtin_label = "cubic_shift";
    RunOutcome a = run_solve(cfg, false);
    RunOutcome b = run_solve(cfg, false);
    CHECK(a.report["hash"] == b.report["hash"]);
    CHECK(a.report["solve"] == b.report["solve"]);
}

TEST_CASE("convergence study validates the level count") {
    RunConfig cfg;
    cfg.domain = {1, {1.0}, {16}};
    cfg.nonlinearity.builtin_label = "cubic_shift";
    CHECK_THROWS_AS(run_convergence_study(cfg, 2), std::invalid_argument);
}

TEST_CASE("kernel check requires dim = 3") {
    RunConfig cfg;
    cfg.domain = {2, {1.0, 1.0}, {8, 8}};
    cfg.nonlinearity.builtin_label = "cubic_shift";
    CHECK_THROWS_AS(run_kernel_check(cfg), std::invalid_argument);
}
