#include <gtest/gtest.h>

#include <cmath>

#include "hmde/catalog.hpp"
#include "hmde/errors.hpp"
#include "hmde/solver.hpp"

using namespace hmde;

namespace {

State s1(double v) { return State::Constant(1, v); }

FieldSpec scalar(std::function<double(double, double)> fn) {
    return FieldSpec([fn](double t, const State& u) -> State { return s1(fn(t, u[0])); });
}

HMDEProblem make(FieldSpec f, FieldSpec h, StieltjesIntegrator g, double x0, double tol = 1e-12) {
    HMDEProblem p;
    p.t0 = g.front();
    p.a = g.back() - g.front();
    p.x0 = s1(x0);
    p.f = std::move(f);
    p.h = std::move(h);
    p.options.grid = g.grid();
    p.options.point_tol = tol;
    p.g = std::move(g);
    return p;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fn(lo) * fn(mid) <= 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(PointSolve, Examples) {
    const auto zero = FieldSpec::zero(1);
    const auto r0 = implicit_point_solve(s1(3.0), zero, 0, s1(0), 1e-14, 10);
    EXPECT_EQ(r0.x[0], 3.0);
    EXPECT_LE(r0.iterations, 1);

    const auto h = scalar([](double, double u) { return 0.5 * std::log1p(std::abs(u)); });
    EXPECT_EQ(implicit_point_solve(s1(0), h, 0, s1(0), 1e-14, 10).x[0], 0.0);

    const double root = bisect([](double x) { return x - 1 - 0.5 * std::log1p(x); }, 1, 3);
    const auto r1 = implicit_point_solve(s1(1), h, 0, s1(0), 1e-14, 200);
    EXPECT_NEAR(r1.x[0], root, 1e-13);
}

TEST(PointSolve, NonConvergenceCarriesIterates) {
    const auto h = scalar([](double, double u) { return 2 * u + 1; });
    try {
        implicit_point_solve(s1(0), h, 0.5, s1(0), 1e-12, 5);
        FAIL();
    } catch (const NonConvergence& e) {
        EXPECT_EQ(e.previous().size(), 1);
        EXPECT_NE(e.previous()[0], e.last()[0]);
    }
}

TEST(Operators, ApplyA) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
    const auto g = StieltjesIntegrator::identity(grid);
    const auto x = RegulatedPath::sample_scalar(grid, [](double t) { return std::cos(3 * t); });
    EXPECT_EQ(apply_A(make(FieldSpec::zero(1), FieldSpec::zero(1), g, 0), x).sup_norm(), 0.0);
    const auto half = scalar([](double, double u) { return u / 2; });
    EXPECT_LE(uniform_dist(apply_A(make(FieldSpec::zero(1), half, g, 0), x), 0.5 * x), 1e-16);
    const auto zero_path = RegulatedPath::constant(grid, s1(0));
    EXPECT_EQ(apply_A(make(FieldSpec::zero(1), catalog::example_3x_h(), g, 0), zero_path).sup_norm(), 0.0);
}

TEST(Operators, ApplyB) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
    const auto x = RegulatedPath::constant(grid, s1(0.3));
    const auto h = scalar([](double, double u) { return u / 4; });
    const auto b0 = apply_B(make(FieldSpec::zero(1), h, StieltjesIntegrator::identity(grid), 2.0), x);
    EXPECT_LE(uniform_dist(b0, RegulatedPath::constant(grid, s1(1.5))), 1e-15);

    const auto one = FieldSpec::constant(s1(1));
    const auto b1 = apply_B(make(one, FieldSpec::zero(1), StieltjesIntegrator::identity(grid), 2.0), x);
    EXPECT_LE(uniform_dist(b1, RegulatedPath::sample_scalar(grid, [](double t) { return 2 + t; })), 1e-15);

    const TimeGrid jg({0.0, 0.4, 1.0});
    const auto b2 = apply_B(make(one, FieldSpec::zero(1), StieltjesIntegrator::pure_jump(jg, {{0.4, 1.0}}), 2.0),
                            RegulatedPath::constant(jg, s1(0)));
    EXPECT_EQ(b2.eval(0.4)[0], 2.0);
    EXPECT_EQ(b2.limits(0.4).second[0], 3.0);
    EXPECT_EQ(b2.eval(0.7)[0], 3.0);
}

TEST(Operators, Residual) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
    const auto p = make(FieldSpec::zero(1), FieldSpec::zero(1), StieltjesIntegrator::identity(grid), 1.0);
    EXPECT_EQ(residual(p, RegulatedPath::constant(grid, s1(1.0))), 0.0);
    EXPECT_NEAR(residual(p, RegulatedPath::constant(grid, s1(1.25))), 0.25, 1e-15);
}

TEST(Solve, TrivialCases) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 16);
    const auto r0 = solve_forward(make(FieldSpec::zero(1), FieldSpec::zero(1), StieltjesIntegrator::identity(grid), 0.7));
    EXPECT_EQ(r0.residual, 0.0);
    EXPECT_LE(uniform_dist(r0.solution, RegulatedPath::constant(grid, s1(0.7))), 0.0);

    const auto r1 = solve_forward(make(FieldSpec::constant(s1(1)), FieldSpec::zero(1), StieltjesIntegrator::identity(grid), 0.0));
    EXPECT_LE(uniform_dist(r1.solution, RegulatedPath::sample_scalar(grid, [](double t) { return t; })), 1e-12);
}

TEST(Solve, Example3x) {
    const auto p = catalog::example_3x(1.0, 1.0, 0.0, 1.0, 1e-3);
    const auto rep = solve_forward(p);
    EXPECT_LE(rep.residual, 1e-6);
    EXPECT_DOUBLE_EQ(rep.residual, residual(p, rep.solution));
    EXPECT_TRUE(rep.solution.continuous_everywhere());
    EXPECT_EQ(rep.point_iters.size(), rep.solution.size());
    EXPECT_FALSE(rep.notes.empty());
}

TEST(Solve, LeftContinuousWithJumps) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 20);
    const auto g = StieltjesIntegrator::identity(grid, {{0.25, 0.5}, {0.6, 1.0}});
    const auto f = scalar([](double t, double u) { return std::cos(u) + t; });
    const auto h = scalar([](double t, double u) { return 0.25 * std::sin(t + u); });
    const auto rep = solve_forward(make(f, h, g, 0.5));
    EXPECT_TRUE(rep.solution.left_continuous());
    EXPECT_LE(rep.residual, 1e-8);
    EXPECT_GT(std::abs(rep.solution.right(5)[0] - rep.solution.value(5)[0]), 0.1);
}

TEST(Solve, InvalidJumpPlacement) {
    auto p = catalog::example_3x(1.0, 1.0, 0.0, 1.0, 0.1);
    p.g = StieltjesIntegrator::identity(TimeGrid({0.0, 0.33, 1.0}), {{0.33, 1.0}});
    EXPECT_THROW(solve_forward(p), InvalidArgument);
}

TEST(Solve, ResidualFailureAfterSweeps) {
    auto p = catalog::example_3x(1.0, 1.0, 0.0, 1.0, 0.1);
    p.options.sweep_tol = 1e-30;
    p.options.max_sweeps = 1;
    EXPECT_THROW(solve_forward(p), ResidualFailure);
}

TEST(Solve, RefinementConvergence) {
    auto solve_at = [](double step) {
        return solve_forward(catalog::example_3x(1.0, 1.0, 0.0, 1.0, step, {1e-14, 1e-8, 200, 3})).solution;
    };
    const auto ref = solve_at(1.0 / 2048);
    const double e1 = uniform_dist(solve_at(1.0 / 32), ref);
    const double e2 = uniform_dist(solve_at(1.0 / 64), ref);
    EXPECT_GE(e1 / e2, 1.8);
}

TEST(Solve, SupNormWithinCertificateRadius) {
    for (double gamma : {0.0, 0.5, 1.0, 1.5}) {
        const auto p = catalog::example_3x(gamma, 1.0, 0.0, 1.0, 1e-2);
        const auto rep = solve_forward(p);
        const auto cert = certificate_A(p);
        ASSERT_TRUE(cert.success);
        EXPECT_LE(rep.solution.sup_norm(), cert.N);
    }
}

TEST(Derivative, Examples) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
    const auto g = StieltjesIntegrator::sample(grid, [](double t) { return 3 * t; });
    const auto f = scalar([](double t, double u) { return t + u; });
    const auto x = RegulatedPath::sample_scalar(grid, [](double t) { return t * t; });
    const auto d0 = derivative_field(make(f, FieldSpec::zero(1), g, 0), x, 0.35);
    EXPECT_NEAR(d0[0], 3 * (0.35 + 0.35 * 0.35), 1e-2);

    const auto half = scalar([](double, double u) { return u / 2; });
    const auto id = StieltjesIntegrator::identity(grid);
    const auto d1 = derivative_field(make(f, half, id, 0), x, 0.5);
    EXPECT_NEAR(d1[0], 2 * (0.5 + 0.25), 1e-8);
}

TEST(Derivative, Errors) {
    const TimeGrid grid = TimeGrid::uniform(0, 1, 10);
    const auto x = RegulatedPath::constant(grid, s1(0));
    const auto jg = StieltjesIntegrator::identity(grid, {{0.5, 1.0}});
    EXPECT_THROW(derivative_field(make(FieldSpec::constant(s1(1)), FieldSpec::zero(1), jg, 0), x, 0.5),
                 DerivativeUndefined);
    const auto ident = scalar([](double, double u) { return u; });
    EXPECT_THROW(derivative_field(make(FieldSpec::constant(s1(1)), ident, StieltjesIntegrator::identity(grid), 0), x, 0.5),
                 SingularMatrix);
}

TEST(Derivative, MatchesFiniteDifferences) {
    const TimeGrid grid = TimeGrid::with_step(0, 1, 1e-3);
    const auto f = scalar([](double, double u) { return std::cos(u); });
    const auto h = scalar([](double, double u) { return u / 4; });
    const auto p = make(f, h, StieltjesIntegrator::identity(grid), 0.0);
    const auto sol = solve_forward(p).solution;
    for (std::size_t i = 100; i < 900; i += 50) {
        const double fd = (sol.value(i + 1)[0] - sol.value(i - 1)[0]) / (grid[i + 1] - grid[i - 1]);
        const double an = derivative_field(p, sol, grid[i])[0];
        EXPECT_NEAR(an, fd, 1e-3 * std::abs(fd));
    }
}
