#include <gtest/gtest.h>

#include <cmath>

#include "hmde/catalog.hpp"
#include "hmde/frontends.hpp"

using namespace hmde;

namespace {

State s1(double v) { return State::Constant(1, v); }

SolverOptions opts(double a, double step, double point_tol = 1e-13) {
    SolverOptions o;
    o.grid = TimeGrid::with_step(0, a, step);
    o.point_tol = point_tol;
    return o;
}

double sup_error(const ImpulsiveSpec& spec, const RegulatedPath& x, double lambda, double beta,
                 const std::vector<double>& taus) {
    double err = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x.grid()[i];
        err = std::max(err, std::abs(x.value(i)[0] - catalog::impulsive_linear_oracle(lambda, beta, spec.x0[0], taus, t, false)));
        err = std::max(err, std::abs(x.right(i)[0] - catalog::impulsive_linear_oracle(lambda, beta, spec.x0[0], taus, t, true)));
    }
    return err;
}

}  // namespace

TEST(Impulsive, NoImpulsesIsPlainEquation) {
    const auto spec = catalog::impulsive_linear(1.0, 0.5, 1.0, 1.0, {});
    const auto p = from_impulsive(spec, opts(1, 0.1));
    EXPECT_FALSE(p.g.has_jumps());
    EXPECT_DOUBLE_EQ(p.g.total_variation(), 1.0);
}

TEST(Impulsive, SingleJump) {
    ImpulsiveSpec spec;
    spec.t0 = 0;
    spec.a = 1;
    spec.x0 = s1(0);
    spec.f = FieldSpec::zero(1);
    spec.h = FieldSpec::zero(1);
    spec.impulses.push_back({0.5, [](const State& u) -> State { return u.array() + 1.0; }});
    const auto rep = solve_forward(from_impulsive(spec, opts(1, 0.1)));
    EXPECT_EQ(rep.solution.eval(0.5)[0], 0.0);
    EXPECT_EQ(rep.solution.eval(0.25)[0], 0.0);
    EXPECT_EQ(rep.solution.eval(0.75)[0], 1.0);
    EXPECT_EQ(rep.solution.limits(0.5).second[0], 1.0);
    const auto tab = restrict_solution(rep.solution, spec);
    for (std::size_t i = 0; i < tab.t.size(); ++i)
        EXPECT_EQ(tab.jump[i][0], detail::same_time(tab.t[i], 0.5) ? 1.0 : 0.0);
}

TEST(Impulsive, ProductFormula) {
    const std::vector<double> taus{0.25, 0.5, 0.75};
    const auto spec = catalog::impulsive_linear(1.0, 0.5, 1.0, 1.0, taus);
    const double e1 = sup_error(spec, solve_forward(from_impulsive(spec, opts(1, 1e-3))).solution, 1.0, 0.5, taus);
    const double e2 = sup_error(spec, solve_forward(from_impulsive(spec, opts(1, 5e-4))).solution, 1.0, 0.5, taus);
    EXPECT_LE(e1, 1e-3);
    EXPECT_GE(e1 / e2, 1.8);
}

TEST(Impulsive, OffGridTimesAreInserted) {
    const std::vector<double> taus{0.123, 0.777};
    const auto spec = catalog::impulsive_linear(-0.5, 0.25, 2.0, 1.0, taus);
    const auto p = from_impulsive(spec, opts(1, 0.01));
    for (double tau : taus) EXPECT_TRUE(p.options.grid.node_index(tau).has_value());
    EXPECT_LE(sup_error(spec, solve_forward(p).solution, -0.5, 0.25, taus), 1e-4);
}

TEST(Impulsive, CorrespondenceWithDirectAccumulation) {
    // x(t) = x0 + int f(s, x) ds + sum_{tau < t} I(x(tau)) using the solved path
    const std::vector<double> taus{0.3, 0.6};
    ImpulsiveSpec spec = catalog::impulsive_linear(0.7, -0.4, 1.5, 1.0, taus);
    spec.f = FieldSpec([](double t, const State& u) -> State { return s1(std::cos(t) * u[0]); });
    const auto rep = solve_forward(from_impulsive(spec, opts(1, 1e-3)));
    const auto& x = rep.solution;
    double acc = spec.x0[0];
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double t = x.grid()[i], tn = x.grid()[i + 1];
        for (double tau : taus)
            if (detail::same_time(tau, t)) acc += -0.4 * x.value(i)[0];
        acc += 0.5 * (tn - t) * (std::cos(t) * x.right(i)[0] + std::cos(tn) * x.left(i + 1)[0]);
        EXPECT_NEAR(acc, x.value(i + 1)[0], 1e-9);
    }
}

TEST(Impulsive, InvalidSpecs) {
    EXPECT_THROW(from_impulsive(catalog::impulsive_linear(1, 1, 1, 1, {0.0}), opts(1, 0.1)), InvalidArgument);
    EXPECT_THROW(from_impulsive(catalog::impulsive_linear(1, 1, 1, 1, {1.5}), opts(1, 0.1)), InvalidArgument);
    EXPECT_THROW(from_impulsive(catalog::impulsive_linear(1, 1, 1, 1, {0.5, 0.4}), opts(1, 0.1)), InvalidArgument);
    EXPECT_THROW(from_impulsive(catalog::impulsive_linear(1, 1, 1, 1, {0.5, 0.5 + 1e-13}), opts(1, 0.1)),
                 InvalidArgument);
}

TEST(TimeScale, IsolatedPointsRecursion) {
    const std::vector<double> pts{0.0, 0.5, 1.0};
    const auto spec = catalog::timescale_linear(pts, 1.0, 1.0);
    const auto p = from_timescale(spec, {}, 0.1);
    const auto tab = restrict_solution(solve_forward(p).solution, spec);
    ASSERT_EQ(tab.t.size(), 3u);
    const auto oracle = catalog::timescale_linear_oracle(pts, 1.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(tab.t[i], pts[i]);
        EXPECT_NEAR(tab.x[i][0], oracle[i], 1e-12);
    }
    EXPECT_NEAR(tab.x[2][0], 2.25, 1e-12);
}

TEST(TimeScale, ContinuousScaleIsIdentity) {
    TimeScaleSpec spec;
    spec.components = {{0.0, 1.0}};
    spec.x0 = s1(1);
    spec.f = FieldSpec([](double, const State& u) -> State { return u; });
    spec.h = FieldSpec::zero(1);
    const auto p = from_timescale(spec, {}, 0.01);
    EXPECT_FALSE(p.g.has_jumps());
    for (std::size_t i = 0; i < p.g.size(); ++i) EXPECT_NEAR(p.g(p.g.grid()[i]), p.g.grid()[i], 1e-15);
    const auto sol = solve_forward(p).solution;
    const auto tab = restrict_solution(sol, spec);
    EXPECT_EQ(tab.t.size(), sol.size());
    EXPECT_NEAR(tab.x.back()[0], std::exp(1.0), 1e-4);
}

TEST(TimeScale, MixedScaleGraininessAndGaps) {
    TimeScaleSpec spec;
    spec.components = {{0.0, 1.0}, {1.5, 1.5}, {2.0, 3.0}};
    spec.x0 = s1(1);
    spec.f = FieldSpec([](double t, const State& u) -> State { return s1(0.5 * u[0] + t); });
    spec.h = FieldSpec::zero(1);
    const auto p = from_timescale(spec, {}, 0.05);
    EXPECT_DOUBLE_EQ(p.g.jump_at(1.0), 0.5);
    EXPECT_DOUBLE_EQ(p.g.jump_at(1.5), 0.5);
    for (std::size_t i = 0; i + 1 < p.g.size(); ++i) {
        EXPECT_LE(p.g.cont(i), p.g.cont(i + 1));
        const double t = p.g.grid()[i];
        EXPECT_EQ(p.g.left_limit(t), p.g(t));
    }
    const auto sol = solve_forward(p).solution;
    EXPECT_TRUE(sol.left_continuous());
    // constant on the gap (1.5, 2]
    EXPECT_EQ(sol.eval(1.75)[0], sol.right(*sol.grid().node_index(1.5))[0]);
    EXPECT_EQ(sol.eval(2.0)[0], sol.eval(1.75)[0]);
    // recursion across the isolated point
    const double x1 = sol.eval(1.0)[0];
    const double x15 = x1 + 0.5 * (0.5 * x1 + 1.0);
    EXPECT_NEAR(sol.eval(1.5)[0], x15, 1e-12);
    EXPECT_NEAR(sol.eval(2.0)[0], x15 + 0.5 * (0.5 * x15 + 1.5), 1e-12);
}

TEST(TimeScale, InvalidSpecs) {
    TimeScaleSpec spec;
    spec.x0 = s1(1);
    spec.f = FieldSpec::zero(1);
    spec.h = FieldSpec::zero(1);
    EXPECT_THROW(from_timescale(spec, {}, 0.1), InvalidArgument);
    spec.components = {{0.0, 1.0}, {0.5, 2.0}};
    EXPECT_THROW(from_timescale(spec, {}, 0.1), InvalidArgument);
    spec.components = {{1.0, 0.0}};
    EXPECT_THROW(from_timescale(spec, {}, 0.1), InvalidArgument);
    spec.components = {{1.0, 1.0}};
    EXPECT_THROW(from_timescale(spec, {}, 0.1), InvalidArgument);
}

TEST(TimeScale, RestrictSpanMismatch) {
    const auto spec = catalog::timescale_linear({0.0, 0.5, 1.0}, 1.0, 1.0);
    EXPECT_THROW(restrict_solution(RegulatedPath::constant(TimeGrid::uniform(0, 2, 2), s1(0)), spec), SpanMismatch);
}
