#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hmde/asymptotics.hpp"
#include "hmde/catalog.hpp"

using namespace hmde;

namespace {

State s1(double v) { return State::Constant(1, v); }

HorizonProblem horizon(double H, double L, double step, double point_tol) {
    HorizonProblem hp;
    hp.base = catalog::example_3x(1.0, 1.0, 0.0, H, step, {point_tol, 1e-8, 200, 3});
    hp.chain_length = L;
    return hp;
}

FieldSpec sap_field(std::function<double(double, double)> fn, double lipschitz) {
    return FieldSpec([fn](double t, const State& u) -> State { return s1(fn(t, u[0])); })
        .with_sap_period(1.0)
        .with_phi_family([lipschitz](double t, double) { return lipschitz * t; });
}

}  // namespace

TEST(ChainSolve, TrivialIsConstant) {
    HorizonProblem hp;
    const TimeGrid grid = TimeGrid::uniform(0, 5, 50);
    hp.base.t0 = 0;
    hp.base.a = 5;
    hp.base.x0 = s1(0.4);
    hp.base.f = FieldSpec::zero(1);
    hp.base.h = FieldSpec::zero(1);
    hp.base.g = StieltjesIntegrator::identity(grid);
    hp.base.options.grid = grid;
    const auto rep = chain_solve(hp);
    EXPECT_EQ(uniform_dist(rep.solution, RegulatedPath::constant(grid, s1(0.4))), 0.0);
    EXPECT_EQ(rep.residual, 0.0);
}

TEST(ChainSolve, SingleChainMatchesSolveForward) {
    const auto hp = horizon(1.0, 1.0, 1e-3, 1e-12);
    EXPECT_LE(uniform_dist(chain_solve(hp).solution, solve_forward(hp.base).solution), 1e-12);
}

TEST(ChainSolve, ManyChainsMatchSingleSolve) {
    const auto hp = horizon(4.0, 1.0, 1e-2, 1e-15);
    const auto chained = chain_solve(hp);
    const auto single = solve_forward(hp.base);
    EXPECT_LE(uniform_dist(chained.solution, single.solution), 1e-12);
    EXPECT_LE(chained.residual, 1e-8);
    for (double j : {1.0, 2.0, 3.0}) {
        const std::size_t i = *chained.solution.grid().node_index(j);
        EXPECT_EQ(chained.solution.left(i), chained.solution.value(i));
    }
}

TEST(ChainSolve, JumpsAtJunctions) {
    auto hp = horizon(3.0, 1.0, 0.05, 1e-14);
    hp.base.g = StieltjesIntegrator::identity(hp.base.options.grid, {{1.0, 0.5}, {1.5, 0.25}});
    const auto chained = chain_solve(hp);
    const auto single = solve_forward(hp.base);
    EXPECT_LE(uniform_dist(chained.solution, single.solution), 1e-12);
    EXPECT_TRUE(chained.solution.left_continuous());
}

TEST(ChainSolve, Errors) {
    auto hp = horizon(3.0, 0.7, 0.1, 1e-12);
    EXPECT_THROW(chain_solve(hp), InvalidArgument);
    hp = horizon(2.0, 1.0, 0.1, 1e-12);
    hp.base.h = FieldSpec([](double t, const State& u) -> State { return (t > 1.5 ? 3.0 : 0.0) * u + s1(1); });
    try {
        chain_solve(hp);
        FAIL();
    } catch (const ChainFailure& e) {
        EXPECT_EQ(e.chain(), 1u);
    }
}

TEST(BoundedCondition, Examples) {
    HorizonProblem hp;
    const TimeGrid grid = TimeGrid::uniform(0, 10, 20);
    hp.base.t0 = 0;
    hp.base.a = 10;
    hp.base.x0 = s1(0);
    hp.base.h = FieldSpec::zero(1);
    hp.base.g = StieltjesIntegrator::identity(grid);
    hp.base.options.grid = grid;
    hp.base.f = FieldSpec::zero(1).with_bound_family([](double, double) { return 0.0; });
    for (double r : bounded_condition_check(hp, {1, 10, 100}).ratio) EXPECT_EQ(r, 0.0);

    hp.base.f = FieldSpec::zero(1).with_bound_family([](double, double) { return 1.0; });
    const auto rep = bounded_condition_check(hp, {5, 10, 20, 40});
    for (std::size_t i = 0; i < rep.N.size(); ++i) EXPECT_NEAR(rep.ratio[i], 10 / rep.N[i], 1e-13);
    EXPECT_TRUE(rep.pass);
    EXPECT_FALSE(bounded_condition_check(hp, {5, 10}).pass);
}

TEST(BoundedCondition, Example3xOnLongHorizon) {
    auto hp = horizon(10.0, 1.0, 0.1, 1e-12);
    const auto rep = bounded_condition_check(hp, {1, 4, 16, 64});
    // sup |h| over |u| <= N is max_t 1/2 sin^2 t ln(1 + N); int M dg = 10 e
    double s2 = 0;
    for (double t : hp.base.options.grid.times()) s2 = std::max(s2, std::pow(std::sin(t), 2));
    for (std::size_t i = 0; i < rep.N.size(); ++i) {
        const double N = rep.N[i];
        EXPECT_NEAR(rep.ratio[i], (0.5 * s2 * std::log1p(N) + 10 * std::exp(1.0)) / N, 1e-12);
    }
    EXPECT_TRUE(rep.pass);
}

TEST(Sap, PeriodicPathHasZeroGaps) {
    const auto x = RegulatedPath::sample_scalar(TimeGrid::with_step(0, 16, 1.0 / 64),
                                                [](double t) { return std::sin(2 * std::numbers::pi * t); });
    const auto prof = sap_profile(x, 1.0);
    for (double g : prof.gap) EXPECT_LE(g, 1e-12);
    EXPECT_TRUE(prof.sap);
}

TEST(Sap, ExamplePathHarmonic) {
    const auto a = catalog::harmonic_sequence(1.0);
    const auto x = generate_example_path(a, 32);
    const auto prof = sap_profile(x, 1.0);
    EXPECT_LE(prof.window_sup.back(), 0.1);
    for (std::size_t w = 0; w + 1 < prof.window_sup.size(); ++w)
        EXPECT_LE(prof.window_sup[w + 1], prof.window_sup[w]);
    // per-unit bound from the example construction
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
        const int n = static_cast<int>(std::floor(prof.t[i]));
        if (n < 2) continue;
        const double bound = 2 * std::abs(a(n + 2) - a(n + 1)) + std::abs(a(n) - a(n - 1)) +
                             2 * std::abs(a(n + 1) - a(n)) + std::abs(a(n - 1) - a(n - 2));
        EXPECT_LE(prof.gap[i], bound + 1e-15);
    }
}

TEST(Sap, NonSapPaths) {
    const auto alt = generate_example_path([](int n) { return n % 2 == 0 ? 1.0 : -1.0; }, 32);
    const auto p1 = sap_profile(alt, 1.0);
    EXPECT_FALSE(p1.sap);
    EXPECT_GE(p1.window_sup.back(), 2.0);

    const auto s = RegulatedPath::sample_scalar(TimeGrid::with_step(0, 32, 0.01), [](double t) { return std::sin(t); });
    const auto p2 = sap_profile(s, 1.0);
    EXPECT_FALSE(p2.sap);
    EXPECT_GE(p2.window_sup.back(), 0.4);
    EXPECT_NEAR(*std::max_element(p2.gap.begin(), p2.gap.end()), 2 * std::sin(0.5), 1e-3);
}

TEST(Sap, Errors) {
    const auto x = generate_example_path(catalog::harmonic_sequence(1.0), 4);
    EXPECT_THROW(sap_profile(x, 4.0), InvalidArgument);
    EXPECT_THROW(sap_profile(x, 0.0), InvalidArgument);
    EXPECT_THROW(sap_profile(x, 1.0, 0), InvalidArgument);
}

TEST(Generator, Examples) {
    const auto c = generate_example_path([](int) { return 0.7; }, 10, 3);
    EXPECT_EQ(uniform_dist(c, RegulatedPath::constant(c.grid(), s1(0.7))), 0.0);

    const auto x = generate_example_path(catalog::harmonic_sequence(1.0), 10);
    EXPECT_EQ(x.eval(1.0)[0], 0.5);
    EXPECT_EQ(x.limits(1.0).second[0], 1.0);
    EXPECT_TRUE(x.left_continuous());
    for (int n = 1; n < 10; ++n) {
        EXPECT_DOUBLE_EQ(x.eval(n)[0], 1.0 / (n + 1));
        EXPECT_DOUBLE_EQ(x.limits(n).second[0] - x.eval(n)[0], 1.0 / n - 1.0 / (n + 1));
    }
    const auto fine = generate_example_path(catalog::harmonic_sequence(1.0), 10, 4);
    EXPECT_LE(uniform_dist(fine, x), 1e-15);
}

TEST(Composition, IdentityMatchesPathProfile) {
    const auto x = generate_example_path(catalog::harmonic_sequence(2.0), 32, 8);
    const auto pc = composition_sap_check(sap_field([](double, double u) { return u; }, 1.0), x, 1.0);
    const auto px = sap_profile(x, 1.0);
    ASSERT_EQ(pc.gap.size(), px.gap.size());
    for (std::size_t i = 0; i < pc.gap.size(); ++i) EXPECT_EQ(pc.gap[i], px.gap[i]);
    EXPECT_TRUE(px.sap);
}

TEST(Composition, VanishingTails) {
    const auto x = generate_example_path(catalog::harmonic_sequence(2.0), 32, 8);
    ASSERT_TRUE(sap_profile(x, 1.0).sap);
    const auto p1 = composition_sap_check(sap_field([](double, double u) { return std::sin(u); }, 1.0), x, 1.0);
    const auto p2 = composition_sap_check(
        sap_field([](double t, double u) { return std::exp(-t) * std::sin(u) + u / 2; }, 1.5), x, 1.0);
    EXPECT_TRUE(p1.sap);
    EXPECT_TRUE(p2.sap);
}

TEST(Composition, Preconditions) {
    const auto x = generate_example_path(catalog::harmonic_sequence(1.0), 8);
    const FieldSpec bare([](double, const State& u) -> State { return u; });
    EXPECT_THROW(composition_sap_check(bare, x, 1.0), PreconditionError);
    EXPECT_THROW(composition_sap_check(bare.with_sap_period(2.0).with_phi_family([](double t, double) { return t; }), x, 1.0),
                 PreconditionError);
    EXPECT_THROW(composition_sap_check(bare.with_sap_period(1.0), x, 1.0), PreconditionError);
}
