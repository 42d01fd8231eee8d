#pragma once

// Parametric problem families used by the batch front end and the test suites.

#include <cmath>
#include <functional>
#include <vector>

#include "hmde/asymptotics.hpp"
#include "hmde/dependence.hpp"
#include "hmde/field.hpp"
#include "hmde/frontends.hpp"
#include "hmde/regulated.hpp"
#include "hmde/solver.hpp"

namespace hmde::catalog {

/// h(t, u) = 1/2 sin^2(t) ln(1 + |u|), contraction modulus phi(t) = 1/2 ln(1 + t).
inline FieldSpec example_3x_h() {
    auto phi = [](double t) { return 0.5 * std::log1p(t); };
    return FieldSpec([](double t, const State& u) -> State {
               const double s = std::sin(t);
               return State::Constant(1, 0.5 * s * s * std::log1p(std::abs(u[0])));
           })
        .with_phi(phi)
        .with_phi_family([phi](double t, double) { return phi(t); });
}

/// f(s, z) = eta e^{gamma cos z}; bound M(s) = e^gamma eta sampled on `grid`.
inline FieldSpec example_3x_f(double gamma, double eta, const TimeGrid& grid) {
    const double m = std::exp(gamma) * eta;
    return FieldSpec([gamma, eta](double, const State& u) -> State {
               return State::Constant(1, eta * std::exp(gamma * std::cos(u[0])));
           })
        .with_bound(RegulatedPath::constant(grid, State::Constant(1, m)))
        .with_bound_family([m](double, double) { return m; });
}

struct SolveTolerances {
    double point_tol = 1e-12;
    double sweep_tol = 1e-8;
    int point_max_iter = 200;
    int max_sweeps = 3;
};

inline SolverOptions make_options(TimeGrid grid, const SolveTolerances& tol) {
    SolverOptions o;
    o.grid = std::move(grid);
    o.point_tol = tol.point_tol;
    o.sweep_tol = tol.sweep_tol;
    o.point_max_iter = tol.point_max_iter;
    o.max_sweeps = tol.max_sweeps;
    return o;
}

/// x(t) = 1/2 sin^2(t) ln(1+|x(t)|) + int_0^t eta e^{gamma cos x} dg, g = identity on [0, a].
inline HMDEProblem example_3x(double gamma, double eta, double x0, double a, double step,
                              const SolveTolerances& tol = {}) {
    const TimeGrid grid = TimeGrid::with_step(0.0, a, step);
    HMDEProblem p;
    p.t0 = 0.0;
    p.a = a;
    p.x0 = State::Constant(1, x0);
    p.f = example_3x_f(gamma, eta, grid);
    p.h = example_3x_h();
    p.g = StieltjesIntegrator::identity(grid);
    p.options = make_options(grid, tol);
    return p;
}

/// x' = lambda x with x(tau_j+) = (1 + beta) x(tau_j).
inline ImpulsiveSpec impulsive_linear(double lambda, double beta, double x0, double a,
                                      const std::vector<double>& taus) {
    ImpulsiveSpec s;
    s.t0 = 0.0;
    s.a = a;
    s.x0 = State::Constant(1, x0);
    s.f = FieldSpec([lambda](double, const State& u) -> State { return lambda * u; });
    s.h = FieldSpec::zero(1);
    for (double tau : taus) s.impulses.push_back({tau, [beta](const State& u) -> State { return beta * u; }});
    return s;
}

/// Closed form x0 e^{lambda t} prod_{tau_j < t} (1 + beta) (strict: the impulse at tau_j
/// shows only after tau_j).
inline double impulsive_linear_oracle(double lambda, double beta, double x0,
                                      const std::vector<double>& taus, double t, bool right_limit) {
    double x = x0 * std::exp(lambda * t);
    for (double tau : taus)
        if (tau < t || (right_limit && tau == t)) x *= 1.0 + beta;
    return x;
}

/// x^Delta = c x on the isolated points T = {points}.
inline TimeScaleSpec timescale_linear(const std::vector<double>& points, double coefficient, double x0) {
    TimeScaleSpec s;
    for (double p : points) s.components.push_back({p, p});
    s.x0 = State::Constant(1, x0);
    s.f = FieldSpec([coefficient](double, const State& u) -> State { return coefficient * u; });
    s.h = FieldSpec::zero(1);
    return s;
}

/// Discrete recursion x(sigma(t)) = x(t) + mu(t) c x(t) on isolated points.
inline std::vector<double> timescale_linear_oracle(const std::vector<double>& points, double coefficient,
                                                   double x0) {
    std::vector<double> x{x0};
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        x.push_back(x.back() + (points[i + 1] - points[i]) * coefficient * x.back());
    return x;
}

/// a_n = 1/(n+1)^power.
inline std::function<double(int)> harmonic_sequence(double power) {
    return [power](int n) { return 1.0 / std::pow(n + 1.0, power); };
}

/// Limit data from example_3x and members f_k = f + (1/k) sin(t); h_k = h, x^_k = x0.
inline ParamSequence dependence_sin(const HMDEProblem& base, int k_max) {
    ParamSequence seq;
    seq.base = base;
    seq.k_max = k_max;
    const FieldSpec f = base.f;
    const FieldSpec h = base.h;
    const State x0 = base.x0;
    const RegulatedPath& grid_m = *base.f.bound_path();
    seq.member = [f, h, x0, grid_m](int k) {
        const double inv = 1.0 / k;
        FieldSpec fk([f, inv](double t, const State& u) -> State {
            return f.value_at(t, u) + State::Constant(u.size(), inv * std::sin(t));
        });
        fk = fk.with_bound(grid_m + State::Constant(1, inv));
        return SequenceMember{fk, h, x0};
    };
    return seq;
}

} // namespace hmde::catalog
