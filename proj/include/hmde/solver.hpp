#pragma once

// Solver for the hybrid measure differential equation
//
//     x(t) = x0 - h(t0, x0) + h(t, x(t)) + int_{t0}^t f(s, x(s)) dg(s),  t in [t0, t0 + a].
//
// The equation is split as x = A x + B x with
//
//     A x(t) = h(t, x(t)),    B x(t) = x0 - h(t0, x0) + int_{t0}^t f(s, x(s)) dg(s).
//
// solve_forward marches over the grid. Only h is implicit at a node (the
// integral up to t only needs x on [t0, t]), so every node is a fixed-point
// problem x = c + h(t, x), solved by plain iteration; convergence rests on h
// being a nonlinear D-contraction in u. The continuous part of each cell uses a
// left-rectangle predictor and trapezoid corrector, jump contributions are
// exact. Existence theory does not give uniqueness: the result is the unique
// output of this deterministic scheme, other solutions may exist.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/ks_integral.hpp"
#include "hmde/regulated.hpp"

namespace hmde {

struct SolverOptions {
    TimeGrid grid;
    double point_tol = 1e-12;
    int point_max_iter = 200;
    double sweep_tol = 1e-8;
    int max_sweeps = 3;
};

struct HMDEProblem {
    double t0 = 0.0;
    double a = 1.0;
    State x0;
    FieldSpec f;
    FieldSpec h;
    StieltjesIntegrator g;
    SolverOptions options;

    double t_end() const { return t0 + a; }
    Eigen::Index dim() const { return x0.size(); }

    void validate() const {
        if (!(a > 0) || !std::isfinite(a)) throw InvalidArgument("HMDEProblem: a must be positive");
        if (x0.size() == 0 || !x0.allFinite()) throw InvalidArgument("HMDEProblem: x0 must be finite and non-empty");
        if (!f.valid() || !h.valid()) throw InvalidArgument("HMDEProblem: f and h need handles");
        const TimeGrid& grid = options.grid;
        if (grid.size() < 2) throw InvalidArgument("HMDEProblem: options.grid is empty");
        if (grid.front() != t0 || !detail::same_time(grid.back(), t_end()))
            throw SpanMismatch("HMDEProblem: grid must span [t0, t0 + a]");
        grid.require_same_span(g.grid());
        for (const Jump& j : g.jumps())
            if (!grid.node_index(j.time))
                throw InvalidArgument("HMDEProblem: jump of g at t = " + detail::fmt_time(j.time) +
                                      " is not a node of the solver grid");
        if (!(options.point_tol > 0) || !(options.sweep_tol > 0) || options.point_max_iter < 1 ||
            options.max_sweeps < 0)
            throw InvalidArgument("HMDEProblem: invalid solver tolerances");
    }

    /// Solver grid merged with g's grid.
    TimeGrid march_grid() const { return options.grid.merged(g.grid()); }
};

/// Existence certificate: a radius N for which the fixed-point inequality holds.
struct CertificateResult {
    bool success = false;
    double N = 0.0;
    double H0 = 0.0;
    double K0 = 0.0;     ///< int M dg (for the family variant: int M(., N) dg)
    double margin = 0.0; ///< inequality left side minus 1; negative on success
};

struct SolveReport {
    RegulatedPath solution;
    double residual = 0.0;
    std::vector<int> point_iters;  ///< fixed-point iterations spent per node
    int sweeps = 0;                ///< global passes beyond the first march
    std::optional<CertificateResult> certificate;
    std::vector<std::string> notes;
};

struct PointSolve {
    State x;
    int iterations = 0;
};

/// Fixed point of x = c + h(t, x) by iteration from x_init. Returns x with
/// |x - (c + h(t, x))| <= tol.
inline PointSolve implicit_point_solve(const State& c, const FieldSpec& h, double t,
                                       const State& x_init, double tol, int max_iter) {
    State x = x_init;
    State prev = x_init;
    for (int it = 0; it <= max_iter; ++it) {
        State next = c + h.value_at(t, x);
        if (!next.allFinite()) {
            std::ostringstream os;
            os.precision(17);
            os << "implicit_point_solve: non-finite iterate at t = " << t;
            throw EvaluationError(os.str());
        }
        if ((next - x).norm() <= tol) return {x, it};
        prev = x;
        x = std::move(next);
    }
    std::ostringstream os;
    os.precision(17);
    os << "implicit_point_solve: no convergence at t = " << t << " after " << max_iter
       << " iterations (h may violate phi(t) < t, or tol is too tight); last step "
       << (x - prev).norm();
    throw NonConvergence(os.str(), prev, x);
}

inline RegulatedPath apply_A(const HMDEProblem& problem, const RegulatedPath& x) {
    return compose_integrand(problem.h, x);
}

inline RegulatedPath apply_B(const HMDEProblem& problem, const RegulatedPath& x) {
    const State c0 = problem.x0 - problem.h.value_at(problem.t0, problem.x0);
    return indefinite_integral(compose_integrand(problem.f, x), problem.g, problem.t0) + c0;
}

/// Sup-norm defect |x - (A x + B x)|.
inline double residual(const HMDEProblem& problem, const RegulatedPath& x) {
    return uniform_dist(x, apply_A(problem, x) + apply_B(problem, x));
}

namespace detail {

inline RegulatedPath march(const HMDEProblem& p, const TimeGrid& grid, const StieltjesIntegrator& g,
                           double point_tol, const RegulatedPath* predictor,
                           std::vector<int>& iters) {
    const std::size_t n = grid.size();
    const State c0 = p.x0 - p.h.value_at(p.t0, p.x0);
    std::vector<State> left(n), value(n), right(n);
    iters.assign(n, 0);
    value[0] = left[0] = p.x0;
    State acc = State::Zero(p.dim());  // int_{t0}^{t_i} f dg

    auto point = [&](const State& c, double t, const State& init, std::size_t node) {
        try {
            PointSolve s = implicit_point_solve(c, p.h, t, init, point_tol, p.options.point_max_iter);
            iters[node] += s.iterations;
            return s.x;
        } catch (const NonConvergence& e) {
            throw NonConvergence(std::string(e.what()) + " (node " + std::to_string(node) + ")",
                                 e.previous(), e.last());
        }
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = grid[i];
        // Right limit: x(t+) = c0 + acc + f(t, x(t)) delta + h(t, x(t+)).
        State acc_r = acc;
        State x_r = value[i];
        if (const double delta = g.node_jump(i); delta > 0) {
            acc_r += delta * p.f.value_at(t, value[i]);
            x_r = point(c0 + acc_r, t, value[i], i);
        }
        right[i] = x_r;

        const double t_next = grid[i + 1];
        const double inc = g.cell_increment(i);
        const State f_r = p.f.limit_at(t, x_r);

        State x_cur = predictor ? predictor->value(i + 1)
                                : point(c0 + acc_r + inc * f_r, t_next, x_r, i + 1);
        bool converged = false;
        State x_prev = x_cur;
        for (int k = 0; k < p.options.point_max_iter; ++k) {
            const State c = c0 + acc_r + 0.5 * inc * (f_r + p.f.limit_at(t_next, x_cur));
            State x_new = point(c, t_next, x_cur, i + 1);
            const double step = (x_new - x_cur).norm();
            x_prev = x_cur;
            x_cur = std::move(x_new);
            if (step <= point_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream os;
            os.precision(17);
            os << "solve_forward: corrector did not converge at t = " << t_next << " (node "
               << i + 1 << ")";
            throw NonConvergence(os.str(), x_prev, x_cur);
        }
        acc = acc_r + 0.5 * inc * (f_r + p.f.limit_at(t_next, x_cur));
        left[i + 1] = value[i + 1] = x_cur;
    }
    right[n - 1] = value[n - 1];
    return RegulatedPath(grid, std::move(left), std::move(value), std::move(right));
}

} // namespace detail

/// Forward march with per-node fixed-point solves, followed by up to
/// max_sweeps global passes (previous path as predictor, point_tol tightened
/// tenfold per pass) while the whole-path residual exceeds sweep_tol.
inline SolveReport solve_forward(const HMDEProblem& problem) {
    problem.validate();
    const TimeGrid grid = problem.march_grid();
    const StieltjesIntegrator g = problem.g.grid() == grid ? problem.g : problem.g.regrid(grid);

    SolveReport rep;
    double tol = problem.options.point_tol;
    rep.solution = detail::march(problem, grid, g, tol, nullptr, rep.point_iters);
    rep.residual = residual(problem, rep.solution);
    while (rep.residual > problem.options.sweep_tol && rep.sweeps < problem.options.max_sweeps) {
        tol /= 10.0;
        std::vector<int> iters;
        RegulatedPath next = detail::march(problem, grid, g, tol, &rep.solution, iters);
        for (std::size_t i = 0; i < iters.size(); ++i) rep.point_iters[i] += iters[i];
        rep.solution = std::move(next);
        rep.residual = residual(problem, rep.solution);
        ++rep.sweeps;
    }
    if (rep.residual > problem.options.sweep_tol) {
        std::ostringstream os;
        os.precision(6);
        os << "solve_forward: residual " << rep.residual << " exceeds sweep_tol "
           << problem.options.sweep_tol << " after " << rep.sweeps
           << " sweeps; refine the grid or loosen the tolerance";
        throw ResidualFailure(os.str(), rep.residual);
    }
    if (problem.h.phi()) {
        try {
            validate_d_function(problem.h.phi(), "h.phi");
            rep.notes.push_back("h.phi passed D-function validation on the sample set (evidence, not proof)");
        } catch (const PreconditionError& e) {
            rep.notes.push_back(std::string("warning: ") + e.what());
        }
    }
    return rep;
}

/// x'(t) = (I - J_u h(t, x(t)))^{-1} (dh/dt(t, x(t)) + f(t, x(t)) g'(t)) with
/// central finite differences (relative step 1e-6) for J_u h and dh/dt.
/// g'(t) is the slope of g's continuous part; at a node, the mean of the two
/// adjacent cell slopes.
inline State derivative_field(const HMDEProblem& problem, const RegulatedPath& x, double t) {
    const auto& g = problem.g;
    g.grid().require_contains(t);
    if (g.jump_at(t) > 0)
        throw DerivativeUndefined("derivative_field: t = " + detail::fmt_time(t) + " is a jump of g");

    double slope = 0.0;
    const auto& gg = g.grid();
    if (auto k = gg.node_index(t)) {
        if (*k == 0) slope = g.cell_slope(0);
        else if (*k + 1 == gg.size()) slope = g.cell_slope(*k - 1);
        else slope = 0.5 * (g.cell_slope(*k - 1) + g.cell_slope(*k));
    } else {
        slope = g.cell_slope(gg.cell(t));
    }

    const State u = x.eval(t);
    const Eigen::Index n = u.size();
    const FieldFn& h = problem.h.base();
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double e = 1e-6 * std::max(1.0, std::abs(u[j]));
        State up = u, dn = u;
        up[j] += e;
        dn[j] -= e;
        jac.col(j) = (h(t, up) - h(t, dn)) / (2 * e);
    }
    const double et = 1e-6 * std::max(1.0, std::abs(t));
    const State dhdt = (h(t + et, u) - h(t - et, u)) / (2 * et);
    const State rhs = dhdt + problem.f.limit_at(t, u) * slope;

    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - jac;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) {
        std::ostringstream os;
        os.precision(6);
        os << "derivative_field: I - J_u h is singular at t = " << t << " (condition estimate "
           << (rcond > 0 ? 1.0 / rcond : INFINITY) << ")";
        throw SingularMatrix(os.str());
    }
    return lu.solve(rhs);
}

} // namespace hmde
