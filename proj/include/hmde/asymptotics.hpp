#pragma once

// Long-horizon solving by chaining unit intervals, and detection of
// S-asymptotic omega-periodicity (x(t + omega) - x(t) -> 0) on a finite
// horizon. Classification is always "SAP at tolerance eps over horizon H",
// never an unqualified claim: the limit t -> infinity cannot be observed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hmde/certificate.hpp"
#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/frontends.hpp"
#include "hmde/ks_integral.hpp"
#include "hmde/regulated.hpp"
#include "hmde/solver.hpp"

namespace hmde {

inline constexpr double kSapDefaultEps = 1e-3;
inline constexpr int kSapDefaultWindows = 8;

/// HMDE data on [t0, t0 + H] solved chain by chain over intervals of length L.
struct HorizonProblem {
    HMDEProblem base;  ///< base.a is the horizon H
    double chain_length = 1.0;

    std::size_t chains() const {
        const double q = base.a / chain_length;
        const double k = std::round(q);
        if (!(chain_length > 0) || k < 1 || std::abs(q - k) > 1e-9 * std::max(1.0, q))
            throw InvalidArgument("HorizonProblem: horizon must be a positive multiple of the chain length");
        return static_cast<std::size_t>(k);
    }
};

/// Solves [t0 + kL, t0 + (k+1)L] in turn, each chain starting from the previous
/// chain's terminal value. Junction nodes keep the left limit of the earlier
/// chain and value / right limit of the later one. The reported residual is
/// over the whole horizon.
inline SolveReport chain_solve(const HorizonProblem& hp) {
    const HMDEProblem& base = hp.base;
    base.validate();
    const std::size_t K = hp.chains();
    std::vector<double> junctions;
    for (std::size_t k = 1; k < K; ++k)
        junctions.push_back(base.t0 + static_cast<double>(k) * hp.chain_length);
    const TimeGrid grid = detail::snap_points(base.march_grid(), junctions).merged(base.g.grid());
    const StieltjesIntegrator g = base.g.regrid(grid);

    std::vector<double> t;
    std::vector<State> l, v, r;
    std::vector<int> iters;
    int sweeps = 0;
    State x_start = base.x0;
    for (std::size_t k = 0; k < K; ++k) {
        const double c = k == 0 ? base.t0 : junctions[k - 1];
        const double d = k + 1 == K ? grid.back() : junctions[k];
        HMDEProblem sub = base;
        sub.t0 = c;
        sub.a = d - c;
        sub.x0 = x_start;
        sub.g = g.restricted(c, d);
        sub.options.grid = grid.restricted(c, d);
        SolveReport rep;
        try {
            rep = solve_forward(sub);
        } catch (const Error& e) {
            throw ChainFailure("chain " + std::to_string(k) + " on [" + detail::fmt_time(c) + ", " +
                                   detail::fmt_time(d) + "]: " + e.what(),
                               k);
        }
        sweeps = std::max(sweeps, rep.sweeps);
        const RegulatedPath& s = rep.solution;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (k > 0 && i == 0) {
                // junction: left limit from the previous chain
                v.back() = s.value(0);
                r.back() = s.right(0);
                iters.back() += rep.point_iters[0];
                continue;
            }
            t.push_back(s.grid()[i]);
            l.push_back(s.left(i));
            v.push_back(s.value(i));
            r.push_back(s.right(i));
            iters.push_back(rep.point_iters[i]);
        }
        x_start = s.value(s.size() - 1);
    }
    SolveReport out;
    out.solution = RegulatedPath(TimeGrid(std::move(t)), std::move(l), std::move(v), std::move(r));
    HMDEProblem whole = base;
    whole.options.grid = out.solution.grid();
    whole.g = g.grid() == out.solution.grid() ? g : g.regrid(out.solution.grid());
    out.residual = residual(whole, out.solution);
    out.point_iters = std::move(iters);
    out.sweeps = sweeps;
    return out;
}

struct BoundedConditionReport {
    std::vector<double> N;
    std::vector<double> ratio;  ///< (sup |h(t,u)| + int M(., N) dg) / N
    bool pass = false;          ///< some ratio < 1
};

/// u-sample set for the ball of radius N in R^n: radii {0, N/4, N/2, 3N/4, N}
/// along the directions +-e_i and +-(1, ..., 1)/sqrt(n).
inline std::vector<State> ball_samples(Eigen::Index n, double N) {
    std::vector<State> dirs;
    for (Eigen::Index i = 0; i < n; ++i) {
        dirs.push_back(State::Unit(n, i));
        dirs.push_back(-State::Unit(n, i));
    }
    if (n > 1) {
        const State diag = State::Ones(n) / std::sqrt(static_cast<double>(n));
        dirs.push_back(diag);
        dirs.push_back(-diag);
    }
    std::vector<State> out{State::Zero(n)};
    for (double frac : {0.25, 0.5, 0.75, 1.0})
        for (const auto& d : dirs) out.push_back(frac * N * d);
    return out;
}

/// Evaluates the bounded-solution ratio for each candidate radius.
inline BoundedConditionReport bounded_condition_check(const HorizonProblem& hp,
                                                      const std::vector<double>& N_samples) {
    const HMDEProblem& p = hp.base;
    if (!p.f.bound_family())
        throw PreconditionError("bounded_condition_check: f carries no bound family M(., r)");
    BoundedConditionReport rep;
    for (double N : N_samples) {
        if (!(N > 0)) throw InvalidArgument("bounded_condition_check: radii must be positive");
        double hsup = 0.0;
        const auto us = ball_samples(p.dim(), N);
        for (double t : p.options.grid.times())
            for (const auto& u : us) hsup = std::max(hsup, p.h.value_at(t, u).norm());
        const double K = ks_integral(detail::sample_bound_family(p.f.bound_family(), p.g.grid(), N),
                                     p.g, p.g.front(), p.g.back())[0];
        rep.N.push_back(N);
        rep.ratio.push_back((hsup + K) / N);
        if (rep.ratio.back() < 1.0) rep.pass = true;
    }
    return rep;
}

struct SapProfile {
    double omega = 0.0;
    double eps = kSapDefaultEps;
    std::vector<double> t;           ///< sample times in [t0, H - omega]
    std::vector<double> gap;         ///< |x(t + omega) - x(t)|, max over one-sided limits
    std::vector<double> window_sup;  ///< per-window sup of gap
    bool sap = false;                ///< final window sup <= eps
};

/// Gap profile t -> |x(t + omega) - x(t)|. Samples are the nodes and the nodes
/// shifted by -omega, so the gap is linear between samples; at each sample the
/// left limit, value and right limit gaps are all taken (no left limit at t0,
/// no right limit at the end of the path).
inline SapProfile sap_profile(const RegulatedPath& path, double omega, int windows = kSapDefaultWindows,
                              double eps = kSapDefaultEps) {
    const double t0 = path.front();
    const double end = path.back() - omega;
    if (!(omega > 0) || !(omega < path.back() - t0))
        throw InvalidArgument("sap_profile: omega must lie in (0, span length)");
    if (windows < 1) throw InvalidArgument("sap_profile: need at least one window");
    std::vector<double> s;
    for (double t : path.grid().times()) {
        if (t <= end) s.push_back(t);
        if (t - omega >= t0) s.push_back(std::min(t - omega, end));
    }
    s.push_back(end);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());

    SapProfile prof;
    prof.omega = omega;
    prof.eps = eps;
    prof.window_sup.assign(static_cast<std::size_t>(windows), 0.0);
    const double width = (end - t0) / windows;
    for (double t : s) {
        const double ts = std::min(t + omega, path.back());
        const auto [xl, xr] = path.limits(t);
        const auto [yl, yr] = path.limits(ts);
        double gap = (path.eval(ts) - path.eval(t)).norm();
        if (t > t0) gap = std::max(gap, (yl - xl).norm());
        if (ts < path.back()) gap = std::max(gap, (yr - xr).norm());
        prof.t.push_back(t);
        prof.gap.push_back(gap);
        auto w = static_cast<std::size_t>(std::floor((t - t0) / width));
        w = std::min(w, prof.window_sup.size() - 1);
        prof.window_sup[w] = std::max(prof.window_sup[w], gap);
    }
    prof.sap = prof.window_sup.back() <= eps;
    return prof;
}

/// Piecewise-linear left-continuous path with x(n) = a_n and Delta+x(n) = a_{n-1} - a_n:
///
///   x(t) = a_1 + (a_1 - a_0)(t - 1)                 on [0, 1]
///   x(t) = a_{n+1} + (a_{n+1} - a_{n-1})(t - n - 1)  on (n, n + 1]
///
/// `nodes_per_unit` adds interior nodes (the path is linear there anyway).
inline RegulatedPath generate_example_path(const std::function<double(int)>& a, double H,
                                           int nodes_per_unit = 1) {
    if (!(H > 0)) throw InvalidArgument("generate_example_path: horizon must be positive");
    if (nodes_per_unit < 1) throw InvalidArgument("generate_example_path: nodes_per_unit must be >= 1");
    auto formula = [&](double t) {
        if (t <= 1.0) return a(1) + (a(1) - a(0)) * (t - 1.0);
        const int n = static_cast<int>(std::ceil(t)) - 1;  // t in (n, n + 1]
        return a(n + 1) + (a(n + 1) - a(n - 1)) * (t - n - 1.0);
    };
    std::vector<double> t;
    std::vector<State> l, v, r;
    const int whole = static_cast<int>(std::floor(H));
    for (int n = 0; n <= whole; ++n) {
        const double tn = n;
        t.push_back(tn);
        const double an = a(n);
        l.push_back(State::Constant(1, an));
        v.push_back(State::Constant(1, an));
        r.push_back(State::Constant(1, n >= 1 && tn < H ? a(n - 1) : an));
        if (tn >= H) break;
        for (int k = 1; k < nodes_per_unit; ++k) {
            const double tk = n + static_cast<double>(k) / nodes_per_unit;
            if (tk >= H) break;
            const State x = State::Constant(1, formula(tk));
            t.push_back(tk);
            l.push_back(x);
            v.push_back(x);
            r.push_back(x);
        }
    }
    if (t.back() < H) {
        const State x = State::Constant(1, formula(H));
        t.push_back(H);
        l.push_back(x);
        v.push_back(x);
        r.push_back(x);
    }
    return RegulatedPath(TimeGrid(std::move(t)), std::move(l), std::move(v), std::move(r));
}

/// SAP profile of t -> p(t, x(t)). The caller asserts p is uniformly
/// S-asymptotically omega-periodic on bounded sets (FieldSpec::with_sap_period)
/// and supplies its modulus family phi(., r).
inline SapProfile composition_sap_check(const FieldSpec& p, const RegulatedPath& x, double omega,
                                        int windows = kSapDefaultWindows,
                                        double eps = kSapDefaultEps) {
    const auto declared = p.sap_period();
    if (!declared)
        throw PreconditionError("composition_sap_check: p is not declared uniformly S-asymptotically periodic");
    if (!detail::same_time(*declared, omega))
        throw PreconditionError("composition_sap_check: p is declared " + detail::fmt_time(*declared) +
                                "-periodic, profile requested for omega = " + detail::fmt_time(omega));
    if (!p.phi_family())
        throw PreconditionError("composition_sap_check: p carries no modulus family phi(., r)");
    return sap_profile(compose_integrand(p, x), omega, windows, eps);
}

} // namespace hmde
