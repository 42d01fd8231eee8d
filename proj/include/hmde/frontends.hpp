#pragma once

// Encodings of impulsive systems and dynamic equations on time scales as
// measure differential equations.
//
// Impulsive: g(t) = t + sum of unit jumps at the impulse times tau_j, and the
// integrand at tau_j is replaced by the impulse map, f~(tau_j, u) = I_j(u).
// Then f~(tau_j, x(tau_j)) Delta+g(tau_j) = I_j(x(tau_j)), which x(t) picks up
// for t > tau_j but not at tau_j itself (strict sum t0 <= tau_j < t).
//
// Time scale T (finite union of closed intervals and points): g(t) = t*, the
// first point of T at or after t, and f*(s, u) = f(s*, u). g is flat on gaps
// and jumps by the graininess mu(t) = sigma(t) - t at right-scattered points.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/regulated.hpp"
#include "hmde/solver.hpp"

namespace hmde {

struct Impulse {
    double time;
    std::function<State(const State&)> map;  ///< I_j, so that Delta+x(tau_j) = I_j(x(tau_j))
};

struct ImpulsiveSpec {
    double t0 = 0.0;
    double a = 1.0;
    State x0;
    FieldSpec f;
    FieldSpec h;
    std::vector<Impulse> impulses;

    void validate() const {
        for (std::size_t j = 0; j < impulses.size(); ++j) {
            const double tau = impulses[j].time;
            if (!(tau > t0 && tau < t0 + a))
                throw InvalidArgument("ImpulsiveSpec: impulse time " + detail::fmt_time(tau) +
                                      " is not inside (t0, t0 + a)");
            if (!impulses[j].map) throw InvalidArgument("ImpulsiveSpec: impulse without a map");
            if (j > 0) {
                const double prev = impulses[j - 1].time;
                if (!(tau > prev))
                    throw InvalidArgument("ImpulsiveSpec: impulse times must be strictly increasing");
                if (detail::same_time(tau, prev))
                    throw InvalidArgument("ImpulsiveSpec: impulse times " + detail::fmt_time(prev) +
                                          " and " + detail::fmt_time(tau) + " collide within 1e-12");
            }
        }
    }
};

namespace detail {

/// Inserts each point into the grid; an interior node within 1e-12 of a point
/// is moved onto it instead of creating a near-duplicate node.
inline TimeGrid snap_points(const TimeGrid& grid, const std::vector<double>& pts) {
    std::vector<double> t = grid.times();
    for (double p : pts) {
        auto it = std::lower_bound(t.begin(), t.end(), p);
        bool snapped = false;
        for (auto cand : {it, it == t.begin() ? it : it - 1}) {
            if (cand == t.end()) continue;
            if (same_time(*cand, p)) {
                if (cand == t.begin() || cand == t.end() - 1) {
                    if (*cand != p)
                        throw InvalidArgument("point " + fmt_time(p) + " collides with a grid endpoint");
                } else {
                    *cand = p;
                }
                snapped = true;
                break;
            }
        }
        if (!snapped) t.insert(std::lower_bound(t.begin(), t.end(), p), p);
    }
    return TimeGrid(std::move(t));
}

} // namespace detail

/// HMDEProblem equivalent to the impulsive system. options.grid must span
/// [t0, t0 + a]; impulse times are added to it.
inline HMDEProblem from_impulsive(const ImpulsiveSpec& spec, SolverOptions options) {
    spec.validate();
    std::vector<double> taus;
    for (const auto& imp : spec.impulses) taus.push_back(imp.time);
    TimeGrid grid = detail::snap_points(options.grid, taus);

    std::vector<Jump> jumps;
    FieldSpec f = spec.f;
    for (const auto& imp : spec.impulses) {
        jumps.push_back({imp.time, 1.0});
        f = f.with_override(imp.time, [map = imp.map](double, const State& u) { return map(u); });
    }
    HMDEProblem p;
    p.t0 = spec.t0;
    p.a = spec.a;
    p.x0 = spec.x0;
    p.f = std::move(f);
    p.h = spec.h;
    p.g = StieltjesIntegrator::identity(grid, std::move(jumps));
    options.grid = std::move(grid);
    p.options = std::move(options);
    p.validate();
    return p;
}

/// Closed interval [lo, hi] of a time scale; lo == hi is an isolated point.
struct TimeScaleComponent {
    double lo;
    double hi;
};

struct TimeScaleSpec {
    std::vector<TimeScaleComponent> components;
    State x0;
    FieldSpec f;
    FieldSpec h;

    double t0() const { return components.front().lo; }
    double t_end() const { return components.back().hi; }

    void validate() const {
        if (components.empty()) throw InvalidArgument("TimeScaleSpec: empty time scale");
        for (std::size_t i = 0; i < components.size(); ++i) {
            const auto& c = components[i];
            if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || c.hi < c.lo)
                throw InvalidArgument("TimeScaleSpec: degenerate component " + std::to_string(i));
            if (i > 0 && !(c.lo > components[i - 1].hi))
                throw InvalidArgument("TimeScaleSpec: components " + std::to_string(i - 1) + " and " +
                                      std::to_string(i) + " are not sorted and disjoint");
        }
        if (!(t_end() > t0())) throw InvalidArgument("TimeScaleSpec: time scale is a single point");
    }

    /// t* = inf { s in T : s >= t } for t in [min T, max T].
    double forward_point(double t) const {
        for (const auto& c : components) {
            if (t <= c.hi) return std::max(t, c.lo);
        }
        return t_end();
    }

    bool contains(double t) const {
        return std::any_of(components.begin(), components.end(),
                           [&](const TimeScaleComponent& c) { return t >= c.lo && t <= c.hi; });
    }
};

/// HMDEProblem equivalent to the dynamic equation on T. Interval components are
/// gridded with cells of width close to `step`; options.grid is replaced.
inline HMDEProblem from_timescale(const TimeScaleSpec& spec, SolverOptions options, double step) {
    spec.validate();
    if (!(step > 0)) throw InvalidArgument("from_timescale: step must be positive");
    std::vector<double> times;
    std::vector<double> cont;
    std::vector<Jump> jumps;
    double measure = 0.0;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        if (c.hi > c.lo) {
            const TimeGrid piece = TimeGrid::with_step(c.lo, c.hi, step);
            for (double t : piece.times()) {
                times.push_back(t);
                cont.push_back(spec.t0() + measure + (t - c.lo));
            }
            measure += c.hi - c.lo;
        } else {
            times.push_back(c.lo);
            cont.push_back(spec.t0() + measure);
        }
        if (i + 1 < spec.components.size()) jumps.push_back({c.hi, spec.components[i + 1].lo - c.hi});
    }
    TimeGrid grid(std::move(times));

    auto star = [spec](double s) { return spec.forward_point(s); };
    const FieldFn fb = spec.f.base();
    const FieldFn hb = spec.h.base();
    HMDEProblem p;
    p.t0 = spec.t0();
    p.a = spec.t_end() - spec.t0();
    p.x0 = spec.x0;
    p.f = FieldSpec([fb, star](double s, const State& u) { return fb(star(s), u); });
    p.h = FieldSpec([hb, star](double s, const State& u) { return hb(star(s), u); });
    if (spec.h.phi()) p.h = p.h.with_phi(spec.h.phi());
    if (spec.h.phi_family()) p.h = p.h.with_phi_family(spec.h.phi_family());
    if (spec.f.bound_family()) p.f = p.f.with_bound_family(spec.f.bound_family());
    p.g = StieltjesIntegrator(grid, std::move(cont), std::move(jumps));
    options.grid = std::move(grid);
    p.options = std::move(options);
    p.validate();
    return p;
}

/// Solution samples: node times, values and right jumps Delta+x.
struct SampledTable {
    std::vector<double> t;
    std::vector<State> x;
    std::vector<State> jump;
};

/// Values at the T-points among the path's nodes.
inline SampledTable restrict_solution(const RegulatedPath& path, const TimeScaleSpec& spec) {
    spec.validate();
    if (!detail::same_time(path.front(), spec.t0()) || !detail::same_time(path.back(), spec.t_end()))
        throw SpanMismatch("restrict_solution: path does not span the time scale");
    SampledTable tab;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double t = path.grid()[i];
        if (!spec.contains(t)) continue;
        tab.t.push_back(t);
        tab.x.push_back(path.value(i));
        tab.jump.push_back(path.right(i) - path.value(i));
    }
    return tab;
}

/// Every node with its value and Delta+x; nonzero jumps sit at impulse times.
inline SampledTable restrict_solution(const RegulatedPath& path, const ImpulsiveSpec& spec) {
    if (!detail::same_time(path.front(), spec.t0) || !detail::same_time(path.back(), spec.t0 + spec.a))
        throw SpanMismatch("restrict_solution: path does not span [t0, t0 + a]");
    SampledTable tab;
    for (std::size_t i = 0; i < path.size(); ++i) {
        tab.t.push_back(path.grid()[i]);
        tab.x.push_back(path.value(i));
        tab.jump.push_back(path.right(i) - path.value(i));
    }
    return tab;
}

} // namespace hmde
