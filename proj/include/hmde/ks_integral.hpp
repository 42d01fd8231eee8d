#pragma once

// Kurzweil-Stieltjes integration on the finite representation.
//
// For a piecewise-linear regulated integrand and an integrator with a
// piecewise-linear continuous part plus node jumps, the integral is exact:
//
//   int_c^d f dg = sum_cells (f(s_i+) + f(s_{i+1}-))/2 * (cont(s_{i+1}) - cont(s_i))
//                + sum_{c <= tau_j < d} f(tau_j) * delta_j
//
// Jumps are counted on [c, d): the jump at the lower endpoint contributes
// (right-limit relation p(t+) = p(t) + f(t) Delta+g(t)) and the jump at the
// upper endpoint does not (g is left-continuous, Delta-g = 0).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/regulated.hpp"

namespace hmde {

namespace detail {

inline void require_interval(double c, double d) {
    if (c > d)
        throw EmptyInterval("integration interval [" + fmt_time(c) + ", " + fmt_time(d) +
                            "] has c > d");
}

/// f and g on their common refined grid (plus extra points).
struct AlignedPair {
    RegulatedPath f;
    StieltjesIntegrator g;
};

inline AlignedPair align(const RegulatedPath& f, const StieltjesIntegrator& g,
                         std::span<const double> extra = {}) {
    f.grid().require_same_span(g.grid());
    TimeGrid grid = f.grid().merged(g.grid());
    if (!extra.empty()) grid = grid.with_points(extra);
    return {f.grid() == grid ? f : f.regrid(grid), g.grid() == grid ? g : g.regrid(grid)};
}

} // namespace detail

/// Exact KS integral of fpath against g over [c, d] (c <= d).
inline State ks_integral(const RegulatedPath& fpath, const StieltjesIntegrator& g, double c,
                         double d) {
    detail::require_interval(c, d);
    fpath.grid().require_contains(c);
    fpath.grid().require_contains(d);
    const double ends[] = {c, d};
    const auto [f, gg] = detail::align(fpath, g, ends);
    State sum = State::Zero(f.dim());
    if (c == d) return sum;
    const auto& grid = f.grid();
    const std::size_t first = *grid.node_index(c);
    const std::size_t last = *grid.node_index(d);
    for (std::size_t i = first; i < last; ++i) {
        const double inc = gg.cell_increment(i);
        if (inc != 0.0) sum += 0.5 * inc * (f.right(i) + f.left(i + 1));
        const double jump = gg.node_jump(i);
        if (jump != 0.0) sum += jump * f.value(i);
    }
    return sum;
}

/// p(t) = int_{t0}^t f dg as a path on the union grid (signed for t < t0).
/// Node values are exact; p is left-continuous and p(tau+) = p(tau) + f(tau) delta
/// at every jump. Between nodes p is the linear interpolant of its node values.
inline RegulatedPath indefinite_integral(const RegulatedPath& fpath, const StieltjesIntegrator& g,
                                         double t0) {
    fpath.grid().require_contains(t0);
    const double extra[] = {t0};
    const auto [f, gg] = detail::align(fpath, g, extra);
    const auto& grid = f.grid();
    const std::size_t n = grid.size();
    std::vector<State> cum(n);
    std::vector<State> jump_term(n);
    cum[0] = State::Zero(f.dim());
    for (std::size_t i = 0; i < n; ++i) {
        jump_term[i] = gg.node_jump(i) * f.value(i);
        if (i + 1 < n) {
            cum[i + 1] = cum[i] + jump_term[i];
            const double inc = gg.cell_increment(i);
            if (inc != 0.0) cum[i + 1] += 0.5 * inc * (f.right(i) + f.left(i + 1));
        }
    }
    const State base = cum[*grid.node_index(t0)];
    std::vector<State> value(n), right(n);
    for (std::size_t i = 0; i < n; ++i) {
        value[i] = cum[i] - base;
        right[i] = i + 1 < n ? State(value[i] + jump_term[i]) : value[i];
    }
    auto left = value;
    return RegulatedPath(grid, std::move(left), std::move(value), std::move(right));
}

/// Subdivision a = s_0 <= ... <= s_k = b with tags tau_i in [s_{i-1}, s_i].
struct TaggedPartition {
    std::vector<double> points;
    std::vector<double> tags;

    bool well_formed() const {
        if (points.size() < 2 || tags.size() + 1 != points.size()) return false;
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (points[i] > points[i + 1] || tags[i] < points[i] || tags[i] > points[i + 1])
                return false;
        return true;
    }

    /// Every cell lies in the open gauge ball of its tag.
    bool is_delta_fine(const std::function<double(double)>& gauge) const {
        for (std::size_t i = 0; i < tags.size(); ++i) {
            const double delta = gauge(tags[i]);
            if (!(points[i] > tags[i] - delta && points[i + 1] < tags[i] + delta)) return false;
        }
        return true;
    }
};

/// Partition of [c, d]: every node of `grid` inside [c, d] is a subdivision
/// point. A segment starting at a jump point tau first gets a cell
/// [tau, tau + len 4^-level] tagged at tau (the gauge shrinks quadratically at
/// jumps); the rest of the segment is cut into 2^level equal cells tagged at
/// their midpoints.
inline TaggedPartition jump_forcing_partition(const TimeGrid& grid, const std::vector<double>& jump_times,
                                              double c, double d, unsigned level) {
    detail::require_interval(c, d);
    TaggedPartition p;
    if (c == d) {
        p.points = {c, d};
        p.tags = {c};
        return p;
    }
    std::vector<double> bounds{c};
    for (double t : grid.times())
        if (t > c && t < d) bounds.push_back(t);
    bounds.push_back(d);
    const std::uint64_t cells = std::uint64_t{1} << level;
    const double shrink = std::ldexp(1.0, -2 * static_cast<int>(level));
    p.points.push_back(c);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        double a = bounds[s];
        const double b = bounds[s + 1];
        if (std::binary_search(jump_times.begin(), jump_times.end(), a)) {
            const double end = a + (b - a) * shrink;
            p.tags.push_back(a);
            p.points.push_back(end);
            a = end;
        }
        for (std::uint64_t k = 1; k <= cells; ++k) {
            const double left = p.points.back();
            const double right =
                k == cells ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(cells);
            p.tags.push_back(0.5 * (left + right));
            p.points.push_back(right);
        }
    }
    return p;
}

/// sum_i f(tau_i) (g(s_i) - g(s_{i-1})).
inline State riemann_stieltjes_sum(const TaggedPartition& p, const RegulatedPath& f,
                                   const StieltjesIntegrator& g) {
    State sum = State::Zero(f.dim());
    double g_prev = g(p.points.front());
    for (std::size_t i = 0; i < p.tags.size(); ++i) {
        const double g_next = g(p.points[i + 1]);
        const double dg = g_next - g_prev;
        if (dg != 0.0) sum += dg * f.eval(p.tags[i]);
        g_prev = g_next;
    }
    return sum;
}

/// Independent Riemann-Stieltjes oracle over a jump-forcing tagged partition
/// with 2^level cells per segment. Converges to ks_integral as level grows;
/// the cell widths never exceed (d - c) 2^-level.
inline State fine_partition_oracle(const RegulatedPath& fpath, const StieltjesIntegrator& g,
                                   double c, double d, unsigned level) {
    if (level == 0 || level > 30) throw InvalidArgument("fine_partition_oracle: level must be in [1, 30]");
    fpath.grid().require_same_span(g.grid());
    fpath.grid().require_contains(c);
    fpath.grid().require_contains(d);
    std::vector<double> jump_times;
    for (const Jump& j : g.jumps()) jump_times.push_back(j.time);
    const TaggedPartition p =
        jump_forcing_partition(fpath.grid().merged(g.grid()), jump_times, c, d, level);
    return riemann_stieltjes_sum(p, fpath, g);
}

/// The path s -> f(s, x(s)) on x's grid: node values f(t, x(t)) (honouring point
/// overrides) and one-sided limits f(t, x(t+-)) from the base handle. Assumes
/// f(., u) is continuous between nodes.
inline RegulatedPath compose_integrand(const FieldSpec& f, const RegulatedPath& x) {
    if (!f.valid()) throw InvalidArgument("compose_integrand: field has no handle");
    const auto& grid = x.grid();
    std::vector<State> l, v, r;
    l.reserve(x.size());
    v.reserve(x.size());
    r.reserve(x.size());
    auto checked = [](State s, double t, const State& u) {
        if (!s.allFinite()) {
            std::ostringstream os;
            os.precision(17);
            os << "field returned a non-finite value at t = " << t << ", u = [" << u.transpose()
               << "]";
            throw EvaluationError(os.str());
        }
        return s;
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = grid[i];
        State fv = checked(f.value_at(t, x.value(i)), t, x.value(i));
        State fl = x.left(i) == x.value(i) && f.overrides().empty()
                       ? fv
                       : checked(f.limit_at(t, x.left(i)), t, x.left(i));
        State fr = x.right(i) == x.value(i) && f.overrides().empty()
                       ? fv
                       : checked(f.limit_at(t, x.right(i)), t, x.right(i));
        if (i == 0) fl = fv;
        if (i + 1 == x.size()) fr = fv;
        l.push_back(std::move(fl));
        v.push_back(std::move(fv));
        r.push_back(std::move(fr));
    }
    return RegulatedPath(grid, std::move(l), std::move(v), std::move(r));
}

struct DominatedConvergenceReport {
    std::vector<double> gaps;  ///< |int f_k dg - int f_lim dg| for k = 1, 2, ...
    bool pass = false;         ///< last gap < tol
};

/// Integral gaps of a sequence against its limit over g's whole span.
inline DominatedConvergenceReport dominated_convergence_check(const std::vector<RegulatedPath>& f_seq,
                                                              const RegulatedPath& f_lim,
                                                              const StieltjesIntegrator& g,
                                                              double tol) {
    DominatedConvergenceReport rep;
    const State lim = ks_integral(f_lim, g, g.front(), g.back());
    for (const auto& fk : f_seq) {
        fk.grid().require_same_span(g.grid());
        rep.gaps.push_back((ks_integral(fk, g, g.front(), g.back()) - lim).norm());
    }
    rep.pass = !rep.gaps.empty() && rep.gaps.back() < tol;
    return rep;
}

} // namespace hmde
