#pragma once

// Finite data model for regulated functions and nondecreasing left-continuous
// integrators.
//
// A RegulatedPath stores, at every node of a strictly increasing time grid,
// the left limit, the value and the right limit of a vector-valued function.
// Between two consecutive nodes the function is the straight line from the
// right limit at the first node to the left limit at the second, so every
// discontinuity lives on a node. The representation is closed under the
// operations the solver needs and any regulated function can be approximated
// in sup-norm by it (step functions are a special case).
//
// A StieltjesIntegrator is g = (piecewise-linear continuous part) + (finite
// sum of positive jumps), evaluated left-continuously:
//
//     g(t) = cont(t) + sum_{tau_j < t} delta_j,   g(tau_j+) = g(tau_j) + delta_j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hmde/errors.hpp"

namespace hmde {

using State = Eigen::VectorXd;

namespace detail {

inline bool same_time(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline bool all_finite(const State& v) { return v.allFinite(); }

inline std::string fmt_time(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

} // namespace detail

/// Strictly increasing sequence of at least two time points.
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
        if (times_.size() < 2)
            throw InvalidArgument("TimeGrid needs at least 2 points");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!std::isfinite(times_[i]))
                throw InvalidArgument("TimeGrid: non-finite time at index " + std::to_string(i));
            if (i > 0 && !(times_[i] > times_[i - 1]))
                throw InvalidArgument("TimeGrid: times not strictly increasing at index " +
                                      std::to_string(i));
        }
    }

    /// `cells` equal cells on [t0, t1]; the last point is exactly t1.
    static TimeGrid uniform(double t0, double t1, std::size_t cells) {
        if (cells == 0) throw InvalidArgument("TimeGrid::uniform: zero cells");
        if (!(t1 > t0)) throw InvalidArgument("TimeGrid::uniform: empty span");
        std::vector<double> t(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i)
            t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(cells);
        t.back() = t1;
        return TimeGrid(std::move(t));
    }

    /// Uniform grid whose cell width is the closest to `step` that divides the span.
    static TimeGrid with_step(double t0, double t1, double step) {
        if (!(step > 0)) throw InvalidArgument("TimeGrid::with_step: step must be positive");
        const double n = std::round((t1 - t0) / step);
        return uniform(t0, t1, static_cast<std::size_t>(std::max(1.0, n)));
    }

    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t size() const noexcept { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }
    double length() const { return back() - front(); }

    bool contains(double t) const { return t >= front() && t <= back(); }

    void require_contains(double t) const {
        if (!contains(t))
            throw OutOfDomain("time " + detail::fmt_time(t) + " outside [" +
                              detail::fmt_time(front()) + ", " + detail::fmt_time(back()) + "]");
    }

    /// Index of the node equal to t, if any.
    std::optional<std::size_t> node_index(double t) const {
        auto it = std::lower_bound(times_.begin(), times_.end(), t);
        if (it != times_.end() && *it == t) return static_cast<std::size_t>(it - times_.begin());
        return std::nullopt;
    }

    /// Cell i with times[i] <= t < times[i+1]; t == back() maps to the last cell.
    std::size_t cell(double t) const {
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        auto i = static_cast<std::size_t>(it - times_.begin());
        if (i == 0) return 0;
        return std::min(i - 1, times_.size() - 2);
    }

    bool same_span(const TimeGrid& other) const {
        return detail::same_time(front(), other.front()) && detail::same_time(back(), other.back());
    }

    void require_same_span(const TimeGrid& other) const {
        if (!same_span(other))
            throw SpanMismatch("spans differ: [" + detail::fmt_time(front()) + ", " +
                               detail::fmt_time(back()) + "] vs [" +
                               detail::fmt_time(other.front()) + ", " +
                               detail::fmt_time(other.back()) + "]");
    }

    /// Sorted union of both node sets; endpoints are taken from *this.
    TimeGrid merged(const TimeGrid& other) const {
        require_same_span(other);
        std::vector<double> out;
        out.reserve(size() + other.size());
        std::set_union(times_.begin(), times_.end(), other.times_.begin(), other.times_.end(),
                       std::back_inserter(out));
        out.erase(std::unique(out.begin(), out.end()), out.end());
        // Endpoint representations may differ in the last ulp; keep ours.
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](double t) { return t < front() || t > back(); }),
                  out.end());
        if (out.front() != front()) out.insert(out.begin(), front());
        if (out.back() != back()) out.push_back(back());
        return TimeGrid(std::move(out));
    }

    /// Adds the given points (each must lie in the span).
    TimeGrid with_points(std::span<const double> pts) const {
        std::vector<double> out = times_;
        for (double p : pts) {
            require_contains(p);
            out.push_back(p);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return TimeGrid(std::move(out));
    }

    /// Nodes inside [c, d], with c and d added as endpoints.
    TimeGrid restricted(double c, double d) const {
        require_contains(c);
        require_contains(d);
        if (!(d > c)) throw EmptyInterval("restricted: need c < d");
        std::vector<double> out{c};
        for (double t : times_)
            if (t > c && t < d) out.push_back(t);
        out.push_back(d);
        return TimeGrid(std::move(out));
    }

    /// True if every node of `coarse` is a node of *this.
    bool refines(const TimeGrid& coarse) const {
        return std::includes(times_.begin(), times_.end(), coarse.times_.begin(),
                             coarse.times_.end());
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> times_;
};

/// Piecewise-linear regulated path with jumps allowed only at nodes.
class RegulatedPath {
public:
    RegulatedPath() = default;

    RegulatedPath(TimeGrid grid, std::vector<State> left, std::vector<State> value,
                  std::vector<State> right)
        : grid_(std::move(grid)), left_(std::move(left)), value_(std::move(value)),
          right_(std::move(right)) {
        const std::size_t n = grid_.size();
        if (left_.size() != n || value_.size() != n || right_.size() != n)
            throw InvalidArgument("RegulatedPath: node data size does not match grid");
        const auto dim = value_.front().size();
        if (dim <= 0) throw InvalidArgument("RegulatedPath: dimension must be positive");
        for (std::size_t i = 0; i < n; ++i) {
            if (left_[i].size() != dim || value_[i].size() != dim || right_[i].size() != dim)
                throw DimensionMismatch("RegulatedPath: inconsistent dimension at node " +
                                        std::to_string(i));
            if (!detail::all_finite(left_[i]) || !detail::all_finite(value_[i]) ||
                !detail::all_finite(right_[i]))
                throw InvalidArgument("RegulatedPath: non-finite data at t = " +
                                      detail::fmt_time(grid_[i]));
        }
        if (left_.front() != value_.front())
            throw InvalidArgument("RegulatedPath: left limit at the first node must equal the value");
        if (right_.back() != value_.back())
            throw InvalidArgument("RegulatedPath: right limit at the last node must equal the value");
    }

    /// Continuous path through the given node values.
    static RegulatedPath continuous(TimeGrid grid, std::vector<State> values) {
        auto copy = values;
        auto copy2 = values;
        return RegulatedPath(std::move(grid), std::move(copy), std::move(values), std::move(copy2));
    }

    static RegulatedPath constant(TimeGrid grid, const State& c) {
        std::vector<State> v(grid.size(), c);
        return continuous(std::move(grid), std::move(v));
    }

    /// Continuous path sampling `fn(t) -> State` at the nodes.
    template <class Fn>
    static RegulatedPath sample(TimeGrid grid, Fn&& fn) {
        std::vector<State> v;
        v.reserve(grid.size());
        for (double t : grid.times()) v.push_back(State(fn(t)));
        return continuous(std::move(grid), std::move(v));
    }

    /// Scalar continuous path sampling `fn(t) -> double`.
    template <class Fn>
    static RegulatedPath sample_scalar(TimeGrid grid, Fn&& fn) {
        return sample(std::move(grid), [&](double t) { return State::Constant(1, fn(t)); });
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    Eigen::Index dim() const { return value_.front().size(); }
    std::size_t size() const noexcept { return grid_.size(); }
    double front() const { return grid_.front(); }
    double back() const { return grid_.back(); }

    const State& left(std::size_t i) const { return left_[i]; }
    const State& value(std::size_t i) const { return value_[i]; }
    const State& right(std::size_t i) const { return right_[i]; }
    const std::vector<State>& lefts() const noexcept { return left_; }
    const std::vector<State>& values() const noexcept { return value_; }
    const std::vector<State>& rights() const noexcept { return right_; }

    /// Value at t: node value on a node, linear interpolant inside a cell.
    State eval(double t) const {
        grid_.require_contains(t);
        if (auto k = grid_.node_index(t)) return value_[*k];
        const std::size_t i = grid_.cell(t);
        return interpolate(i, t);
    }

    /// (left, right) limits at t. At the first node the left limit is the value,
    /// at the last node the right limit is the value.
    std::pair<State, State> limits(double t) const {
        grid_.require_contains(t);
        if (auto k = grid_.node_index(t)) return {left_[*k], right_[*k]};
        State v = interpolate(grid_.cell(t), t);
        return {v, v};
    }

    bool left_continuous() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (left_[i] != value_[i]) return false;
        return true;
    }

    bool continuous_everywhere() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (left_[i] != value_[i] || right_[i] != value_[i]) return false;
        return true;
    }

    /// Constant on every open cell.
    bool piecewise_constant() const {
        for (std::size_t i = 0; i + 1 < size(); ++i)
            if (right_[i] != left_[i + 1]) return false;
        return true;
    }

    /// Same function on a grid that contains every current node.
    RegulatedPath regrid(const TimeGrid& fine) const {
        if (!fine.refines(grid_)) throw InvalidArgument("regrid: target grid must refine the path's grid");
        std::vector<State> l, v, r;
        l.reserve(fine.size());
        v.reserve(fine.size());
        r.reserve(fine.size());
        std::size_t k = 0;
        for (double t : fine.times()) {
            while (k < size() && grid_[k] < t) ++k;
            if (k < size() && grid_[k] == t) {
                l.push_back(left_[k]);
                v.push_back(value_[k]);
                r.push_back(right_[k]);
            } else {
                State x = interpolate(k - 1, t);
                l.push_back(x);
                v.push_back(x);
                r.push_back(x);
            }
        }
        return RegulatedPath(fine, std::move(l), std::move(v), std::move(r));
    }

    /// Largest norm over node values and one-sided limits (exact sup for this representation).
    double sup_norm() const {
        double s = 0;
        for (std::size_t i = 0; i < size(); ++i)
            s = std::max({s, left_[i].norm(), value_[i].norm(), right_[i].norm()});
        return s;
    }

private:
    State interpolate(std::size_t i, double t) const {
        const double t0 = grid_[i], t1 = grid_[i + 1];
        const double w = (t - t0) / (t1 - t0);
        return right_[i] + w * (left_[i + 1] - right_[i]);
    }

    TimeGrid grid_;
    std::vector<State> left_;
    std::vector<State> value_;
    std::vector<State> right_;
};

struct Jump {
    double time;
    double size;
};

/// Nondecreasing, left-continuous integrator: piecewise-linear continuous part
/// sampled on a grid plus positive jumps located on grid nodes.
class StieltjesIntegrator {
public:
    StieltjesIntegrator() = default;

    StieltjesIntegrator(TimeGrid grid, std::vector<double> cont, std::vector<Jump> jumps = {})
        : grid_(std::move(grid)), cont_(std::move(cont)), node_jump_(grid_.size(), 0.0) {
        if (cont_.size() != grid_.size())
            throw InvalidArgument("StieltjesIntegrator: continuous samples do not match grid");
        for (std::size_t i = 0; i < cont_.size(); ++i) {
            if (!std::isfinite(cont_[i]))
                throw InvalidArgument("StieltjesIntegrator: non-finite continuous sample");
            if (i > 0 && cont_[i] < cont_[i - 1])
                throw InvalidArgument("StieltjesIntegrator: continuous part decreases at t = " +
                                      detail::fmt_time(grid_[i]));
        }
        for (const Jump& j : jumps) {
            if (!(j.size > 0) || !std::isfinite(j.size))
                throw InvalidArgument("StieltjesIntegrator: jump sizes must be positive, got " +
                                      detail::fmt_time(j.size) + " at t = " +
                                      detail::fmt_time(j.time));
            auto k = grid_.node_index(j.time);
            if (!k)
                throw InvalidArgument("StieltjesIntegrator: jump at t = " + detail::fmt_time(j.time) +
                                      " is not a grid node");
            if (*k + 1 == grid_.size())
                throw InvalidArgument("StieltjesIntegrator: jump at the final node has no effect on the span");
            node_jump_[*k] += j.size;
        }
        cum_before_.assign(grid_.size(), 0.0);
        for (std::size_t i = 1; i < grid_.size(); ++i)
            cum_before_[i] = cum_before_[i - 1] + node_jump_[i - 1];
    }

    /// g(t) = t on the grid.
    static StieltjesIntegrator identity(TimeGrid grid, std::vector<Jump> jumps = {}) {
        std::vector<double> c = grid.times();
        return StieltjesIntegrator(std::move(grid), std::move(c), std::move(jumps));
    }

    /// Continuous part sampled from `fn` at the nodes.
    template <class Fn>
    static StieltjesIntegrator sample(TimeGrid grid, Fn&& fn, std::vector<Jump> jumps = {}) {
        std::vector<double> c;
        c.reserve(grid.size());
        for (double t : grid.times()) c.push_back(fn(t));
        return StieltjesIntegrator(std::move(grid), std::move(c), std::move(jumps));
    }

    /// Pure-jump integrator (flat continuous part).
    static StieltjesIntegrator pure_jump(TimeGrid grid, std::vector<Jump> jumps) {
        std::vector<double> c(grid.size(), 0.0);
        return StieltjesIntegrator(std::move(grid), std::move(c), std::move(jumps));
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }
    double front() const { return grid_.front(); }
    double back() const { return grid_.back(); }

    double cont(std::size_t i) const { return cont_[i]; }
    const std::vector<double>& cont_values() const noexcept { return cont_; }

    /// Jump Delta+g at node i.
    double node_jump(std::size_t i) const { return node_jump_[i]; }

    std::vector<Jump> jumps() const {
        std::vector<Jump> out;
        for (std::size_t i = 0; i < size(); ++i)
            if (node_jump_[i] > 0) out.push_back({grid_[i], node_jump_[i]});
        return out;
    }

    bool has_jumps() const {
        return std::any_of(node_jump_.begin(), node_jump_.end(), [](double d) { return d > 0; });
    }

    double continuous_part(double t) const {
        grid_.require_contains(t);
        if (auto k = grid_.node_index(t)) return cont_[*k];
        const std::size_t i = grid_.cell(t);
        const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
        return cont_[i] + w * (cont_[i + 1] - cont_[i]);
    }

    /// Left-continuous value: jumps at tau < t only.
    double operator()(double t) const {
        grid_.require_contains(t);
        if (auto k = grid_.node_index(t)) return cont_[*k] + cum_before_[*k];
        const std::size_t i = grid_.cell(t);
        return continuous_part(t) + cum_before_[i] + node_jump_[i];
    }

    double left_limit(double t) const { return (*this)(t); }

    double right_limit(double t) const { return (*this)(t) + jump_at(t); }

    /// Delta+g(t); zero away from jump nodes.
    double jump_at(double t) const {
        grid_.require_contains(t);
        if (auto k = grid_.node_index(t)) return node_jump_[*k];
        return 0.0;
    }

    /// Increment of the continuous part over cell i.
    double cell_increment(std::size_t i) const { return cont_[i + 1] - cont_[i]; }

    /// Slope of the continuous part on cell i.
    double cell_slope(std::size_t i) const {
        return cell_increment(i) / (grid_[i + 1] - grid_[i]);
    }

    double total_variation() const {
        double v = cont_.back() - cont_.front();
        for (double d : node_jump_) v += d;
        return v;
    }

    /// Same integrator on a refining grid.
    StieltjesIntegrator regrid(const TimeGrid& fine) const {
        if (!fine.refines(grid_))
            throw InvalidArgument("regrid: target grid must refine the integrator's grid");
        std::vector<double> c;
        c.reserve(fine.size());
        for (double t : fine.times()) c.push_back(continuous_part(t));
        return StieltjesIntegrator(fine, std::move(c), jumps());
    }

    /// Integrator on [c, d]; a jump at d is dropped (it only acts beyond d).
    StieltjesIntegrator restricted(double c, double d) const {
        TimeGrid sub = grid_.restricted(c, d);
        std::vector<double> cv;
        cv.reserve(sub.size());
        for (double t : sub.times()) cv.push_back(continuous_part(t));
        std::vector<Jump> js;
        for (const Jump& j : jumps())
            if (j.time >= c && j.time < d) js.push_back(j);
        return StieltjesIntegrator(std::move(sub), std::move(cv), std::move(js));
    }

private:
    TimeGrid grid_;
    std::vector<double> cont_;
    std::vector<double> node_jump_;
    std::vector<double> cum_before_;
};

// ---------------------------------------------------------------------------
// Free-function surface
// ---------------------------------------------------------------------------

inline State eval(const RegulatedPath& path, double t) { return path.eval(t); }

inline std::pair<State, State> one_sided_limits(const RegulatedPath& path, double t) {
    return path.limits(t);
}

inline double total_variation(const StieltjesIntegrator& g) { return g.total_variation(); }

namespace detail {

inline void require_same_dim(const RegulatedPath& p, const RegulatedPath& q) {
    if (p.dim() != q.dim())
        throw DimensionMismatch("paths have dimensions " + std::to_string(p.dim()) + " and " +
                                std::to_string(q.dim()));
}

/// Applies op(left, left), op(value, value), op(right, right) on the union grid.
template <class Op>
RegulatedPath combine(const RegulatedPath& p, const RegulatedPath& q, Op&& op) {
    require_same_dim(p, q);
    const TimeGrid g = p.grid().merged(q.grid());
    const RegulatedPath a = p.grid() == g ? p : p.regrid(g);
    const RegulatedPath b = q.grid() == g ? q : q.regrid(g);
    std::vector<State> l, v, r;
    l.reserve(g.size());
    v.reserve(g.size());
    r.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        l.push_back(op(a.left(i), b.left(i)));
        v.push_back(op(a.value(i), b.value(i)));
        r.push_back(op(a.right(i), b.right(i)));
    }
    return RegulatedPath(g, std::move(l), std::move(v), std::move(r));
}

template <class Op>
RegulatedPath map_nodes(const RegulatedPath& p, Op&& op) {
    std::vector<State> l, v, r;
    l.reserve(p.size());
    v.reserve(p.size());
    r.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        l.push_back(op(p.left(i)));
        v.push_back(op(p.value(i)));
        r.push_back(op(p.right(i)));
    }
    return RegulatedPath(p.grid(), std::move(l), std::move(v), std::move(r));
}

} // namespace detail

inline RegulatedPath operator+(const RegulatedPath& p, const RegulatedPath& q) {
    return detail::combine(p, q, [](const State& a, const State& b) -> State { return a + b; });
}

inline RegulatedPath operator-(const RegulatedPath& p, const RegulatedPath& q) {
    return detail::combine(p, q, [](const State& a, const State& b) -> State { return a - b; });
}

inline RegulatedPath operator+(const RegulatedPath& p, const State& c) {
    if (c.size() != p.dim()) throw DimensionMismatch("shift: dimension mismatch");
    return detail::map_nodes(p, [&](const State& a) -> State { return a + c; });
}

inline RegulatedPath operator*(double s, const RegulatedPath& p) {
    return detail::map_nodes(p, [&](const State& a) -> State { return s * a; });
}

/// Sup-norm distance. Both paths are linear between the union grid's nodes, so
/// the supremum of the (convex) norm of their difference is attained at a node
/// value, a one-sided limit, or a cell endpoint; all are inspected.
inline double uniform_dist(const RegulatedPath& p, const RegulatedPath& q) {
    detail::require_same_dim(p, q);
    return (p - q).sup_norm();
}

/// Piecewise-constant path within eps of `path` in sup-norm, on a grid that
/// refines the input grid. Cells are split so each piece spans a range of at
/// most eps; each piece takes the midpoint value, so the error is <= eps/2.
/// Interior split points are left-continuous.
inline RegulatedPath approximate_by_steps(const RegulatedPath& path, double eps) {
    if (!(eps > 0)) throw InvalidArgument("approximate_by_steps: eps must be positive");
    std::vector<double> t;
    std::vector<State> l, v, r;
    const auto& grid = path.grid();
    t.push_back(grid[0]);
    l.push_back(path.left(0));
    v.push_back(path.value(0));
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const State a = path.right(i);
        const State b = path.left(i + 1);
        const double range = (b - a).norm();
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(range / eps)));
        const double t0 = grid[i], t1 = grid[i + 1];
        for (std::size_t k = 0; k < pieces; ++k) {
            const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(pieces);
            const State level = a == b ? a : State(a + mid * (b - a));
            r.push_back(level);  // right limit at the piece's left node
            if (k + 1 < pieces) {
                t.push_back(t0 + (t1 - t0) * static_cast<double>(k + 1) / static_cast<double>(pieces));
                l.push_back(level);
                v.push_back(level);
            } else {
                t.push_back(t1);
                l.push_back(level);
                v.push_back(path.value(i + 1));
            }
        }
    }
    r.push_back(path.right(path.size() - 1));
    return RegulatedPath(TimeGrid(std::move(t)), std::move(l), std::move(v), std::move(r));
}

} // namespace hmde
