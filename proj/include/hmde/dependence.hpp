#pragma once

// Continuous-dependence experiments: a sequence of problems (f_k, h_k, x0_k)
// approaching limit data (f, h, x0). The harness checks the hypotheses
// numerically and measures the sup-norm gap between each solution and the
// limit solution. The theory promises a uniformly convergent subsequence and
// no rate; the trend statistic reported here is a diagnostic only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/ks_integral.hpp"
#include "hmde/regulated.hpp"
#include "hmde/solver.hpp"

namespace hmde {

struct SequenceMember {
    FieldSpec f;  ///< f_k, optionally carrying M_k as its bound path
    FieldSpec h;  ///< h_k, optionally carrying phi_k
    State x0;     ///< x^_k
};

struct ParamSequence {
    HMDEProblem base;  ///< limit data f, h, x0
    int k_max = 16;
    std::function<SequenceMember(int)> member;

    HMDEProblem instantiate(int k) const {
        if (k < 1 || k > k_max) throw InvalidArgument("ParamSequence: k out of range");
        SequenceMember m = member(k);
        HMDEProblem p = base;
        p.f = std::move(m.f);
        p.h = std::move(m.h);
        p.x0 = std::move(m.x0);
        p.validate();
        return p;
    }
};

/// min over k and t in [c, d] (1025 equally spaced samples) of t - phi_k(t).
/// A positive result is numerical evidence for phi_k(t) < t - delta on [c, d].
inline double condition_I_estimate(const std::vector<DFunction>& phis, double c, double d) {
    if (!(c > 0) || !(d > c)) throw InvalidArgument("condition_I_estimate: need 0 < c < d");
    constexpr int samples = 1024;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < phis.size(); ++k) {
        for (int i = 0; i <= samples; ++i) {
            const double t = i == samples ? d : c + (d - c) * i / samples;
            const double slack = t - phis[k](t);
            if (!(slack > 0))
                throw ViolationError("condition (I) violated: phi_" + std::to_string(k + 1) + "(" +
                                     detail::fmt_time(t) + ") >= t");
            best = std::min(best, slack);
        }
    }
    return best;
}

/// Radical inverse in the given base (Halton component).
inline double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

/// Sample set for hypothesis checks: t over the grid (at most 257 evenly
/// spread nodes), u over a 128-per-dimension Halton set in the cube [-R, R]^n
/// pulled radially into the ball |u| <= R.
struct HypothesisSamples {
    std::vector<double> t;
    std::vector<State> u;
    double R = 1.0;
};

inline HypothesisSamples make_hypothesis_samples(const HMDEProblem& p, double R) {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const Eigen::Index n = p.dim();
    if (n > static_cast<Eigen::Index>(std::size(primes)))
        throw InvalidArgument("make_hypothesis_samples: dimension too large for the Halton set");
    HypothesisSamples s;
    s.R = R;
    const auto& times = p.options.grid.times();
    const std::size_t m = std::min<std::size_t>(times.size(), 257);
    for (std::size_t i = 0; i < m; ++i)
        s.t.push_back(times[(times.size() - 1) * i / (m - 1)]);
    const auto count = static_cast<std::uint64_t>(128 * n);
    for (std::uint64_t i = 0; i < count; ++i) {
        State u(n);
        for (Eigen::Index j = 0; j < n; ++j) u[j] = R * (2 * radical_inverse(i + 1, primes[j]) - 1);
        const double norm = u.norm();
        if (norm > R) u *= R / norm;
        s.u.push_back(u);
    }
    return s;
}

struct HypothesisReport {
    std::vector<double> gap_x0;   ///< (i)   |x^_k - x0|
    std::vector<double> gap_h;    ///< (ii)  max_samples |h_k - h|
    std::vector<double> gap_f;    ///< (iii) max_samples |f_k - f|
    std::vector<double> gap_h_t0; ///< |h_k(t0, x^_k) - h(t0, x0)|
    double C_estimate = std::numeric_limits<double>::quiet_NaN();
    double C_reference = std::numeric_limits<double>::quiet_NaN();  ///< int M dg of the limit data
    double liminf_sup_phi_ratio = std::numeric_limits<double>::quiet_NaN();
    bool pass_i = false;
    bool pass_ii = false;
    bool pass_iii = false;
    bool pass_eq51 = false;
};

struct HypothesisOptions {
    double tol = 1e-1;          ///< final gap of (i)-(iii) must be <= tol
    double R_phi = 1.0;         ///< lower end of the r-range in the phi ratio
    int trials = 256;           ///< random subdivision / assignment trials for C
    std::uint64_t seed = 5489;
};

/// Sampled evidence for the continuous-dependence hypotheses.
inline HypothesisReport hypothesis_check(const ParamSequence& seq, const HypothesisSamples& samples,
                                         const HypothesisOptions& opt = {}) {
    const HMDEProblem& base = seq.base;
    HypothesisReport rep;
    std::vector<SequenceMember> members;
    for (int k = 1; k <= seq.k_max; ++k) members.push_back(seq.member(k));

    const State h0 = base.h.value_at(base.t0, base.x0);
    for (const auto& m : members) {
        rep.gap_x0.push_back((m.x0 - base.x0).norm());
        rep.gap_h_t0.push_back((m.h.value_at(base.t0, m.x0) - h0).norm());
        double gh = 0.0, gf = 0.0;
        for (double t : samples.t)
            for (const auto& u : samples.u) {
                gh = std::max(gh, (m.h.value_at(t, u) - base.h.value_at(t, u)).norm());
                gf = std::max(gf, (m.f.value_at(t, u) - base.f.value_at(t, u)).norm());
            }
        rep.gap_h.push_back(gh);
        rep.gap_f.push_back(gf);
    }
    if (!members.empty()) {
        rep.pass_i = rep.gap_x0.back() <= opt.tol;
        rep.pass_ii = rep.gap_h.back() <= opt.tol;
        rep.pass_iii = rep.gap_f.back() <= opt.tol;
    }

    // C: max over random subdivisions sigma and index assignments m_j of
    // sum_j int_{sigma_{j-1}}^{sigma_j} M_{m_j} dg.
    const bool have_bounds =
        !members.empty() && std::all_of(members.begin(), members.end(),
                                        [](const SequenceMember& m) { return m.f.bound_path().has_value(); });
    if (have_bounds) {
        if (base.f.bound_path())
            rep.C_reference = ks_integral(*base.f.bound_path(), base.g, base.t0, base.t_end())[0];
        const auto& nodes = base.g.grid().times();
        std::mt19937_64 rng(opt.seed);
        double C = 0.0;
        for (int trial = 0; trial < opt.trials; ++trial) {
            const std::size_t interior = nodes.size() - 2;
            const std::size_t cuts =
                interior == 0 ? 0
                              : std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(15, interior))(rng);
            std::vector<double> sigma{base.t0, base.t_end()};
            for (std::size_t c = 0; c < cuts; ++c)
                sigma.push_back(nodes[1 + std::uniform_int_distribution<std::size_t>(0, interior - 1)(rng)]);
            std::sort(sigma.begin(), sigma.end());
            sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
            double total = 0.0;
            for (std::size_t j = 0; j + 1 < sigma.size(); ++j) {
                const auto k = std::uniform_int_distribution<int>(0, seq.k_max - 1)(rng);
                total += ks_integral(*members[static_cast<std::size_t>(k)].f.bound_path(), base.g,
                                     sigma[j], sigma[j + 1])[0];
            }
            C = std::max(C, total);
        }
        rep.C_estimate = C;
    }

    // liminf_k sup_{r >= R} phi_k(r)/r, with r on a 64-per-decade grid over
    // [R, 1e9 R] and the liminf taken as the minimum over the second half of k.
    const bool have_phi = !members.empty() &&
                          std::all_of(members.begin(), members.end(),
                                      [](const SequenceMember& m) { return static_cast<bool>(m.h.phi()); });
    if (have_phi) {
        std::vector<double> sup_ratio;
        for (const auto& m : members) {
            double s = 0.0;
            for (int j = 0; j <= 9 * 64; ++j) {
                const double r = opt.R_phi * std::pow(10.0, j / 64.0);
                s = std::max(s, m.h.phi()(r) / r);
            }
            sup_ratio.push_back(s);
        }
        const auto half = sup_ratio.size() / 2;
        rep.liminf_sup_phi_ratio = *std::min_element(sup_ratio.begin() + static_cast<std::ptrdiff_t>(half),
                                                     sup_ratio.end());
        rep.pass_eq51 = rep.liminf_sup_phi_ratio < 1.0;
    }
    return rep;
}

struct ConvergenceTable {
    RegulatedPath limit;
    std::vector<int> k;
    std::vector<double> gap;  ///< uniform_dist(x_k, x); NaN when the solve failed
    std::vector<bool> solved;
    std::vector<std::string> error;
    double monotone_fraction = 0.0;  ///< share of consecutive solved pairs with gap_{k+1} <= gap_k

    /// min_{k >= K} gap_k over solved entries (infinity if none).
    double tail_min(int K) const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k.size(); ++i)
            if (k[i] >= K && solved[i]) m = std::min(m, gap[i]);
        return m;
    }
};

/// Solves the limit problem and every member; member failures are recorded
/// and the run continues.
inline ConvergenceTable dependence_run(const ParamSequence& seq) {
    ConvergenceTable tab;
    tab.limit = solve_forward(seq.base).solution;
    for (int k = 1; k <= seq.k_max; ++k) {
        tab.k.push_back(k);
        try {
            const SolveReport rep = solve_forward(seq.instantiate(k));
            tab.gap.push_back(uniform_dist(rep.solution, tab.limit));
            tab.solved.push_back(true);
            tab.error.emplace_back();
        } catch (const Error& e) {
            tab.gap.push_back(std::numeric_limits<double>::quiet_NaN());
            tab.solved.push_back(false);
            tab.error.emplace_back(e.what());
        }
    }
    int pairs = 0, down = 0;
    for (std::size_t i = 0; i + 1 < tab.k.size(); ++i) {
        if (!tab.solved[i] || !tab.solved[i + 1]) continue;
        ++pairs;
        if (tab.gap[i + 1] <= tab.gap[i]) ++down;
    }
    tab.monotone_fraction = pairs > 0 ? static_cast<double>(down) / pairs : 0.0;
    return tab;
}

} // namespace hmde
