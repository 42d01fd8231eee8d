#pragma once

// Existence certificates. Both scan the radius N over the doubling grid
// 1, 2, 4, ..., 2^60 and return the first N satisfying the inequality of the
// fixed-point argument on the ball of radius N:
//
//   single bound M, single phi:  phi(N)/N + (|x0 - h(t0,x0)| + H0 + K0)/N < 1,
//                                H0 = max_t |h(t,0)|, K0 = int M dg
//   families M(., r), phi(., r): phi(N,N)/N + (|x0 - h(t0,x0)| + H0 + int M(.,N) dg)/N < 1
//
// The margin (left side minus 1) is reported so callers can refine N.

#include <cmath>
#include <vector>

#include "hmde/errors.hpp"
#include "hmde/field.hpp"
#include "hmde/ks_integral.hpp"
#include "hmde/solver.hpp"

namespace hmde {

inline constexpr int kCertificateMaxDoublings = 60;

namespace detail {

inline double h_at_zero_sup(const HMDEProblem& p) {
    const State zero = State::Zero(p.dim());
    double h0 = 0.0;
    for (double t : p.options.grid.times()) h0 = std::max(h0, p.h.value_at(t, zero).norm());
    return h0;
}

inline double initial_offset(const HMDEProblem& p) {
    return (p.x0 - p.h.value_at(p.t0, p.x0)).norm();
}

/// M(., r) sampled on g's grid as a continuous scalar path.
inline RegulatedPath sample_bound_family(const MFamily& m, const TimeGrid& grid, double r) {
    return RegulatedPath::sample_scalar(grid, [&](double s) { return m(s, r); });
}

} // namespace detail

/// Left side minus 1 of the single-bound inequality at radius N.
inline double certificate_margin_A(const HMDEProblem& p, double N) {
    const auto& m = p.f.bound_path();
    if (!m) throw PreconditionError("certificate_A: f carries no bound path M");
    if (!p.h.phi()) throw PreconditionError("certificate_A: h carries no contraction modulus phi");
    const double H0 = detail::h_at_zero_sup(p);
    const double K0 = ks_integral(*m, p.g, p.t0, p.t_end())[0];
    return p.h.phi()(N) / N + (detail::initial_offset(p) + H0 + K0) / N - 1.0;
}

inline CertificateResult certificate_A(const HMDEProblem& p) {
    p.validate();
    const auto& m = p.f.bound_path();
    if (!m) throw PreconditionError("certificate_A: f carries no bound path M");
    validate_d_function(p.h.phi(), "h.phi");
    for (const State& v : m->values())
        if (v[0] < 0) throw PreconditionError("certificate_A: bound path M is negative somewhere");

    CertificateResult res;
    res.H0 = detail::h_at_zero_sup(p);
    res.K0 = ks_integral(*m, p.g, p.t0, p.t_end())[0];
    const double offset = detail::initial_offset(p);
    double N = 1.0;
    for (int k = 0; k <= kCertificateMaxDoublings; ++k, N *= 2) {
        const double margin = p.h.phi()(N) / N + (offset + res.H0 + res.K0) / N - 1.0;
        res.N = N;
        res.margin = margin;
        if (margin < 0) {
            res.success = true;
            return res;
        }
    }
    return res;
}

/// Left side minus 1 of the family inequality at radius N.
inline double certificate_margin_Astar(const HMDEProblem& p, double N) {
    if (!p.f.bound_family()) throw PreconditionError("certificate_Astar: f carries no bound family M(., r)");
    if (!p.h.phi_family()) throw PreconditionError("certificate_Astar: h carries no family phi(., r)");
    const double H0 = detail::h_at_zero_sup(p);
    const double K = ks_integral(detail::sample_bound_family(p.f.bound_family(), p.g.grid(), N), p.g,
                                 p.t0, p.t_end())[0];
    return p.h.phi_family()(N, N) / N + (detail::initial_offset(p) + H0 + K) / N - 1.0;
}

inline CertificateResult certificate_Astar(const HMDEProblem& p) {
    p.validate();
    const MFamily& m = p.f.bound_family();
    const DFamily& phi = p.h.phi_family();
    if (!m) throw PreconditionError("certificate_Astar: f carries no bound family M(., r)");
    if (!phi) throw PreconditionError("certificate_Astar: h carries no family phi(., r)");

    // Monotonicity of M(s, .) over r = 2^-10 ... 2^60 at every grid node of g.
    std::vector<double> r_samples;
    for (int k = -10; k <= kCertificateMaxDoublings; ++k) r_samples.push_back(std::ldexp(1.0, k));
    validate_m_family(m, p.g.grid().times(), r_samples);

    CertificateResult res;
    res.H0 = detail::h_at_zero_sup(p);
    const double offset = detail::initial_offset(p);
    double N = 1.0;
    for (int k = 0; k <= kCertificateMaxDoublings; ++k, N *= 2) {
        validate_d_family_at(phi, N, "h.phi");
        const double K = ks_integral(detail::sample_bound_family(m, p.g.grid(), N), p.g, p.t0,
                                     p.t_end())[0];
        const double margin = phi(N, N) / N + (offset + res.H0 + K) / N - 1.0;
        res.N = N;
        res.K0 = K;
        res.margin = margin;
        if (margin < 0) {
            res.success = true;
            return res;
        }
    }
    return res;
}

} // namespace hmde
