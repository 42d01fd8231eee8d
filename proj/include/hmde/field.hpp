#pragma once

// FieldSpec: a nonlinearity f(t, u) or h(t, u) together with the bound data
// the existence theory asks for.
//
//   bound  M(s)       single integrable bound           (f-role, condition A2)
//          M(s, r)    family nondecreasing in r          (f-role, condition A2*)
//   phi    phi(t)     D-function contraction modulus     (h-role, condition A3)
//          phi(t, r)  r-indexed family of D-functions    (h-role, condition A3*)
//
// A field may also carry point overrides: at an override time tau the node
// value f(tau, u) is replaced by a different handle while the one-sided limits
// keep using the base handle. This is how time-discontinuous integrands
// (impulses) are placed on grid nodes.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmde/errors.hpp"
#include "hmde/regulated.hpp"

namespace hmde {

using FieldFn = std::function<State(double, const State&)>;
using DFunction = std::function<double(double)>;
/// phi(t, r): contraction modulus on the ball of radius r.
using DFamily = std::function<double(double, double)>;
/// M(s, r): bound of f(s, u) for |u| <= r.
using MFamily = std::function<double(double, double)>;

struct PointOverride {
    double time;
    FieldFn fn;
};

class FieldSpec {
public:
    FieldSpec() = default;
    explicit FieldSpec(FieldFn fn) : fn_(std::move(fn)) {}

    /// f(t, u) = 0 in dimension n, with M = 0 / phi = 0 bound data.
    static FieldSpec zero(Eigen::Index n) {
        return FieldSpec([n](double, const State&) -> State { return State::Zero(n); })
            .with_bound_family([](double, double) { return 0.0; })
            .with_phi([](double) { return 0.0; })
            .with_phi_family([](double, double) { return 0.0; });
    }

    /// f(t, u) = c.
    static FieldSpec constant(const State& c) {
        return FieldSpec([c](double, const State&) -> State { return c; });
    }

    FieldSpec with_bound(RegulatedPath m) const {
        if (m.dim() != 1) throw InvalidArgument("FieldSpec: bound path M must be scalar");
        FieldSpec out = *this;
        out.bound_path_ = std::move(m);
        return out;
    }

    FieldSpec with_bound_family(MFamily m) const {
        FieldSpec out = *this;
        out.bound_family_ = std::move(m);
        return out;
    }

    FieldSpec with_phi(DFunction phi) const {
        FieldSpec out = *this;
        out.phi_ = std::move(phi);
        return out;
    }

    FieldSpec with_phi_family(DFamily phi) const {
        FieldSpec out = *this;
        out.phi_family_ = std::move(phi);
        return out;
    }

    FieldSpec with_override(double time, FieldFn fn) const {
        FieldSpec out = *this;
        out.overrides_.push_back({time, std::move(fn)});
        return out;
    }

    /// Declares p uniformly S-asymptotically omega-periodic on bounded sets.
    FieldSpec with_sap_period(double omega) const {
        FieldSpec out = *this;
        out.sap_omega_ = omega;
        return out;
    }

    bool valid() const noexcept { return static_cast<bool>(fn_); }

    /// Node value: an override at exactly t wins over the base handle.
    State value_at(double t, const State& u) const {
        for (const auto& o : overrides_)
            if (o.time == t) return o.fn(t, u);
        return fn_(t, u);
    }

    /// One-sided limits s -> t+- of f(s, u) use the base handle.
    State limit_at(double t, const State& u) const { return fn_(t, u); }

    State operator()(double t, const State& u) const { return value_at(t, u); }

    const FieldFn& base() const noexcept { return fn_; }
    const std::optional<RegulatedPath>& bound_path() const noexcept { return bound_path_; }
    const MFamily& bound_family() const noexcept { return bound_family_; }
    const DFunction& phi() const noexcept { return phi_; }
    const DFamily& phi_family() const noexcept { return phi_family_; }
    const std::vector<PointOverride>& overrides() const noexcept { return overrides_; }
    std::optional<double> sap_period() const noexcept { return sap_omega_; }

private:
    FieldFn fn_;
    std::optional<RegulatedPath> bound_path_;
    MFamily bound_family_;
    DFunction phi_;
    DFamily phi_family_;
    std::vector<PointOverride> overrides_;
    std::optional<double> sap_omega_;
};

/// Logarithmic sample set used to validate D-functions: 64 points per decade
/// over [1e-9, 1e9].
inline const std::vector<double>& d_function_samples() {
    static const std::vector<double> samples = [] {
        std::vector<double> s;
        constexpr int per_decade = 64;
        for (int k = -9 * per_decade; k <= 9 * per_decade; ++k)
            s.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
        return s;
    }();
    return samples;
}

/// Checks phi(0) = 0, phi >= 0, phi nondecreasing and phi(t) < t on the sample
/// set. Passing is numerical evidence only.
inline void validate_d_function(const DFunction& phi, const std::string& what = "phi") {
    if (!phi) throw PreconditionError(what + ": no contraction modulus declared");
    const double at0 = phi(0.0);
    if (at0 != 0.0) throw PreconditionError(what + ": phi(0) = " + detail::fmt_time(at0) + " != 0");
    double prev = 0.0;
    for (double t : d_function_samples()) {
        const double v = phi(t);
        if (!std::isfinite(v) || v < 0)
            throw PreconditionError(what + ": phi(" + detail::fmt_time(t) + ") is negative or non-finite");
        if (v < prev - 1e-14 * std::max(1.0, prev))
            throw PreconditionError(what + ": phi decreases at t = " + detail::fmt_time(t));
        if (!(v < t))
            throw PreconditionError(what + ": phi(t) < t fails at t = " + detail::fmt_time(t));
        prev = v;
    }
}

/// Validates phi(., r) as a D-function for a fixed r.
inline void validate_d_family_at(const DFamily& phi, double r, const std::string& what = "phi") {
    if (!phi) throw PreconditionError(what + ": no contraction modulus family declared");
    validate_d_function([&](double t) { return phi(t, r); },
                        what + "(., " + detail::fmt_time(r) + ")");
}

/// Checks M(s, r) >= 0 and nondecreasing in r over the given (s, r) samples.
inline void validate_m_family(const MFamily& m, const std::vector<double>& s_samples,
                              const std::vector<double>& r_samples) {
    if (!m) throw PreconditionError("M: no bound family declared");
    for (double s : s_samples) {
        double prev = -1.0;
        double prev_r = 0.0;
        for (double r : r_samples) {
            const double v = m(s, r);
            if (!std::isfinite(v) || v < 0)
                throw PreconditionError("M(" + detail::fmt_time(s) + ", " + detail::fmt_time(r) +
                                        ") is negative or non-finite");
            if (v < prev)
                throw PreconditionError("M(" + detail::fmt_time(s) + ", .) decreases between r = " +
                                        detail::fmt_time(prev_r) + " and r = " + detail::fmt_time(r));
            prev = v;
            prev_r = r;
        }
    }
}

} // namespace hmde
