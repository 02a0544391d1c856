#pragma once

// Self-terminating accelerated summation of q+1Fq.
//
// Each iteration extends the partial sums by one term, forms the pair
// estimate
//
//   s^(m)_n = (s_n w_{n+1} - s_{n+1} w_n) / (w_{n+1} - w_n)
//
// from the truncated remainder estimates w, and compares an estimate of the
// truncation error with one of the propagated rounding error.  The loop ends
// as soon as the truncation error meets the tolerance (Converged), the
// rounding error dominates (InsufficientPrecision), or the iteration cap is
// reached (MaxIterations).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hypaccel/asymptotics.hpp"
#include "hypaccel/errors.hpp"
#include "hypaccel/scalar.hpp"
#include "hypaccel/termratio.hpp"

namespace hypaccel {

enum class TruncationVariant { Modified, Plain };

struct EngineConfig {
    std::size_t m = 45;
    long N = 2000;
    double epsilon = 2e-14;
    double tau = 0.1;
    TruncationVariant trunc_variant = TruncationVariant::Modified;

    void validate() const
    {
        if (m < 1) throw domain_error("order m must be >= 1");
        if (N < 3) throw domain_error("iteration cap N must be >= 3");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw domain_error("epsilon must lie in (0, 1)");
        if (!(tau > 0.0 && tau <= 1.0)) throw domain_error("tau must lie in (0, 1]");
    }
};

enum class EvalStatus { Converged, InsufficientPrecision, MaxIterations };

inline const char* to_string(EvalStatus s) noexcept
{
    switch (s) {
    case EvalStatus::Converged: return "Converged";
    case EvalStatus::InsufficientPrecision: return "InsufficientPrecision";
    case EvalStatus::MaxIterations: return "MaxIterations";
    }
    return "?";
}

struct EvalDiagnostics {
    double max_partial_sum_mag = 0.0;
    bool underflow_seen = false;
};

template <ComplexScalar C>
struct EvalOutcome {
    EvalStatus status;
    C value;
    double rel_err_est;
    long n_used;
    EvalDiagnostics diagnostics;
};

/// Rolling loop state at index n: holds s_n, s_{n+1} and the next term
/// t_{n+1}, so that s_{n+2} = s_{n+1} + t_{n+1}.
template <ComplexScalar C>
struct EngineState {
    long n = 1;
    C s_n;
    C s_np1;
    C t;
    double delta_s_n = 0.0;
    double delta_s_np1 = 0.0;
    RemainderEstimate<C> omega_n;
    RemainderEstimate<C> omega_np1;
    C s_acc_prev;
    C s_acc;
    bool has_prev = false;
};

template <ComplexScalar C>
C accelerate_pair(const C& s_n, const C& s_np1, const C& w_n, const C& w_np1)
{
    if (w_np1 == w_n) throw degenerate_weights_error("remainder estimates coincide");
    return (s_n * w_np1 - s_np1 * w_n) / (w_np1 - w_n);
}

/// Estimated truncation error of the accelerated value at index n, from the
/// difference of two successive accelerated values.  Returns +inf when the
/// denominator vanishes.
template <ComplexScalar C>
double truncation_error(const C& s_acc, const C& s_acc_prev, const C& z, const C& lambda,
                        std::size_t m, long n, TruncationVariant variant)
{
    const double diff = magnitude(s_acc - s_acc_prev);
    if (diff == 0.0) return 0.0;
    const C base = C(1.0) + C(1.0) / C(static_cast<double>(n));
    const C expo = variant == TruncationVariant::Modified
                       ? C(-static_cast<double>(m))
                       : lambda - C(static_cast<double>(m));
    const double den = magnitude(z * cpow(base, expo) - C(1.0));
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return diff / den;
}

/// Propagated rounding error of the accelerated value built from the
/// state's two partial sums and remainder estimates.
template <ComplexScalar C>
double fp_error(const EngineState<C>& state, const C& s_acc)
{
    const double den = magnitude(state.omega_np1.value - state.omega_n.value);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    const double acc = magnitude(s_acc);
    const double w_n = magnitude(state.omega_n.value);
    const double w_np1 = magnitude(state.omega_np1.value);
    return (w_np1 * (state.delta_s_n + acc * state.omega_np1.rel_err) +
            w_n * (state.delta_s_np1 + acc * state.omega_n.rel_err)) / den;
}

/// Builds the state at n = 1 from s_0 = 0, t_0 = 1.
template <ComplexScalar C>
EngineState<C> initial_state(const HypergeometricParams<C>& params, const C& z,
                             const AsymptoticExpansion<C>& exp, const PrecisionProfile& profile)
{
    EngineState<C> st;
    st.n = 1;
    const C t1 = z * ratio_value(params, 0);
    st.s_n = C(1.0);
    st.s_np1 = st.s_n + t1;
    st.t = z * ratio_value(params, 1) * t1;
    st.delta_s_n = profile.eps_p * magnitude(st.s_n);
    st.delta_s_np1 = st.delta_s_n + profile.eps_p * magnitude(st.s_np1);
    st.omega_n = omega(exp, z, 1, profile);
    st.omega_np1 = omega(exp, z, 2, profile);
    // equal weights here happen for isolated n (m = 1, z^2 (n+1) = z n);
    // fall back to the raw sum and let the loop move past it
    st.s_acc = st.omega_np1.value == st.omega_n.value
                   ? st.s_np1
                   : accelerate_pair(st.s_n, st.s_np1, st.omega_n.value, st.omega_np1.value);
    st.s_acc_prev = st.s_acc;
    st.has_prev = false;
    return st;
}

/// Advances sums, bounds and weights by one index; the accelerated values
/// are carried over unchanged.
template <ComplexScalar C>
EngineState<C> advance(const EngineState<C>& state, const HypergeometricParams<C>& params, const C& z,
                       const AsymptoticExpansion<C>& exp, const PrecisionProfile& profile)
{
    EngineState<C> next;
    next.n = state.n + 1;
    next.s_n = state.s_np1;
    next.s_np1 = state.s_np1 + state.t;
    next.t = z * ratio_value(params, state.n + 1) * state.t;
    next.delta_s_n = state.delta_s_np1;
    next.delta_s_np1 = state.delta_s_np1 + profile.eps_p * magnitude(next.s_np1);
    next.omega_n = state.omega_np1;
    next.omega_np1 = omega(exp, z, next.n + 1, profile);
    next.s_acc_prev = state.s_acc;
    next.s_acc = state.s_acc;
    next.has_prev = false;
    return next;
}

/// Advances the state by one index.
template <ComplexScalar C>
EngineState<C> step(const EngineState<C>& state, const HypergeometricParams<C>& params, const C& z,
                    const AsymptoticExpansion<C>& exp, const PrecisionProfile& profile)
{
    EngineState<C> next = advance(state, params, z, exp, profile);
    next.s_acc = accelerate_pair(next.s_n, next.s_np1, next.omega_n.value, next.omega_np1.value);
    next.has_prev = true;
    return next;
}

namespace detail {

template <ComplexScalar C>
void compensated_add(C& sum, C& comp, const C& x)
{
    if constexpr (std::is_same_v<C, MachineComplex>) {
        double sr, er, si, ei;
        eft::two_sum(sum.real(), x.real(), sr, er);
        eft::two_sum(sum.imag(), x.imag(), si, ei);
        sum = {sr, si};
        comp += MachineComplex(er, ei);
    } else {
        sum += x;
    }
}

/// Direct sum of a terminating series (some upper parameter is -k).
template <ComplexScalar C>
EvalOutcome<C> terminating_sum(const HypergeometricParams<C>& params, const C& z, const PrecisionProfile& profile)
{
    long terms = std::numeric_limits<long>::max();
    for (const C& a : params.upper())
        if (is_nonpositive_integer(a)) terms = std::min(terms, static_cast<long>(-re_d(a)) + 1);
    C sum(0.0), comp(0.0), t(1.0);
    double max_mag = 0.0;
    for (long k = 0; k < terms; ++k) {
        compensated_add(sum, comp, t);
        max_mag = std::max(max_mag, magnitude(sum));
        t = t * z * ratio_value(params, k);
    }
    const C value = sum + comp;
    return {EvalStatus::Converged, value, static_cast<double>(terms) * profile.eps_p, terms,
            {max_mag, false}};
}

} // namespace detail

/// Evaluates q+1Fq(upper; lower; z) to relative tolerance cfg.epsilon.
template <ComplexScalar C>
EvalOutcome<C> evaluate(const HypergeometricParams<C>& params, const SeriesPoint<C>& point,
                        const EngineConfig& cfg, const PrecisionProfile& profile = profile_of<C>())
{
    cfg.validate();
    const C& z = point.z;

    for (const C& a : params.upper())
        if (is_nonpositive_integer(a)) return detail::terminating_sum(params, z, profile);
    if (z == C(0.0)) return {EvalStatus::Converged, C(1.0), 0.0, 1, {1.0, false}};

    const double re_sigma = re_d(params.sigma());
    if (point.kind == PointKind::BranchPoint && !(re_sigma < 0.0))
        throw divergence_error("series diverges at z = 1 unless Re(sigma) < 0");
    if (point.kind == PointKind::OnCircle && !(re_sigma < 1.0))
        throw divergence_error("series diverges on |z| = 1 unless Re(sigma) < 1");

    const AsymptoticExpansion<C> exp = point.kind == PointKind::BranchPoint
                                           ? coeffs_branch(params, cfg.m)
                                           : coeffs_offbranch(params, z, cfg.m);

    EvalDiagnostics diag;
    const auto note = [&](const EngineState<C>& st) {
        diag.max_partial_sum_mag = std::max({diag.max_partial_sum_mag, magnitude(st.s_n), magnitude(st.s_np1)});
        if (st.omega_n.rel_err > profile.eps_p || st.omega_np1.rel_err > profile.eps_p) diag.underflow_seen = true;
    };
    const auto outcome = [&](EvalStatus status, const EngineState<C>& st, double tr) {
        const double mag = magnitude(st.s_acc);
        return EvalOutcome<C>{status, st.s_acc, mag > 0.0 ? tr / mag : tr, st.n + 1, diag};
    };

    // Coinciding weights from underflow end the run; an exact tie of
    // normalized weights only skips that index.
    const auto underflowed = [&](const EngineState<C>& s) {
        return s.omega_n.rel_err > profile.eps_p || s.omega_np1.rel_err > profile.eps_p;
    };
    EngineState<C> st = initial_state(params, z, exp, profile);
    bool valid = st.omega_np1.value != st.omega_n.value;
    note(st);
    if (!valid && underflowed(st))
        return {EvalStatus::InsufficientPrecision, st.s_acc, std::numeric_limits<double>::infinity(), 2, diag};

    double d_tr = std::numeric_limits<double>::infinity();
    double d_fp = 0.0;
    while (st.n < cfg.N) {
        EngineState<C> next = advance(st, params, z, exp, profile);
        const bool ok = next.omega_np1.value != next.omega_n.value;
        if (ok) next.s_acc = accelerate_pair(next.s_n, next.s_np1, next.omega_n.value, next.omega_np1.value);
        next.has_prev = ok && valid;
        st = next;
        valid = ok;
        note(st);
        if (!ok && underflowed(st)) return outcome(EvalStatus::InsufficientPrecision, st, d_tr);
        if (!st.has_prev) continue;
        d_tr = truncation_error(st.s_acc, st.s_acc_prev, z, exp.lambda, cfg.m, st.n - 1, cfg.trunc_variant);
        d_fp = fp_error(st, st.s_acc);
        if (!is_finite(st.s_acc) || std::isnan(d_tr) || std::isnan(d_fp))
            return outcome(EvalStatus::InsufficientPrecision, st, d_tr);
        const double tol = cfg.epsilon * magnitude(st.s_acc);
        if (d_tr <= tol) return outcome(EvalStatus::Converged, st, d_tr);
        if (cfg.tau * d_fp >= d_tr) return outcome(EvalStatus::InsufficientPrecision, st, d_tr);
    }
    return outcome(EvalStatus::MaxIterations, st, d_tr);
}

/// Accelerated estimates s^(m)_n for n = 1 .. n_max without any stopping
/// rule; m = 0 yields the raw partial sums s_n instead.
template <ComplexScalar C>
std::vector<C> accelerated_trace(const HypergeometricParams<C>& params, const SeriesPoint<C>& point,
                                 std::size_t m, long n_max, const PrecisionProfile& profile = profile_of<C>())
{
    std::vector<C> out;
    const C& z = point.z;
    if (m == 0) {
        C s(0.0), t(1.0);
        for (long n = 1; n <= n_max; ++n) {
            s += t;
            out.push_back(s);
            t = t * z * ratio_value(params, n - 1);
        }
        return out;
    }
    const AsymptoticExpansion<C> exp = point.kind == PointKind::BranchPoint
                                           ? coeffs_branch(params, m)
                                           : coeffs_offbranch(params, z, m);
    EngineState<C> st = initial_state(params, z, exp, profile);
    out.push_back(st.s_acc);
    while (st.n < n_max) {
        st = advance(st, params, z, exp, profile);
        if (st.omega_np1.value != st.omega_n.value)
            st.s_acc = accelerate_pair(st.s_n, st.s_np1, st.omega_n.value, st.omega_np1.value);
        out.push_back(st.s_acc);
    }
    return out;
}

} // namespace hypaccel
