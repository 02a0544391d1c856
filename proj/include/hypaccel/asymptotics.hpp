#pragma once

// Remainder asymptotics of the partial sums s_n = sum_{k<n} t_k:
//
//   s_n ~ s + mu z^n n^lambda sum_k c_k / n^k,
//
// with lambda = sigma at z = 1 and sigma - 1 elsewhere.  The coefficients
// c_k follow from the term-ratio coefficients r_k by two recursions, one for
// each regime.  The scale mu is never stored: the two-point formula in the
// engine eliminates it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hypaccel/errors.hpp"
#include "hypaccel/scalar.hpp"
#include "hypaccel/termratio.hpp"

namespace hypaccel {

enum class PointKind { BranchPoint, InsideDisk, OnCircle };

template <ComplexScalar C>
struct SeriesPoint {
    C z;
    PointKind kind;
};

/// Classifies z.  z = 1 is detected by exact equality; |z| within 4 ulp of
/// one counts as the unit circle; anything further out is rejected.
template <ComplexScalar C>
SeriesPoint<C> make_point(const C& z)
{
    if (z == C(1.0)) return {z, PointKind::BranchPoint};
    const double r = magnitude(z);
    const double tol = 4.0 * std::numeric_limits<double>::epsilon();
    if (!(r <= 1.0 + tol)) throw domain_error("|z| > 1: the defining series diverges");
    if (r >= 1.0 - tol) return {z, PointKind::OnCircle};
    return {z, PointKind::InsideDisk};
}

template <ComplexScalar C>
struct AsymptoticExpansion {
    C lambda;
    std::vector<C> c; // c_0 .. c_{m-1}, c_0 == 1
    bool at_branch = false;
    std::size_t m = 0;
};

template <ComplexScalar C>
struct RemainderEstimate {
    C value;
    double rel_err;
    double leading_log_mag;
};

template <ComplexScalar C>
C exponent(const HypergeometricParams<C>& params, const SeriesPoint<C>& point)
{
    if (point.kind == PointKind::BranchPoint) return params.sigma();
    return params.sigma() - C(1.0);
}

namespace detail {

/// binom(w, l) for l = 0 .. l_max via falling factorials.
template <ComplexScalar C>
std::vector<C> binomial_row(const C& w, std::size_t l_max)
{
    std::vector<C> row(l_max + 1);
    row[0] = C(1.0);
    for (std::size_t l = 1; l <= l_max; ++l)
        row[l] = row[l - 1] * (w - C(static_cast<double>(l - 1))) / C(static_cast<double>(l));
    return row;
}

} // namespace detail

/// Coefficients for the root xi = z, valid for z != 1.
template <ComplexScalar C>
AsymptoticExpansion<C> coeffs_offbranch(const HypergeometricParams<C>& params, const C& z, std::size_t m)
{
    if (z == C(1.0)) throw domain_error("coeffs_offbranch: z = 1 is the branch point");
    if (m < 1) throw domain_error("coeffs_offbranch: order must be >= 1");

    AsymptoticExpansion<C> out;
    out.lambda = params.sigma() - C(1.0);
    out.at_branch = false;
    out.m = m;
    out.c.assign(m, C(0.0));
    out.c[0] = C(1.0);
    if (m == 1) return out;

    const std::vector<C> r = ratio_taylor_coeffs(params, m).r;
    // rows[j][l] = binom(sigma - 1 - j, l)
    std::vector<std::vector<C>> rows(m);
    for (std::size_t j = 0; j < m; ++j)
        rows[j] = detail::binomial_row(out.lambda - C(static_cast<double>(j)), m + 1 - j);

    const C one_minus_z = C(1.0) - z;
    for (std::size_t k = 1; k < m; ++k) {
        C acc(0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const std::vector<C>& b = rows[j];
            const double pow2 = std::ldexp(1.0, static_cast<int>(k + 1 - j)) - 1.0;
            C inner(0.0);
            for (std::size_t i = j; i <= k; ++i) inner += b[i - j] * r[k + 1 - i];
            const C bracket = (C(pow2) * z - C(1.0)) * b[k + 1 - j] - z * inner + r[k + 1 - j];
            acc += bracket * out.c[j];
        }
        out.c[k] = -acc / (C(static_cast<double>(k)) * one_minus_z);
    }
    return out;
}

/// Coefficients at z = 1; requires Re(sigma) < 0.
template <ComplexScalar C>
AsymptoticExpansion<C> coeffs_branch(const HypergeometricParams<C>& params, std::size_t m)
{
    const C sigma = params.sigma();
    if (!(re_d(sigma) < 0.0))
        throw divergence_error("series diverges at z = 1 unless Re(sigma) < 0");
    if (m < 1) throw domain_error("coeffs_branch: order must be >= 1");

    AsymptoticExpansion<C> out;
    out.lambda = sigma;
    out.at_branch = true;
    out.m = m;
    out.c.assign(m, C(0.0));
    out.c[0] = C(1.0);
    if (m == 1) return out;

    const std::vector<C> r = ratio_taylor_coeffs(params, m).r;
    // rows[j][l] = binom(sigma - j, l)
    std::vector<std::vector<C>> rows(m);
    for (std::size_t j = 0; j < m; ++j)
        rows[j] = detail::binomial_row(sigma - C(static_cast<double>(j)), m + 1 - j);

    for (std::size_t k = 1; k < m; ++k) {
        C acc(0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const std::vector<C>& b = rows[j];
            const double pow2 = std::ldexp(1.0, static_cast<int>(k + 2 - j)) - 2.0;
            // The i = j term of the inner sum cancels the trailing r_{k+2-j}
            // exactly, so r_{m+1} is never needed.
            C inner(0.0);
            for (std::size_t i = j + 1; i <= k + 1; ++i) inner += b[i - j] * r[k + 2 - i];
            acc += (C(pow2) * b[k + 2 - j] - inner) * out.c[j];
        }
        out.c[k] = acc / (C(static_cast<double>(k)) * (sigma - C(static_cast<double>(k))));
    }
    return out;
}

/// Coefficients of the xi = 1 solution off the branch point.  They vanish
/// beyond c_0; exposed so that property can be checked.
template <ComplexScalar C>
std::vector<C> xi1_coeffs_offbranch(const HypergeometricParams<C>& params, const C& z, std::size_t m)
{
    if (z == C(1.0)) throw domain_error("xi1_coeffs_offbranch: z = 1 is the branch point");
    if (m < 1) throw domain_error("xi1_coeffs_offbranch: order must be >= 1");
    std::vector<C> c(m, C(0.0));
    c[0] = C(1.0);
    if (m == 1) return c;

    const std::vector<C> r = ratio_taylor_coeffs(params, m).r;
    // Coefficients of the partial-sum recurrence s_{n+2} + a(n) s_{n+1} + b(n) s_n = 0.
    const auto a = [&](std::size_t k) { return k == 0 ? -(C(1.0) + z) : -(z * r[k]); };
    const auto b = [&](std::size_t k) { return z * r[k]; };

    std::vector<std::vector<C>> rows(m);
    for (std::size_t j = 0; j < m; ++j)
        rows[j] = detail::binomial_row(C(-static_cast<double>(j)), m + 1);

    const C one_minus_z = C(1.0) - z;
    for (std::size_t k = 1; k < m; ++k) {
        C acc(0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const std::vector<C>& bin = rows[j];
            const double pow2 = std::ldexp(1.0, static_cast<int>(k + 1 - j));
            C bracket = C(pow2) * bin[k + 1 - j];
            for (std::size_t i = j; i <= k + 1; ++i) bracket += bin[i - j] * a(k + 1 - i);
            bracket += b(k + 1 - j);
            acc += bracket * c[j];
        }
        c[k] = acc / (C(static_cast<double>(k)) * one_minus_z);
    }
    return c;
}

/// Truncated remainder estimate z^n n^lambda sum_{k<m} c_k n^-k and its
/// relative error, which degrades once the leading factor leaves the
/// normalized range.
template <ComplexScalar C>
RemainderEstimate<C> omega(const AsymptoticExpansion<C>& exp, const C& z, long n, const PrecisionProfile& profile)
{
    const C nn(static_cast<double>(n));
    const C log_n = log_of(nn);
    C log_lead = exp.lambda * log_n;
    double log_mag = re_d(exp.lambda) * std::log(static_cast<double>(n));
    if (!exp.at_branch) {
        log_lead += nn * log_of(z);
        log_mag = log_abs_pow(z, n, exp.lambda);
    }
    const C lead = exp_of(log_lead);

    const C inv_n = C(1.0) / nn;
    C sum = exp.c[exp.m - 1];
    for (std::size_t k = exp.m - 1; k-- > 0;) sum = sum * inv_n + exp.c[k];

    RemainderEstimate<C> out{lead * sum, profile.eps_p, log_mag};
    const double log_fnorm = std::log(profile.f_norm);
    if (log_mag < log_fnorm) out.rel_err = std::exp(log_fnorm - log_mag);
    return out;
}

} // namespace hypaccel
