#pragma once

// Test-side reference computations that share no code path with the
// library kernels they check.

#include <cstddef>
#include <random>
#include <vector>

#include "hypaccel/hypaccel.hpp"

namespace testsupport {

using hypaccel::ExtendedComplex;
using hypaccel::MachineComplex;

/// Coefficients of prod (1 + v x), lowest degree first.
template <class C>
std::vector<C> expand_linear_factors(const std::vector<C>& values)
{
    std::vector<C> poly{C(1.0)};
    for (const C& v : values) {
        std::vector<C> next(poly.size() + 1, C(0.0));
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] += poly[i] * v;
        }
        poly = next;
    }
    return poly;
}

/// Taylor coefficients of P(x)/Q(x) by synthetic division, where
/// P = prod(1 + a x) and Q = (1 + x) prod(1 + b x).
template <class C>
std::vector<C> ratio_coeffs_by_division(const std::vector<C>& upper, const std::vector<C>& lower, std::size_t m_r)
{
    std::vector<C> lower_aug{C(1.0)};
    lower_aug.insert(lower_aug.end(), lower.begin(), lower.end());
    const std::vector<C> p = expand_linear_factors(upper);
    const std::vector<C> q = expand_linear_factors(lower_aug);
    std::vector<C> r(m_r + 1, C(0.0));
    for (std::size_t k = 0; k <= m_r; ++k) {
        C acc = k < p.size() ? p[k] : C(0.0);
        for (std::size_t i = 1; i <= k && i < q.size(); ++i) acc -= q[i] * r[k - i];
        r[k] = acc / q[0];
    }
    return r;
}

/// Partial sums s_0 .. s_{n_max} (s_0 = 0) from Pochhammer products formed
/// afresh for every term ratio.
template <class C>
std::vector<C> partial_sums(const std::vector<C>& upper, const std::vector<C>& lower, const C& z, long n_max)
{
    std::vector<C> s{C(0.0)};
    C sum(0.0), t(1.0);
    for (long k = 0; k < n_max; ++k) {
        sum += t;
        s.push_back(sum);
        const C kk(static_cast<double>(k));
        C num(1.0), den(kk + C(1.0));
        for (const C& a : upper) num *= a + kk;
        for (const C& b : lower) den *= b + kk;
        t = t * z * num / den;
    }
    return s;
}

/// Least-squares solution of the overdetermined complex system A x = y via
/// normal equations and Gaussian elimination (small sizes only).
template <class C>
std::vector<C> least_squares(const std::vector<std::vector<C>>& rows, const std::vector<C>& y)
{
    const std::size_t n = rows.front().size();
    std::vector<std::vector<C>> g(n, std::vector<C>(n + 1, C(0.0)));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) {
            const C ci = hypaccel::conj_of(rows[r][i]);
            for (std::size_t j = 0; j < n; ++j) g[i][j] += ci * rows[r][j];
            g[i][n] += ci * y[r];
        }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (hypaccel::magnitude(g[i][k]) > hypaccel::magnitude(g[piv][k])) piv = i;
        std::swap(g[k], g[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const C f = g[i][k] / g[k][k];
            for (std::size_t j = k; j <= n; ++j) g[i][j] -= f * g[k][j];
        }
    }
    std::vector<C> x(n, C(0.0));
    for (std::size_t i = n; i-- > 0;) {
        C acc = g[i][n];
        for (std::size_t j = i + 1; j < n; ++j) acc -= g[i][j] * x[j];
        x[i] = acc / g[i][i];
    }
    return x;
}

/// Terms t_0 .. t_{count-1} of the defining series, from Pochhammer
/// factors formed afresh at each k.
template <class C>
std::vector<C> series_terms(const std::vector<C>& upper, const std::vector<C>& lower, const C& z, long count)
{
    std::vector<C> t;
    C term(1.0);
    for (long k = 0; k < count; ++k) {
        t.push_back(term);
        const C kk(static_cast<double>(k));
        C num(1.0), den(kk + C(1.0));
        for (const C& a : upper) num *= a + kk;
        for (const C& b : lower) den *= b + kk;
        term = term * z * num / den;
    }
    return t;
}

/// s_n - s = -sum_{k >= n} t_k for n = 0 .. n_max, summed backwards from
/// far enough out that the geometric tail is negligible (|z| < 1 only).
template <class C>
std::vector<C> remainders_by_tail(const std::vector<C>& upper, const std::vector<C>& lower, const C& z, long n_max,
                                  long extra)
{
    const std::vector<C> t = series_terms(upper, lower, z, n_max + extra);
    std::vector<C> rem(static_cast<std::size_t>(n_max) + 1);
    C tail(0.0);
    for (long k = n_max + extra - 1; k >= 0; --k) {
        tail += t[static_cast<std::size_t>(k)];
        if (k <= n_max) rem[static_cast<std::size_t>(k)] = -tail;
    }
    return rem;
}

/// Fits rem_n / (z^n n^lambda) over the given n by sum_k a_k n^-k,
/// k < terms, and returns a_k / a_0.
inline std::vector<MachineComplex> fitted_coeffs(const std::vector<ExtendedComplex>& rem, const ExtendedComplex& z,
                                                 const ExtendedComplex& lambda, const std::vector<long>& ns,
                                                 std::size_t terms)
{
    using E = ExtendedComplex;
    std::vector<std::vector<E>> rows;
    std::vector<E> y;
    const E log_z = hypaccel::log_of(z);
    for (long n : ns) {
        const E nn(static_cast<double>(n));
        const E lead = hypaccel::exp_of(nn * log_z + lambda * hypaccel::log_of(nn));
        y.push_back(rem[static_cast<std::size_t>(n)] / lead);
        std::vector<E> row;
        E pw(1.0);
        for (std::size_t k = 0; k < terms; ++k) {
            row.push_back(pw);
            pw = pw / nn;
        }
        rows.push_back(row);
    }
    const std::vector<E> a = least_squares(rows, y);
    std::vector<MachineComplex> out;
    for (const E& v : a) out.push_back(hypaccel::to_machine(v / a[0]));
    return out;
}

inline MachineComplex random_complex(std::mt19937_64& rng, double R)
{
    std::uniform_real_distribution<double> u(-R, R);
    const double re = u(rng);
    return {re, u(rng)};
}

/// Lower parameters kept away from the poles.
inline MachineComplex random_lower(std::mt19937_64& rng, double R)
{
    for (;;) {
        const MachineComplex b = random_complex(rng, R);
        const double k = std::round(b.real());
        if (!(k <= 0.0 && std::abs(b - MachineComplex(k, 0.0)) < 1e-6)) return b;
    }
}

inline MachineComplex random_in_disk(std::mt19937_64& rng, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    return std::polar(r, 2.0 * 3.141592653589793 * u(rng));
}

/// Relative difference measured in units of 2^-52.
inline double ulps(const MachineComplex& a, const MachineComplex& b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / (scale * std::numeric_limits<double>::epsilon());
}

} // namespace testsupport
