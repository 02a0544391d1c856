#pragma once

// Term ratio of the q+1Fq series and its Taylor coefficients in 1/n.
//
//   t_{n+1} / t_n = z r(n),   r(n) = prod(alpha_j + n) / (prod(beta_j + n) (1 + n))
//
// With x = 1/n, r(x) = P(x) Q(x) where P is the product of (1 + alpha_j x)
// and Q the reciprocal of (1 + x) prod(1 + beta_j x).  The Taylor
// coefficients of P are the elementary symmetric polynomials e_k of the
// upper parameters; those of Q are (-1)^k h_k, the complete homogeneous
// symmetric polynomials of the lower parameters augmented with 1.  Both
// follow from power sums through Newton's identities.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hypaccel/errors.hpp"
#include "hypaccel/scalar.hpp"

namespace hypaccel {

template <ComplexScalar C>
class HypergeometricParams {
public:
    HypergeometricParams(std::vector<C> upper, std::vector<C> lower)
        : upper_(std::move(upper)), lower_(std::move(lower))
    {
        if (upper_.size() != lower_.size() + 1)
            throw domain_error("expected q+1 upper and q lower parameters, got " +
                               std::to_string(upper_.size()) + " and " +
                               std::to_string(lower_.size()));
        for (const C& b : lower_)
            if (is_nonpositive_integer(b))
                throw undefined_function_error("lower parameter is a non-positive integer");
        sigma_ = C(0.0);
        for (const C& a : upper_) sigma_ += a;
        for (const C& b : lower_) sigma_ -= b;
    }

    const std::vector<C>& upper() const noexcept { return upper_; }
    const std::vector<C>& lower() const noexcept { return lower_; }
    std::size_t q() const noexcept { return lower_.size(); }

    /// Sum of upper minus sum of lower parameters.
    const C& sigma() const noexcept { return sigma_; }

    /// Same parameters in another scalar instantiation, routed through
    /// binary64 (exact when the parameters came from binary64 text).
    template <ComplexScalar D>
    HypergeometricParams<D> as() const
    {
        std::vector<D> u, l;
        for (const C& a : upper_) u.push_back(from_machine<D>(to_machine(a)));
        for (const C& b : lower_) l.push_back(from_machine<D>(to_machine(b)));
        return {std::move(u), std::move(l)};
    }

private:
    std::vector<C> upper_;
    std::vector<C> lower_;
    C sigma_;
};

template <ComplexScalar C>
struct RatioCoefficients {
    std::vector<C> r; // r_0 .. r_{m_r}
};

/// [p_1 .. p_{k_max}] with p_k = sum_i values_i^k.
template <ComplexScalar C>
std::vector<C> power_sums(const std::vector<C>& values, std::size_t k_max)
{
    std::vector<C> p(k_max, C(0.0));
    for (const C& v : values) {
        C pw = v;
        for (std::size_t k = 0; k < k_max; ++k) {
            p[k] += pw;
            pw *= v;
        }
    }
    return p;
}

/// [e_0 .. e_{k_max}] by Newton's identities; e_k is exactly zero for k
/// beyond the number of values.
template <ComplexScalar C>
std::vector<C> elementary_symmetric(const std::vector<C>& alphas, std::size_t k_max)
{
    std::vector<C> e(k_max + 1, C(0.0));
    e[0] = C(1.0);
    const std::size_t top = std::min(k_max, alphas.size());
    if (top == 0) return e;
    const std::vector<C> p = power_sums(alphas, top);
    for (std::size_t k = 1; k <= top; ++k) {
        C acc(0.0);
        for (std::size_t i = 1; i <= k; ++i) {
            const C term = e[k - i] * p[i - 1];
            if (i % 2 == 1) acc += term;
            else acc -= term;
        }
        e[k] = acc / C(static_cast<double>(k));
    }
    return e;
}

/// [h_0 .. h_{k_max}].  The caller includes the implicit parameter 1.
template <ComplexScalar C>
std::vector<C> complete_homogeneous(const std::vector<C>& betas_aug, std::size_t k_max)
{
    std::vector<C> h(k_max + 1, C(0.0));
    h[0] = C(1.0);
    if (k_max == 0) return h;
    const std::vector<C> p = power_sums(betas_aug, k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        C acc(0.0);
        for (std::size_t i = 1; i <= k; ++i) acc += h[k - i] * p[i - 1];
        h[k] = acc / C(static_cast<double>(k));
    }
    return h;
}

/// r_0 .. r_{m_r}, r_k = sum_i (-1)^{k-i} e_i h_{k-i}.
template <ComplexScalar C>
RatioCoefficients<C> ratio_taylor_coeffs(const HypergeometricParams<C>& params, std::size_t m_r)
{
    if (m_r < 1) throw domain_error("ratio_taylor_coeffs: m_r must be >= 1");
    std::vector<C> aug;
    aug.reserve(params.q() + 1);
    aug.push_back(C(1.0));
    aug.insert(aug.end(), params.lower().begin(), params.lower().end());

    const std::vector<C> e = elementary_symmetric(params.upper(), m_r);
    const std::vector<C> h = complete_homogeneous(aug, m_r);

    RatioCoefficients<C> out;
    out.r.assign(m_r + 1, C(0.0));
    out.r[0] = C(1.0);
    const std::size_t e_top = params.upper().size();
    for (std::size_t k = 1; k <= m_r; ++k) {
        C acc(0.0);
        for (std::size_t i = 0; i <= std::min(k, e_top); ++i) {
            const C term = e[i] * h[k - i];
            if ((k - i) % 2 == 0) acc += term;
            else acc -= term;
        }
        out.r[k] = acc;
    }
    return out;
}

/// r(n) evaluated directly from the parameters.
template <ComplexScalar C>
C ratio_value(const HypergeometricParams<C>& params, long n)
{
    const C nn(static_cast<double>(n));
    C num(1.0);
    for (const C& a : params.upper()) num *= a + nn;
    C den = nn + C(1.0);
    for (const C& b : params.lower()) den *= b + nn;
    return num / den;
}

} // namespace hypaccel
