#pragma once

// E-method with the basis g_k(j) = z^j j^(lambda - k + 1), k = 1 .. m:
// the limit s and the amplitudes solve
//
//   s + sum_k a_k g_k(j) = s_j,   j = n .. n + m.
//
// Solved directly by complete pivoting so that the conditioning of the
// system is visible.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "hypaccel/asymptotics.hpp"
#include "hypaccel/engine.hpp"
#include "hypaccel/errors.hpp"
#include "hypaccel/oracle.hpp"
#include "hypaccel/scalar.hpp"
#include "hypaccel/termratio.hpp"

namespace hypaccel {

template <ComplexScalar C>
struct EMethodResult {
    C s_estimate;
    double condition_estimate;
    std::size_t m;
    long n_start;
};

namespace detail {

/// Dense LU with complete pivoting, P A Q = L U, stored in place.
template <ComplexScalar C>
class PivotedLU {
public:
    explicit PivotedLU(std::vector<C> a, std::size_t n) : a_(std::move(a)), n_(n), row_(n), col_(n)
    {
        for (std::size_t i = 0; i < n_; ++i) row_[i] = col_[i] = i;
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t pr = k, pc = k;
            double best = -1.0;
            for (std::size_t i = k; i < n_; ++i)
                for (std::size_t j = k; j < n_; ++j) {
                    const double v = magnitude(at(i, j));
                    if (v > best) {
                        best = v;
                        pr = i;
                        pc = j;
                    }
                }
            if (!(best > 0.0) || !std::isfinite(best)) throw singular_system_error("E-method system is singular");
            if (pr != k) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(pr, j));
                std::swap(row_[k], row_[pr]);
            }
            if (pc != k) {
                for (std::size_t i = 0; i < n_; ++i) std::swap(at(i, k), at(i, pc));
                std::swap(col_[k], col_[pc]);
            }
            const C piv = at(k, k);
            for (std::size_t i = k + 1; i < n_; ++i) {
                const C f = at(i, k) / piv;
                at(i, k) = f;
                for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
            }
        }
    }

    /// Solves A x = b.
    std::vector<C> solve(const std::vector<C>& b) const
    {
        std::vector<C> y(n_);
        for (std::size_t i = 0; i < n_; ++i) y[i] = b[row_[i]];
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < i; ++j) y[i] -= at(i, j) * y[j];
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t j = i + 1; j < n_; ++j) y[i] -= at(i, j) * y[j];
            y[i] = y[i] / at(i, i);
        }
        std::vector<C> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[col_[i]] = y[i];
        return x;
    }

    /// Solves A^H x = b.
    std::vector<C> solve_adjoint(const std::vector<C>& b) const
    {
        // A = P^T L U Q^T, so A^H = Q U^H L^H P.
        std::vector<C> y(n_);
        for (std::size_t i = 0; i < n_; ++i) y[i] = b[col_[i]];
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j) y[i] -= conj_of(at(j, i)) * y[j];
            y[i] = y[i] / conj_of(at(i, i));
        }
        for (std::size_t i = n_; i-- > 0;)
            for (std::size_t j = i + 1; j < n_; ++j) y[i] -= conj_of(at(j, i)) * y[j];
        std::vector<C> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[row_[i]] = y[i];
        return x;
    }

    std::size_t size() const noexcept { return n_; }

private:
    C& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const C& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::vector<C> a_;
    std::size_t n_;
    std::vector<std::size_t> row_;
    std::vector<std::size_t> col_;
};

template <ComplexScalar C>
double one_norm(const std::vector<C>& a, std::size_t n)
{
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += magnitude(a[i * n + j]);
        best = std::max(best, s);
    }
    return best;
}

/// Hager's estimate of ||A^-1||_1 (complex version, a few sweeps).
template <ComplexScalar C>
double inverse_one_norm_estimate(const PivotedLU<C>& lu)
{
    const std::size_t n = lu.size();
    std::vector<C> x(n, C(1.0 / static_cast<double>(n)));
    double est = 0.0;
    std::size_t last = n;
    for (int iter = 0; iter < 5; ++iter) {
        const std::vector<C> y = lu.solve(x);
        double ny = 0.0;
        for (const C& v : y) ny += magnitude(v);
        if (!std::isfinite(ny)) return std::numeric_limits<double>::infinity();
        if (iter > 0 && ny <= est) break;
        est = ny;
        std::vector<C> xi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double my = magnitude(y[i]);
            xi[i] = my > 0.0 ? y[i] / C(my) : C(1.0);
        }
        const std::vector<C> w = lu.solve_adjoint(xi);
        std::size_t jmax = 0;
        double wmax = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double mw = magnitude(w[j]);
            if (mw > wmax) {
                wmax = mw;
                jmax = j;
            }
        }
        if (jmax == last) break;
        last = jmax;
        std::fill(x.begin(), x.end(), C(0.0));
        x[jmax] = C(1.0);
    }
    // Alternating-sign probe guards against a poor start.
    std::vector<C> alt(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sgn = i % 2 == 0 ? 1.0 : -1.0;
        alt[i] = C(sgn * (1.0 + static_cast<double>(i) / static_cast<double>(n > 1 ? n - 1 : 1)));
    }
    const std::vector<C> y = lu.solve(alt);
    double ny = 0.0;
    for (const C& v : y) ny += magnitude(v);
    const double alt_est = 2.0 * ny / (3.0 * static_cast<double>(n));
    return std::max(est, alt_est);
}

} // namespace detail

/// partial_sums holds s_n .. s_{n+m}.
template <ComplexScalar C>
EMethodResult<C> e_method_estimate(const std::vector<C>& partial_sums, const C& z, const C& lambda, long n,
                                   const PrecisionProfile& profile = profile_of<C>())
{
    if (partial_sums.size() < 2) throw domain_error("e_method_estimate: needs m >= 1");
    if (n < 1) throw domain_error("e_method_estimate: needs n >= 1");
    if (z == C(0.0)) throw domain_error("e_method_estimate: z = 0");
    const std::size_t m = partial_sums.size() - 1;
    const std::size_t dim = m + 1;
    const double log_fnorm = std::log(profile.f_norm);
    const C log_z = log_of(z);

    std::vector<C> a(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        const long j = n + static_cast<long>(r);
        const C jj(static_cast<double>(j));
        const C log_j = log_of(jj);
        a[r * dim] = C(1.0);
        for (std::size_t k = 1; k <= m; ++k) {
            const C expo = lambda - C(static_cast<double>(k - 1));
            if (log_abs_pow(z, j, expo) < log_fnorm) throw underflow_error("E-method basis underflows");
            a[r * dim + k] = exp_of(jj * log_z + expo * log_j);
        }
    }
    const double norm_a = detail::one_norm(a, dim);
    const detail::PivotedLU<C> lu(a, dim);
    C s_est;
    if (dim == 2) {
        // explicit 2x2 inverse
        const C det = a[3] - a[1];
        if (det == C(0.0)) throw singular_system_error("E-method system is singular");
        s_est = (partial_sums[0] * a[3] - partial_sums[1] * a[1]) / det;
    } else {
        s_est = lu.solve(partial_sums)[0];
    }
    double cond = norm_a * detail::inverse_one_norm_estimate(lu);
    if (!(cond >= 1.0)) cond = std::isnan(cond) ? std::numeric_limits<double>::infinity() : 1.0;
    return {s_est, cond, m, n};
}

/// Relative error of the E-method estimate for n = 1 .. n_max against a
/// known value; entries where the system cannot be formed or solved carry
/// NaN.
template <ComplexScalar C>
std::vector<std::pair<long, double>> e_method_trace(const HypergeometricParams<C>& params,
                                                    const SeriesPoint<C>& point, std::size_t m, long n_max,
                                                    const C& reference)
{
    if (m < 1) throw domain_error("e_method_trace: needs m >= 1");
    const C lambda = exponent(params, point);
    const C& z = point.z;
    // sums[i] = s_{i}, s_0 = 0
    std::vector<C> sums{C(0.0)};
    C s(0.0), t(1.0);
    for (long k = 0; k < n_max + static_cast<long>(m); ++k) {
        s += t;
        sums.push_back(s);
        t = t * z * ratio_value(params, k);
    }
    std::vector<std::pair<long, double>> out;
    for (long n = 1; n <= n_max; ++n) {
        const std::vector<C> window(sums.begin() + n, sums.begin() + n + static_cast<long>(m) + 1);
        double err = std::numeric_limits<double>::quiet_NaN();
        try {
            const EMethodResult<C> r = e_method_estimate(window, z, lambda, n);
            err = relative_error(r.s_estimate, reference);
        } catch (const singular_system_error&) {
        } catch (const underflow_error&) {
        }
        out.emplace_back(n, err);
    }
    return out;
}

/// Same, with the Gauss value at z = 1 as the reference.
template <ComplexScalar C>
std::vector<std::pair<long, double>> e_method_trace(const HypergeometricParams<C>& params,
                                                    const SeriesPoint<C>& point, std::size_t m, long n_max)
{
    if (point.kind != PointKind::BranchPoint) throw domain_error("e_method_trace: no reference available");
    return e_method_trace(params, point, m, n_max, gauss_2f1_at_one(params));
}

} // namespace hypaccel
