#pragma once

// Complex scalars over which every numeric kernel is generic.
//
// Two instantiations are provided: MachineComplex (std::complex<double>)
// and ExtendedComplex (double-double real and imaginary parts).  Kernels
// only use the free functions declared here plus the field operators, so
// adding a third instantiation means providing the same overload set and a
// scalar_traits specialization.

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <string>
#include <string_view>

#include "hypaccel/double_double.hpp"
#include "hypaccel/errors.hpp"

namespace hypaccel {

using MachineComplex = std::complex<double>;

/// Unit roundoff and smallest normalized magnitude of an instantiation.
struct PrecisionProfile {
    double eps_p;
    double f_norm;
};

class ExtendedComplex {
public:
    using real_type = dd_real;

    constexpr ExtendedComplex() noexcept = default;
    constexpr ExtendedComplex(double re) noexcept : re_(re), im_(0.0) {}
    constexpr ExtendedComplex(dd_real re) noexcept : re_(re), im_(0.0) {}
    constexpr ExtendedComplex(dd_real re, dd_real im) noexcept : re_(re), im_(im) {}
    ExtendedComplex(const MachineComplex& c) noexcept : re_(c.real()), im_(c.imag()) {}

    constexpr dd_real real() const noexcept { return re_; }
    constexpr dd_real imag() const noexcept { return im_; }

    friend ExtendedComplex operator-(const ExtendedComplex& a) noexcept { return {-a.re_, -a.im_}; }

    friend ExtendedComplex operator+(const ExtendedComplex& a, const ExtendedComplex& b) noexcept
    {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend ExtendedComplex operator-(const ExtendedComplex& a, const ExtendedComplex& b) noexcept
    {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend ExtendedComplex operator*(const ExtendedComplex& a, const ExtendedComplex& b) noexcept
    {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend ExtendedComplex operator*(const ExtendedComplex& a, double b) noexcept
    {
        return {a.re_ * b, a.im_ * b};
    }
    friend ExtendedComplex operator*(double a, const ExtendedComplex& b) noexcept { return b * a; }

    friend ExtendedComplex operator/(const ExtendedComplex& a, const ExtendedComplex& b) noexcept
    {
        // Scale the divisor by a power of two so |c|^2 + |d|^2 cannot
        // overflow or underflow.
        const double big = std::fmax(std::fabs(b.re_.hi()), std::fabs(b.im_.hi()));
        int e = 0;
        if (big != 0.0 && std::isfinite(big)) std::frexp(big, &e);
        const dd_real c = ldexp(b.re_, -e);
        const dd_real d = ldexp(b.im_, -e);
        const dd_real den = c * c + d * d;
        const dd_real re = (a.re_ * c + a.im_ * d) / den;
        const dd_real im = (a.im_ * c - a.re_ * d) / den;
        return {ldexp(re, -e), ldexp(im, -e)};
    }
    friend ExtendedComplex operator/(const ExtendedComplex& a, double b) noexcept
    {
        return {a.re_ / b, a.im_ / b};
    }

    ExtendedComplex& operator+=(const ExtendedComplex& b) noexcept { return *this = *this + b; }
    ExtendedComplex& operator-=(const ExtendedComplex& b) noexcept { return *this = *this - b; }
    ExtendedComplex& operator*=(const ExtendedComplex& b) noexcept { return *this = *this * b; }
    ExtendedComplex& operator/=(const ExtendedComplex& b) noexcept { return *this = *this / b; }

    friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b) noexcept
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    dd_real re_;
    dd_real im_;
};

template <class C>
struct scalar_traits;

template <>
struct scalar_traits<MachineComplex> {
    using real_type = double;
    static constexpr const char* name = "double";
    static constexpr PrecisionProfile profile() noexcept
    {
        return {std::numeric_limits<double>::epsilon(), std::numeric_limits<double>::min()};
    }
};

template <>
struct scalar_traits<ExtendedComplex> {
    using real_type = dd_real;
    static constexpr const char* name = "extended";
    static constexpr PrecisionProfile profile() noexcept
    {
        return {dd_const::eps, std::numeric_limits<double>::min()};
    }
};

// ---------------------------------------------------------------------------
// Overload set shared by both instantiations.

inline double re_d(const MachineComplex& c) noexcept { return c.real(); }
inline double im_d(const MachineComplex& c) noexcept { return c.imag(); }
inline double re_d(const ExtendedComplex& c) noexcept { return c.real().hi() + c.real().lo(); }
inline double im_d(const ExtendedComplex& c) noexcept { return c.imag().hi() + c.imag().lo(); }

inline MachineComplex to_machine(const MachineComplex& c) noexcept { return c; }
inline MachineComplex to_machine(const ExtendedComplex& c) noexcept { return {re_d(c), im_d(c)}; }

inline double magnitude(const MachineComplex& c) noexcept { return std::abs(c); }
inline double magnitude(const ExtendedComplex& c) noexcept
{
    return static_cast<double>(hypot(c.real(), c.imag()));
}

inline MachineComplex conj_of(const MachineComplex& c) noexcept { return std::conj(c); }
inline ExtendedComplex conj_of(const ExtendedComplex& c) noexcept { return {c.real(), -c.imag()}; }

/// Principal branch: imaginary part in (-pi, pi].
inline MachineComplex log_of(const MachineComplex& w) noexcept { return std::log(w); }
inline ExtendedComplex log_of(const ExtendedComplex& w) noexcept
{
    return {log(hypot(w.real(), w.imag())), atan2(w.imag(), w.real())};
}

inline MachineComplex exp_of(const MachineComplex& w) noexcept { return std::exp(w); }
inline ExtendedComplex exp_of(const ExtendedComplex& w) noexcept
{
    const dd_real mod = exp(w.real());
    if (w.imag().hi() == 0.0) return {mod, dd_real(0.0)};
    dd_real s, c;
    sincos(w.imag(), s, c);
    return {mod * c, mod * s};
}

inline bool is_finite(const MachineComplex& c) noexcept
{
    return std::isfinite(c.real()) && std::isfinite(c.imag());
}
inline bool is_finite(const ExtendedComplex& c) noexcept
{
    return std::isfinite(c.real().hi()) && std::isfinite(c.imag().hi());
}

template <class C>
concept ComplexScalar = requires(C a, C b, double d) {
    typename scalar_traits<C>::real_type;
    { a + b } -> std::convertible_to<C>;
    { a - b } -> std::convertible_to<C>;
    { a * b } -> std::convertible_to<C>;
    { a / b } -> std::convertible_to<C>;
    { -a } -> std::convertible_to<C>;
    { C(d) } -> std::same_as<C>;
    { magnitude(a) } -> std::same_as<double>;
    { log_of(a) } -> std::same_as<C>;
    { exp_of(a) } -> std::same_as<C>;
    { re_d(a) } -> std::same_as<double>;
};

template <ComplexScalar C>
constexpr PrecisionProfile profile_of() noexcept
{
    return scalar_traits<C>::profile();
}

/// Lossless widening from a machine complex.
template <ComplexScalar C>
C from_machine(const MachineComplex& c)
{
    if constexpr (std::is_same_v<C, MachineComplex>) return c;
    else return C(c);
}

/// True when c is 0, -1, -2, ... exactly.
template <ComplexScalar C>
bool is_nonpositive_integer(const C& c)
{
    if (im_d(c) != 0.0) return false;
    const double r = re_d(c);
    if (r > 0.0 || r != std::floor(r)) return false;
    return C(r) == c;
}

/// w^s = exp(s ln w) on the principal branch.
template <ComplexScalar C>
C cpow(const C& w, const C& s)
{
    if (w == C(0.0)) {
        if (re_d(s) <= 0.0) throw domain_error("cpow: zero base with Re(exponent) <= 0");
        return C(0.0);
    }
    if (w == C(1.0)) return C(1.0);
    return exp_of(s * log_of(w));
}

/// ln|z^n n^lambda| = n ln|z| + Re(lambda) ln n, without forming the
/// product.
template <ComplexScalar C>
double log_abs_pow(const C& z, long n, const C& lambda)
{
    const double nn = static_cast<double>(n);
    return nn * std::log(magnitude(z)) + re_d(lambda) * std::log(nn);
}

// ---------------------------------------------------------------------------
// Complex literal text: a, ai, a+bi, a-bi.

namespace detail {

template <class Real>
bool parse_real_text(std::string_view text, Real& out)
{
    if (text.empty()) return false;
    if constexpr (std::is_same_v<Real, double>) {
        dd_real v;
        if (!parse_dd(text, v)) return false;
        // Re-parse in binary64 for correct rounding.
        std::string buf(text);
        char* end = nullptr;
        out = std::strtod(buf.c_str(), &end);
        return end == buf.c_str() + buf.size();
    } else {
        return parse_dd(text, out);
    }
}

} // namespace detail

/// Parses a complex literal; throws parse_error on malformed text.
template <ComplexScalar C>
C parse_complex(std::string_view text)
{
    using Real = typename scalar_traits<C>::real_type;
    const auto fail = [&]() -> parse_error {
        return parse_error("malformed complex literal '" + std::string(text) + "'");
    };
    if (text.empty()) throw fail();
    for (char ch : text)
        if (ch == ' ' || ch == '\t' || ch == '\n') throw fail();

    Real re{0.0};
    Real im{0.0};
    if (text.back() != 'i') {
        if (!detail::parse_real_text(text, re)) throw fail();
        return C(re, Real(0.0));
    }
    const std::string_view body = text.substr(0, text.size() - 1);
    // Split at the last sign that does not belong to an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string_view re_text = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
    std::string_view im_text = split == std::string_view::npos ? body : body.substr(split);
    if (!re_text.empty() && !detail::parse_real_text(re_text, re)) throw fail();
    if (im_text.empty() || im_text == "+") im = Real(1.0);
    else if (im_text == "-") im = Real(-1.0);
    else if (!detail::parse_real_text(im_text, im)) throw fail();
    return C(re, im);
}

} // namespace hypaccel
