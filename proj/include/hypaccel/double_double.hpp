#pragma once

// Double-double real arithmetic.
//
// A value is the unevaluated sum hi + lo of two binary64 numbers with
// |lo| <= ulp(hi)/2, giving roughly 106 significand bits.  Every operation
// renormalizes its result.  The basic kernels follow the error-free
// transformation algorithms of Dekker, Knuth and Joldes-Muller-Popescu.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace hypaccel {

namespace eft {

/// s + e == a + b exactly.
inline void two_sum(double a, double b, double& s, double& e) noexcept
{
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

/// Requires |a| >= |b| (or a == 0).
inline void fast_two_sum(double a, double b, double& s, double& e) noexcept
{
    s = a + b;
    e = b - (s - a);
}

/// p + e == a * b exactly (barring underflow).
inline void two_prod(double a, double b, double& p, double& e) noexcept
{
    p = a * b;
    e = std::fma(a, b, -p);
}

} // namespace eft

class dd_real {
public:
    constexpr dd_real() noexcept = default;
    constexpr dd_real(double x) noexcept : hi_(x), lo_(0.0) {}
    constexpr dd_real(int x) noexcept : hi_(x), lo_(0.0) {}

    /// Caller guarantees |lo| <= ulp(hi)/2.
    constexpr dd_real(double hi, double lo) noexcept : hi_(hi), lo_(lo) {}

    static dd_real from_sum(double a, double b) noexcept
    {
        double s, e;
        eft::two_sum(a, b, s, e);
        return {s, e};
    }

    static dd_real from_product(double a, double b) noexcept
    {
        double p, e;
        eft::two_prod(a, b, p, e);
        return {p, e};
    }

    static dd_real from_int64(std::int64_t v) noexcept
    {
        const double hi = static_cast<double>(v);
        const double lo = static_cast<double>(v - static_cast<std::int64_t>(hi));
        return from_sum(hi, lo);
    }

    constexpr double hi() const noexcept { return hi_; }
    constexpr double lo() const noexcept { return lo_; }
    explicit constexpr operator double() const noexcept { return hi_ + lo_; }

    friend dd_real operator-(dd_real a) noexcept { return {-a.hi_, -a.lo_}; }

    friend dd_real operator+(dd_real a, dd_real b) noexcept
    {
        // Accurate double-word + double-word (Joldes et al., Alg. 6).
        double sh, sl, th, tl;
        eft::two_sum(a.hi_, b.hi_, sh, sl);
        eft::two_sum(a.lo_, b.lo_, th, tl);
        sl += th;
        eft::fast_two_sum(sh, sl, sh, sl);
        sl += tl;
        eft::fast_two_sum(sh, sl, sh, sl);
        return {sh, sl};
    }

    friend dd_real operator+(dd_real a, double b) noexcept
    {
        double sh, sl;
        eft::two_sum(a.hi_, b, sh, sl);
        sl += a.lo_;
        eft::fast_two_sum(sh, sl, sh, sl);
        return {sh, sl};
    }
    friend dd_real operator+(double a, dd_real b) noexcept { return b + a; }

    friend dd_real operator-(dd_real a, dd_real b) noexcept { return a + (-b); }
    friend dd_real operator-(dd_real a, double b) noexcept { return a + (-b); }
    friend dd_real operator-(double a, dd_real b) noexcept { return (-b) + a; }

    friend dd_real operator*(dd_real a, dd_real b) noexcept
    {
        double ph, pl;
        eft::two_prod(a.hi_, b.hi_, ph, pl);
        pl += a.hi_ * b.lo_ + a.lo_ * b.hi_;
        eft::fast_two_sum(ph, pl, ph, pl);
        return {ph, pl};
    }

    friend dd_real operator*(dd_real a, double b) noexcept
    {
        double ph, pl;
        eft::two_prod(a.hi_, b, ph, pl);
        pl += a.lo_ * b;
        eft::fast_two_sum(ph, pl, ph, pl);
        return {ph, pl};
    }
    friend dd_real operator*(double a, dd_real b) noexcept { return b * a; }

    friend dd_real operator/(dd_real a, dd_real b) noexcept
    {
        // Long division: two quotient digits plus a correction.
        const double q1 = a.hi_ / b.hi_;
        if (!std::isfinite(q1) || q1 == 0.0) return {q1, 0.0};
        dd_real r = a - b * q1;
        const double q2 = r.hi_ / b.hi_;
        r = r - b * q2;
        const double q3 = r.hi_ / b.hi_;
        double qh, ql;
        eft::fast_two_sum(q1, q2, qh, ql);
        return dd_real(qh, ql) + q3;
    }

    friend dd_real operator/(dd_real a, double b) noexcept { return a / dd_real(b); }
    friend dd_real operator/(double a, dd_real b) noexcept { return dd_real(a) / b; }

    dd_real& operator+=(dd_real b) noexcept { return *this = *this + b; }
    dd_real& operator-=(dd_real b) noexcept { return *this = *this - b; }
    dd_real& operator*=(dd_real b) noexcept { return *this = *this * b; }
    dd_real& operator/=(dd_real b) noexcept { return *this = *this / b; }

    friend bool operator==(dd_real a, dd_real b) noexcept
    {
        return a.hi_ == b.hi_ && a.lo_ == b.lo_;
    }
    friend bool operator<(dd_real a, dd_real b) noexcept
    {
        return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_);
    }
    friend bool operator>(dd_real a, dd_real b) noexcept { return b < a; }
    friend bool operator<=(dd_real a, dd_real b) noexcept { return !(b < a); }
    friend bool operator>=(dd_real a, dd_real b) noexcept { return !(a < b); }

private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

namespace dd_const {
inline constexpr dd_real pi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline constexpr dd_real half_pi{1.570796326794896558e+00, 6.123233995736766036e-17};
inline constexpr dd_real two_pi{6.283185307179586232e+00, 2.449293598294706414e-16};
inline constexpr dd_real ln2{6.931471805599452862e-01, 2.319046813846299558e-17};
inline constexpr double eps = 0x1p-104;
} // namespace dd_const

inline dd_real abs(dd_real a) noexcept { return a.hi() < 0.0 ? -a : a; }

inline dd_real ldexp(dd_real a, int e) noexcept
{
    return {std::ldexp(a.hi(), e), std::ldexp(a.lo(), e)};
}

inline bool isfinite(dd_real a) noexcept { return std::isfinite(a.hi()); }

inline dd_real sqr(dd_real a) noexcept { return a * a; }

inline dd_real sqrt(dd_real a) noexcept
{
    if (a.hi() <= 0.0) return dd_real(std::sqrt(a.hi()));
    // One Newton step from the binary64 root doubles the correct bits.
    const double y = std::sqrt(a.hi());
    const dd_real yy = dd_real::from_product(y, y);
    const double corr = (a - yy).hi() / (2.0 * y);
    return dd_real::from_sum(y, corr);
}

inline dd_real exp(dd_real a) noexcept
{
    if (a.hi() > 709.79) return dd_real(std::numeric_limits<double>::infinity());
    if (a.hi() < -745.2) return dd_real(0.0);
    if (a.hi() == 0.0) return dd_real(1.0);

    // a = k ln2 + r, then r is shrunk by 2^-10 so a short Taylor series of
    // expm1 suffices; the scaling is undone by repeated doubling of expm1.
    const double k = std::nearbyint(a.hi() / dd_const::ln2.hi());
    dd_real r = ldexp(a - dd_const::ln2 * k, -10);

    dd_real term = r;
    dd_real sum = r;
    for (int i = 2; i <= 14; ++i) {
        term = term * r / static_cast<double>(i);
        sum += term;
        if (std::fabs(term.hi()) < 1e-36 * std::fabs(sum.hi())) break;
    }
    for (int i = 0; i < 10; ++i) sum = sum * (sum + 2.0);
    return ldexp(sum + 1.0, static_cast<int>(k));
}

inline dd_real log(dd_real a) noexcept
{
    if (a.hi() < 0.0) return dd_real(std::numeric_limits<double>::quiet_NaN());
    if (a.hi() == 0.0) return dd_real(-std::numeric_limits<double>::infinity());
    if (!std::isfinite(a.hi())) return a;
    int e = 0;
    std::frexp(a.hi(), &e);
    const dd_real m = ldexp(a, -e); // in [0.5, 1)
    // Newton on exp(y) = m.
    dd_real y(std::log(m.hi()));
    y = y + m * exp(-y) - 1.0;
    return y + dd_const::ln2 * static_cast<double>(e);
}

namespace detail {

// Taylor series on |x| <= pi/4.
inline dd_real sin_taylor(dd_real x) noexcept
{
    const dd_real x2 = -sqr(x);
    dd_real term = x;
    dd_real sum = x;
    for (int i = 3; i < 60; i += 2) {
        term = term * x2 / static_cast<double>((i - 1) * i);
        sum += term;
        if (std::fabs(term.hi()) < 1e-36 * std::fabs(sum.hi()) + 1e-300) break;
    }
    return sum;
}

inline dd_real cos_taylor(dd_real x) noexcept
{
    const dd_real x2 = -sqr(x);
    dd_real term(1.0);
    dd_real sum(1.0);
    for (int i = 2; i < 60; i += 2) {
        term = term * x2 / static_cast<double>((i - 1) * i);
        sum += term;
        if (std::fabs(term.hi()) < 1e-36) break;
    }
    return sum;
}

} // namespace detail

inline void sincos(dd_real a, dd_real& s, dd_real& c) noexcept
{
    if (!std::isfinite(a.hi())) {
        s = c = dd_real(std::numeric_limits<double>::quiet_NaN());
        return;
    }
    const double k = std::nearbyint(a.hi() / dd_const::half_pi.hi());
    const dd_real r = a - dd_const::half_pi * k;
    long quadrant = static_cast<long>(std::fmod(k, 4.0));
    if (quadrant < 0) quadrant += 4;
    const dd_real sr = detail::sin_taylor(r);
    const dd_real cr = detail::cos_taylor(r);
    switch (quadrant) {
    case 0: s = sr; c = cr; break;
    case 1: s = cr; c = -sr; break;
    case 2: s = -sr; c = -cr; break;
    default: s = -cr; c = sr; break;
    }
}

inline dd_real sin(dd_real a) noexcept
{
    dd_real s, c;
    sincos(a, s, c);
    return s;
}

inline dd_real cos(dd_real a) noexcept
{
    dd_real s, c;
    sincos(a, s, c);
    return c;
}

/// Principal angle of (x, y) in (-pi, pi].
inline dd_real atan2(dd_real y, dd_real x) noexcept
{
    if (x.hi() == 0.0 && y.hi() == 0.0) return dd_real(std::atan2(y.hi(), x.hi()));
    if (y.hi() == 0.0) return x.hi() > 0.0 ? dd_real(0.0) : dd_const::pi;
    if (x.hi() == 0.0) return y.hi() > 0.0 ? dd_const::half_pi : -dd_const::half_pi;

    const dd_real r = sqrt(sqr(x) + sqr(y));
    const dd_real xx = x / r;
    const dd_real yy = y / r;
    dd_real z(std::atan2(y.hi(), x.hi()));
    dd_real s, c;
    sincos(z, s, c);
    if (std::fabs(xx.hi()) > std::fabs(yy.hi())) z += (yy - s) / c;
    else z -= (xx - c) / s;
    return z;
}

inline dd_real hypot(dd_real x, dd_real y) noexcept
{
    const double ax = std::fabs(x.hi());
    const double ay = std::fabs(y.hi());
    const double big = ax > ay ? ax : ay;
    if (big == 0.0 || !std::isfinite(big)) return dd_real(big);
    int e = 0;
    std::frexp(big, &e);
    const dd_real xs = ldexp(x, -e);
    const dd_real ys = ldexp(y, -e);
    return ldexp(sqrt(sqr(xs) + sqr(ys)), e);
}

/// Parses a decimal real (optional sign, digits, optional fraction and
/// exponent) with double-double accuracy.  Returns false on malformed text.
inline bool parse_dd(std::string_view text, dd_real& out)
{
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    dd_real mant(0.0);
    int digits = 0;
    int frac_digits = 0;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            mant = mant * 10.0 + static_cast<double>(ch - '0');
            ++digits;
            if (seen_point) ++frac_digits;
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (digits == 0) return false;
    int exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
        int ed = 0;
        for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++ed)
            exponent = exponent * 10 + (text[i] - '0');
        if (ed == 0) return false;
        if (eneg) exponent = -exponent;
    }
    if (i != text.size()) return false;
    exponent -= frac_digits;
    dd_real scale(1.0);
    const int n = exponent < 0 ? -exponent : exponent;
    for (int k = 0; k < n; ++k) scale = scale * 10.0;
    out = exponent < 0 ? mant / scale : mant * scale;
    if (neg) out = -out;
    return true;
}

/// Scientific-notation rendering with the requested number of significant
/// digits (at most 32 are meaningful).
inline std::string to_string(dd_real a, int digits = 32)
{
    if (!std::isfinite(a.hi())) return std::isnan(a.hi()) ? "nan" : (a.hi() > 0 ? "inf" : "-inf");
    if (a.hi() == 0.0) return "0";
    std::string out;
    if (a.hi() < 0.0) {
        out += '-';
        a = -a;
    }
    int e10 = static_cast<int>(std::floor(std::log10(a.hi())));
    dd_real scale(1.0);
    for (int k = 0; k < (e10 < 0 ? -e10 : e10); ++k) scale = scale * 10.0;
    dd_real x = e10 < 0 ? a * scale : a / scale;
    if (x.hi() >= 10.0) {
        x = x / 10.0;
        ++e10;
    } else if (x.hi() < 1.0) {
        x = x * 10.0;
        --e10;
    }
    std::string mant;
    for (int k = 0; k < digits + 1; ++k) {
        int d = static_cast<int>(std::floor(x.hi()));
        if (d < 0) d = 0;
        if (d > 9) d = 9;
        mant += static_cast<char>('0' + d);
        x = (x - static_cast<double>(d)) * 10.0;
    }
    // Round on the guard digit.
    if (mant.back() >= '5') {
        int k = digits - 1;
        while (k >= 0 && mant[k] == '9') mant[k--] = '0';
        if (k >= 0) ++mant[k];
        else {
            mant.insert(mant.begin(), '1');
            ++e10;
        }
    }
    mant.resize(digits);
    out += mant[0];
    out += '.';
    out += mant.substr(1);
    out += 'e';
    out += std::to_string(e10);
    return out;
}

} // namespace hypaccel
