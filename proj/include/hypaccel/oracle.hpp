#pragma once

// Reference values and randomized cases for checking the engine.
//
// Everything here is independent of the acceleration machinery: the Gauss
// product of gamma functions at z = 1, plain compensated summation inside
// the disk, and the binomial closed form of 1F0.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "hypaccel/engine.hpp"
#include "hypaccel/errors.hpp"
#include "hypaccel/scalar.hpp"
#include "hypaccel/termratio.hpp"

namespace hypaccel {

namespace detail {

// B_{2k} / (2k (2k - 1)) as exact numerator / denominator pairs.
inline constexpr std::array<std::array<double, 2>, 16> stirling_coeffs{{
    {1.0, 12.0},
    {-1.0, 360.0},
    {1.0, 1260.0},
    {-1.0, 1680.0},
    {1.0, 1188.0},
    {-691.0, 360360.0},
    {1.0, 156.0},
    {-3617.0, 122400.0},
    {43867.0, 244188.0},
    {-174611.0, 125400.0},
    {77683.0, 5796.0},
    {-236364091.0, 1506960.0},
    {657931.0, 300.0},
    {-3392780147.0, 93960.0},
    {1723168255201.0, 2492028.0},
    {-7709321041217.0, 505920.0},
}};

template <ComplexScalar C>
C pi_of()
{
    if constexpr (std::is_same_v<C, MachineComplex>) return C(3.141592653589793);
    else return C(dd_const::pi);
}

/// Folds the imaginary part into (-pi, pi].
template <ComplexScalar C>
C wrap_imag(const C& w)
{
    using Real = typename scalar_traits<C>::real_type;
    const Real two_pi = Real(2.0) * pi_of<C>().real();
    Real im = w.imag();
    const double k = std::round(im_d(w) / (2.0 * 3.141592653589793));
    if (k != 0.0) im = im - Real(k) * two_pi;
    if (im > pi_of<C>().real()) im = im - two_pi;
    else if (im <= -pi_of<C>().real()) im = im + two_pi;
    return C(w.real(), im);
}

/// ln sin(pi w) without overflow for large |Im w|.
template <ComplexScalar C>
C log_sin_pi(const C& w)
{
    const C i(0.0, 1.0);
    const C pi = pi_of<C>();
    if (im_d(w) < 0.0) return conj_of(log_sin_pi(conj_of(w)));
    // sin(pi w) = e^{-i pi w} (e^{2 i pi w} - 1) / (2i); |e^{2 i pi w}| <= 1 here
    const C e2 = exp_of(C(2.0) * i * pi * w);
    return -(i * pi * w) + log_of((e2 - C(1.0)) / (C(2.0) * i));
}

/// Stirling series for Re w >= 0.5, after shifting upward.
template <ComplexScalar C>
C log_gamma_right(C w)
{
    const double shift_to = 25.0;
    C prod(1.0);
    bool shifted = false;
    while (re_d(w) < shift_to) {
        prod *= w;
        w += C(1.0);
        shifted = true;
    }
    const C half_log_2pi = log_of(C(2.0) * pi_of<C>()) / C(2.0);
    C out = (w - C(0.5)) * log_of(w) - w + half_log_2pi;
    const C inv = C(1.0) / w;
    const C inv2 = inv * inv;
    C pw = inv;
    for (const auto& nd : stirling_coeffs) {
        out += C(nd[0]) / C(nd[1]) * pw;
        pw *= inv2;
    }
    if (shifted) out -= log_of(prod);
    return out;
}

} // namespace detail

/// ln Gamma(w), imaginary part folded into (-pi, pi].
template <ComplexScalar C>
C complex_log_gamma(const C& w)
{
    if (is_nonpositive_integer(w)) throw pole_error("log gamma: pole at a non-positive integer");
    // |Re ln Gamma| reaches ~900 for |w| <= 200, so plain binary64 loses
    // about two bits of exp(result); work in extended and round once.
    if constexpr (std::is_same_v<C, MachineComplex>) return to_machine(complex_log_gamma(ExtendedComplex(w)));
    if (re_d(w) >= 0.5) return detail::wrap_imag(detail::log_gamma_right(w));
    // reflection: Gamma(w) Gamma(1 - w) = pi / sin(pi w)
    const C pi = detail::pi_of<C>();
    const C out = log_of(pi) - detail::log_sin_pi(w) - detail::log_gamma_right(C(1.0) - w);
    return detail::wrap_imag(out);
}

/// 2F1(a1, a2; b; 1) by Gauss' product of gamma functions.
template <ComplexScalar C>
C gauss_2f1_at_one(const HypergeometricParams<C>& params)
{
    if (params.q() != 1) throw domain_error("gauss_2f1_at_one: needs exactly two upper and one lower parameter");
    const C a1 = params.upper()[0];
    const C a2 = params.upper()[1];
    const C b = params.lower()[0];
    if (!(re_d(b - a1 - a2) > 0.0)) throw domain_error("gauss_2f1_at_one: needs Re(b - a1 - a2) > 0");
    if (a1 == C(0.0) || a2 == C(0.0)) return C(1.0);
    const C lg = complex_log_gamma(b) + complex_log_gamma(b - a1 - a2) - complex_log_gamma(b - a1) -
                 complex_log_gamma(b - a2);
    return exp_of(lg);
}

template <ComplexScalar C>
struct DirectSumResult {
    C value;
    double max_partial_sum_mag;
    long terms;
};

/// Compensated summation of the defining series, with the largest partial
/// sum seen (a bound on the cancellation it went through).
template <ComplexScalar C>
DirectSumResult<C> direct_sum_detailed(const HypergeometricParams<C>& params, const C& z, double rel_tol,
                                       long max_terms)
{
    if (!(magnitude(z) <= 0.9)) throw domain_error("direct_sum: needs |z| <= 0.9");
    C sum(0.0), comp(0.0), t(1.0);
    double max_mag = 0.0;
    int quiet = 0;
    for (long k = 0; k < max_terms; ++k) {
        detail::compensated_add(sum, comp, t);
        const C s = sum + comp;
        const double s_mag = magnitude(s);
        max_mag = std::max(max_mag, s_mag);
        if (magnitude(t) <= rel_tol * s_mag) {
            if (++quiet == 3) return {s, max_mag, k + 1};
        } else {
            quiet = 0;
        }
        t = t * z * ratio_value(params, k);
    }
    throw no_convergence_error("direct_sum: no convergence within max_terms");
}

template <ComplexScalar C>
C direct_sum(const HypergeometricParams<C>& params, const C& z, double rel_tol, long max_terms)
{
    return direct_sum_detailed(params, z, rel_tol, max_terms).value;
}

/// 1F0(a;;z) = (1 - z)^-a.
template <ComplexScalar C>
C closed_form_1f0(const C& a, const C& z)
{
    if (z == C(1.0)) throw domain_error("closed_form_1f0: z = 1");
    return cpow(C(1.0) - z, -a);
}

// ---------------------------------------------------------------------------
// Random cases and campaigns

struct CampaignSpec {
    double R = 5.0;
    int q = 1;
    long count = 1000;
    bool at_branch = true;
    std::size_t m = 45;
    double epsilon = 2e-14;
    long N = 2000;
    std::uint64_t seed = 1;
    double tau = 0.1;
    TruncationVariant trunc_variant = TruncationVariant::Modified;
    bool extended = false; // evaluate with ExtendedComplex

    void validate() const
    {
        if (!(R > 0.0)) throw domain_error("campaign: R must be > 0");
        if (q < 0) throw domain_error("campaign: q must be >= 0");
        if (count < 0) throw domain_error("campaign: count must be >= 0");
        if (at_branch && q < 1) throw domain_error("campaign: branch mode needs q >= 1");
    }

    EngineConfig engine_config() const { return {m, N, epsilon, tau, trunc_variant}; }
};

struct HypergeometricInput {
    HypergeometricParams<MachineComplex> params;
    MachineComplex z;
};

/// Generator for sample `index`, independent of evaluation order.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

namespace detail {

inline bool near_pole(const MachineComplex& b)
{
    const double k = std::round(b.real());
    return k <= 0.0 && std::abs(b - MachineComplex(k, 0.0)) < 1e-9;
}

} // namespace detail

inline HypergeometricInput random_case(const CampaignSpec& spec, std::mt19937_64& rng)
{
    spec.validate();
    const double R = spec.R;
    std::uniform_real_distribution<double> part(-R, R);
    const auto draw = [&] { return MachineComplex(part(rng), part(rng)); };
    const auto draw_lower = [&] {
        MachineComplex b;
        do b = draw();
        while (detail::near_pole(b));
        return b;
    };

    std::vector<MachineComplex> upper, lower;
    for (int j = 0; j <= spec.q; ++j) upper.push_back(draw());

    if (!spec.at_branch) {
        for (int j = 0; j < spec.q; ++j) lower.push_back(draw_lower());
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double r = std::sqrt(unit(rng));
        const double th = 2.0 * 3.141592653589793 * unit(rng);
        return {HypergeometricParams<MachineComplex>(std::move(upper), std::move(lower)), std::polar(r, th)};
    }

    for (int j = 0; j + 1 < spec.q; ++j) lower.push_back(draw_lower());
    double S = 0.0;
    for (const auto& a : upper) S += a.real();
    for (const auto& b : lower) S -= b.real();
    const double hi = S < 0.0 ? R : std::max(R, S + 0.1 * R);
    std::uniform_real_distribution<double> last_re(S, hi);
    MachineComplex last;
    do last = MachineComplex(last_re(rng), part(rng));
    while (detail::near_pole(last) || !(S - last.real() < 0.0));
    lower.push_back(last);
    return {HypergeometricParams<MachineComplex>(std::move(upper), std::move(lower)), MachineComplex(1.0)};
}

inline HypergeometricInput random_case(const CampaignSpec& spec, std::uint64_t index)
{
    auto rng = sample_rng(spec.seed, index);
    return random_case(spec, rng);
}

enum class OutcomeCategory { Convergence, FalsePositive, NoConvergence, FalseNegative };

inline const char* to_string(OutcomeCategory c) noexcept
{
    switch (c) {
    case OutcomeCategory::Convergence: return "Convergence";
    case OutcomeCategory::FalsePositive: return "FalsePositive";
    case OutcomeCategory::NoConvergence: return "NoConvergence";
    case OutcomeCategory::FalseNegative: return "FalseNegative";
    }
    return "?";
}

/// Smallest reference magnitude classify accepts.
inline double reference_floor() { return 1e3 * std::numeric_limits<double>::min(); }

template <ComplexScalar C>
double relative_error(const C& value, const C& reference)
{
    return magnitude(value - reference) / magnitude(reference);
}

inline OutcomeCategory classify(EvalStatus status, double true_rel_err, double epsilon)
{
    if (status == EvalStatus::Converged)
        return true_rel_err <= 10.0 * epsilon ? OutcomeCategory::Convergence : OutcomeCategory::FalsePositive;
    return true_rel_err > epsilon ? OutcomeCategory::NoConvergence : OutcomeCategory::FalseNegative;
}

template <ComplexScalar C>
OutcomeCategory classify(const EvalOutcome<C>& claimed, const C& reference, double epsilon)
{
    if (!(magnitude(reference) > reference_floor())) throw domain_error("classify: reference too close to zero");
    double err = relative_error(claimed.value, reference);
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    return classify(claimed.status, err, epsilon);
}

/// Fixed-edge histogram; bin i counts values in [edges[i], edges[i+1]),
/// the last bin is open above.
struct Histogram {
    std::vector<double> edges;
    std::vector<long> counts;

    explicit Histogram(std::vector<double> e = {}) : edges(std::move(e)), counts(edges.size(), 0) {}

    void add(double v)
    {
        if (edges.empty() || std::isnan(v) || v < edges.front()) return;
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    long total() const
    {
        long t = 0;
        for (long c : counts) t += c;
        return t;
    }
};

enum class ReferenceKind { Gauss, ClosedForm, DirectSum, SelfConsistency, None };

struct SampleRecord {
    std::uint64_t index = 0;
    EvalStatus status = EvalStatus::MaxIterations;
    bool evaluated = false;
    bool referenced = false;
    bool excluded = false; // reference too close to zero
    OutcomeCategory category = OutcomeCategory::NoConvergence;
    double true_rel_err = std::numeric_limits<double>::quiet_NaN();
    double rel_err_est = std::numeric_limits<double>::quiet_NaN();
    long n_used = 0;
    double seconds = 0.0;
};

struct OutcomeTally {
    std::array<long, 4> counts{};
    long samples = 0;
    long unreferenced = 0;
    long excluded = 0;
    long failed = 0; // evaluation threw (domain errors on the unit circle)
    long n_max_hits = 0;
    Histogram error_ratio;  // log10(true / estimated), converged samples
    Histogram terms_needed; // n_used, converged samples
    std::vector<SampleRecord> records;

    long count(OutcomeCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    long classified() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    double percent(OutcomeCategory c) const
    {
        const long n = classified();
        return n == 0 ? 0.0 : 100.0 * static_cast<double>(count(c)) / static_cast<double>(n);
    }
    double n_max_fraction() const
    {
        return samples == 0 ? 0.0 : static_cast<double>(n_max_hits) / static_cast<double>(samples);
    }
};

inline std::vector<double> error_ratio_edges()
{
    std::vector<double> e;
    for (int i = -16; i <= 16; ++i) e.push_back(0.25 * i);
    return e;
}

inline std::vector<double> terms_needed_edges()
{
    return {0, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
}

namespace detail {

struct Reference {
    ReferenceKind kind = ReferenceKind::None;
    MachineComplex value;
};

/// Reference value in extended precision, or kind None when no trustworthy
/// one is available.
inline Reference campaign_reference(const CampaignSpec& spec, const HypergeometricInput& in)
{
    using E = ExtendedComplex;
    const auto pe = in.params.as<E>();
    const E z(in.z);
    const double eps_e = profile_of<E>().eps_p;
    try {
        if (spec.at_branch && pe.q() == 1) return {ReferenceKind::Gauss, to_machine(gauss_2f1_at_one(pe))};
        if (spec.at_branch) {
            EngineConfig cfg{spec.m, 20000, 1e-24, 0.1, TruncationVariant::Modified};
            const auto lo = evaluate(pe, make_point(z), cfg);
            cfg.m = spec.m + 10;
            const auto hi = evaluate(pe, make_point(z), cfg);
            if (lo.status != EvalStatus::Converged || hi.status != EvalStatus::Converged) return {};
            if (relative_error(lo.value, hi.value) > 1e-3 * spec.epsilon) return {};
            return {ReferenceKind::SelfConsistency, to_machine(hi.value)};
        }
        if (pe.q() == 0) return {ReferenceKind::ClosedForm, to_machine(closed_form_1f0(pe.upper()[0], z))};
        if (magnitude(z) > 0.9) return {};
        const auto ds = direct_sum_detailed(pe, z, 1e-30, 200000);
        const double bound = static_cast<double>(ds.terms) * eps_e * ds.max_partial_sum_mag;
        if (bound > 1e-3 * spec.epsilon * magnitude(ds.value)) return {};
        return {ReferenceKind::DirectSum, to_machine(ds.value)};
    } catch (const std::exception&) {
        return {};
    }
}

inline SampleRecord run_sample(const CampaignSpec& spec, std::uint64_t index)
{
    SampleRecord rec;
    rec.index = index;
    const HypergeometricInput in = random_case(spec, index);
    std::optional<EvalOutcome<MachineComplex>> out;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        if (spec.extended) {
            using E = ExtendedComplex;
            const auto r = evaluate(in.params.as<E>(), make_point(E(in.z)), spec.engine_config());
            out = EvalOutcome<MachineComplex>{r.status, to_machine(r.value), r.rel_err_est, r.n_used, r.diagnostics};
        } else {
            out = evaluate(in.params, make_point(in.z), spec.engine_config());
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } catch (const std::exception&) {
        return rec;
    }
    rec.evaluated = true;
    rec.status = out->status;
    rec.rel_err_est = out->rel_err_est;
    rec.n_used = out->n_used;

    const Reference ref = campaign_reference(spec, in);
    if (ref.kind == ReferenceKind::None) return rec;
    rec.referenced = true;
    if (!(std::abs(ref.value) > reference_floor())) {
        rec.excluded = true;
        return rec;
    }
    rec.category = classify(*out, ref.value, spec.epsilon);
    rec.true_rel_err = relative_error(out->value, ref.value);
    return rec;
}

} // namespace detail

/// Worker count: HYPACCEL_THREADS if set, else the hardware concurrency.
inline unsigned default_thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HYPACCEL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
    }
    return n;
}

/// Runs spec.count independent samples; threads = 0 picks the default.
inline OutcomeTally run_campaign(const CampaignSpec& spec, unsigned threads = 0)
{
    spec.validate();
    OutcomeTally tally;
    tally.error_ratio = Histogram(error_ratio_edges());
    tally.terms_needed = Histogram(terms_needed_edges());
    const std::size_t count = static_cast<std::size_t>(spec.count);
    tally.records.resize(count);
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++)
            tally.records[i] = detail::run_sample(spec, static_cast<std::uint64_t>(i));
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (const SampleRecord& r : tally.records) {
        ++tally.samples;
        if (!r.evaluated) {
            ++tally.failed;
            continue;
        }
        if (r.status == EvalStatus::MaxIterations) ++tally.n_max_hits;
        if (!r.referenced) {
            ++tally.unreferenced;
            continue;
        }
        if (r.excluded) {
            ++tally.excluded;
            continue;
        }
        ++tally.counts[static_cast<std::size_t>(r.category)];
        if (r.status == EvalStatus::Converged) {
            tally.terms_needed.add(static_cast<double>(r.n_used));
            if (r.rel_err_est > 0.0 && r.true_rel_err > 0.0)
                tally.error_ratio.add(std::log10(r.true_rel_err / r.rel_err_est));
        }
    }
    return tally;
}

} // namespace hypaccel
