#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "hypaccel/emethod.hpp"

using namespace hypaccel;
using E = ExtendedComplex;
using M = MachineComplex;
using P = HypergeometricParams<M>;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const P kBranchCase({{1, 4}, {1.5, 4.5}}, {{3, 1}});

std::vector<M> sums_from(const P& p, const M& z, long n, std::size_t m)
{
    const auto all = accelerated_trace(p, make_point(z), 0, n + static_cast<long>(m));
    return {all.begin() + (n - 1), all.begin() + (n - 1) + static_cast<long>(m) + 1};
}

double min_finite(const std::vector<std::pair<long, double>>& t, std::size_t* at = nullptr)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::isfinite(t[i].second) && t[i].second < best) {
            best = t[i].second;
            if (at) *at = i;
        }
    return best;
}

} // namespace

TEST(EMethod, OrderOneIsThePairFormula)
{
    std::mt19937_64 rng(503);
    const auto prof = profile_of<M>();
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const M z = testsupport::random_in_disk(rng, 0.95);
        if (std::abs(z) < 0.05) continue;
        const M lambda = testsupport::random_complex(rng, 3.0);
        const long n = 1 + static_cast<long>(rng() % 40);
        const M s0 = testsupport::random_complex(rng, 2.0), s1 = testsupport::random_complex(rng, 2.0);
        const AsymptoticExpansion<M> one{lambda, {M(1.0)}, false, 1};
        const M w0 = omega(one, z, n, prof).value, w1 = omega(one, z, n + 1, prof).value;
        const M want = accelerate_pair(s0, s1, w0, w1);
        const auto got = e_method_estimate({s0, s1}, z, lambda, n);
        EXPECT_EQ(got.m, 1u);
        EXPECT_EQ(got.n_start, n);
        EXPECT_GE(got.condition_estimate, 1.0);
        worst = std::max(worst, std::abs(got.s_estimate - want) / (std::abs(want) * kEps));
    }
    EXPECT_LE(worst, 4.0);
}

TEST(EMethod, RecoversSyntheticLimit)
{
    std::mt19937_64 rng(509);
    for (int t = 0; t < 50; ++t) {
        const std::size_t m = 2 + static_cast<std::size_t>(t % 5);
        const M zm = testsupport::random_in_disk(rng, 0.9);
        const E z(zm), lambda(testsupport::random_complex(rng, 2.0));
        const E s(testsupport::random_complex(rng, 1.0));
        std::vector<E> amp;
        for (std::size_t k = 0; k < m; ++k) amp.emplace_back(testsupport::random_complex(rng, 1.0));
        const long n = 5 + static_cast<long>(rng() % 20);
        std::vector<E> stream;
        for (long j = n; j <= n + static_cast<long>(m); ++j) {
            E v = s;
            const E jj(static_cast<double>(j));
            for (std::size_t k = 0; k < m; ++k)
                v += amp[k] * exp_of(jj * log_of(z) + (lambda - E(static_cast<double>(k))) * log_of(jj));
            stream.push_back(v);
        }
        const auto r = e_method_estimate(stream, z, lambda, n);
        EXPECT_LE(magnitude(r.s_estimate - s), 1e-28 * r.condition_estimate * std::max(1.0, magnitude(s)))
            << "m=" << m << " cond=" << r.condition_estimate;
        EXPECT_LE(magnitude(r.s_estimate - s), 1e-12);
    }
}

TEST(EMethod, ConditionSaturatesAtHighOrder)
{
    const long n = 10;
    const auto r = e_method_estimate(sums_from(kBranchCase, M(1.0), n, 30), M(1.0), kBranchCase.sigma(), n);
    EXPECT_GE(r.condition_estimate, 1e16);
}

TEST(EMethod, ConditionGrowsWithOrder)
{
    const long n = 10;
    double last = 0.0;
    for (std::size_t m : {5u, 10u, 15u, 20u}) {
        const auto r = e_method_estimate(sums_from(kBranchCase, M(1.0), n, m), M(1.0), kBranchCase.sigma(), n);
        EXPECT_GE(r.condition_estimate, last) << m;
        last = r.condition_estimate;
    }
}

TEST(EMethod, TraceLosesToPrimary)
{
    const auto point = make_point(M(1.0));
    const auto etrace = e_method_trace(kBranchCase, point, 15, 200);
    const M ref = gauss_2f1_at_one(kBranchCase);
    const auto ptrace = accelerated_trace(kBranchCase, point, 15, 200);
    double pbest = std::numeric_limits<double>::infinity();
    for (const M& v : ptrace) pbest = std::min(pbest, relative_error(v, ref));
    EXPECT_GE(min_finite(etrace), 10.0 * pbest) << min_finite(etrace) << " vs " << pbest;
}

TEST(EMethod, TraceOrderOneMatchesPrimary)
{
    const auto point = make_point(M(1.0));
    const M ref = gauss_2f1_at_one(kBranchCase);
    const auto etrace = e_method_trace(kBranchCase, point, 1, 200);
    const auto ptrace = accelerated_trace(kBranchCase, point, 1, 200);
    ASSERT_EQ(etrace.size(), ptrace.size());
    for (std::size_t i = 0; i < etrace.size(); ++i) {
        EXPECT_EQ(etrace[i].first, static_cast<long>(i) + 1);
        // equal estimates to 4 ulp means equal errors up to 4 ulp of |estimate| / |ref|
        const double bound = 4.0 * kEps * std::abs(ptrace[i]) / std::abs(ref);
        EXPECT_LE(std::abs(etrace[i].second - relative_error(ptrace[i], ref)), bound) << i;
    }
}

TEST(EMethod, TraceTurnsUpAfterMinimum)
{
    const auto point = make_point(M(1.0));
    for (std::size_t m : {10u, 15u, 20u}) {
        const auto t = e_method_trace(kBranchCase, point, m, 200);
        std::size_t at = 0;
        const double best = min_finite(t, &at);
        ASSERT_LT(at + 1, t.size()) << m;
        double later = 0.0;
        for (std::size_t i = at + 1; i < t.size(); ++i)
            if (std::isfinite(t[i].second)) later = std::max(later, t[i].second);
        EXPECT_GT(later, 10.0 * best) << m;
        EXPECT_GT(t.back().second, best) << m;
    }
}

TEST(EMethod, Errors)
{
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0)}, M(0.5), M(-1.0), 3), domain_error);
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0), M(2.0)}, M(0.5), M(-1.0), 0), domain_error);
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0), M(2.0)}, M(0.0), M(-1.0), 3), domain_error);
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0), M(2.0)}, M(1e-30), M(-1.0), 20), underflow_error);
    // z = 1, lambda = 0 makes the first basis column a copy of the constant one
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0), M(2.0)}, M(1.0), M(0.0), 3), singular_system_error);
    EXPECT_THROW(e_method_estimate(std::vector<M>{M(1.0), M(2.0), M(2.5)}, M(1.0), M(0.0), 3),
                 singular_system_error);
    EXPECT_THROW(e_method_trace(kBranchCase, make_point(M(1.0)), 0, 10), domain_error);
    EXPECT_THROW(e_method_trace(P({2}, {}), make_point(M(0.5)), 3, 10), domain_error);
    // with an explicit reference any point works
    const auto t = e_method_trace(P({2}, {}), make_point(M(0.5)), 3, 10, M(4.0));
    EXPECT_LT(t.back().second, 1e-6);
}
