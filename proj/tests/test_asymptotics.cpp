#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "hypaccel/asymptotics.hpp"
#include "hypaccel/oracle.hpp"

using namespace hypaccel;
using E = ExtendedComplex;
using M = MachineComplex;
using P = HypergeometricParams<M>;

namespace {

const P kBranchCase({{1, 4}, {1.5, 4.5}}, {{3, 1}});

std::vector<long> range(long lo, long hi, long step)
{
    std::vector<long> v;
    for (long n = lo; n <= hi; n += step) v.push_back(n);
    return v;
}

P random_params(std::mt19937_64& rng, int q, double R)
{
    std::vector<M> up, lo;
    for (int i = 0; i <= q; ++i) up.push_back(testsupport::random_complex(rng, R));
    for (int i = 0; i < q; ++i) lo.push_back(testsupport::random_lower(rng, R));
    return {up, lo};
}

bool agree_3_digits(const M& got, const M& want) { return std::abs(got - want) <= 1e-3 * std::abs(want); }

} // namespace

TEST(SeriesPoint, Classification)
{
    EXPECT_EQ(make_point(M(1.0)).kind, PointKind::BranchPoint);
    EXPECT_EQ(make_point(M(0.5, 0.5)).kind, PointKind::InsideDisk);
    EXPECT_EQ(make_point(M(-1.0)).kind, PointKind::OnCircle);
    EXPECT_EQ(make_point(M(0.6, 0.8)).kind, PointKind::OnCircle);
    EXPECT_EQ(make_point(M(1.0, 1e-300)).kind, PointKind::OnCircle);
    EXPECT_EQ(make_point(M(std::nextafter(1.0, 0.0))).kind, PointKind::OnCircle);
    EXPECT_THROW(make_point(M(1.01)), domain_error);
    EXPECT_EQ(make_point(E(1.0)).kind, PointKind::BranchPoint);
}

TEST(Exponent, Examples)
{
    EXPECT_EQ(exponent(kBranchCase, make_point(M(1.0))), M(-0.5, 7.5));
    EXPECT_EQ(exponent(kBranchCase, make_point(M(0.5))), M(-1.5, 7.5));
    EXPECT_EQ(exponent(P({1, 1}, {1}), make_point(M(0.5))), M(0.0));
}

TEST(CoeffsOffBranch, OrderOne)
{
    const auto e = coeffs_offbranch(kBranchCase, M(0.3, 0.2), 1);
    ASSERT_EQ(e.c.size(), 1u);
    EXPECT_EQ(e.c[0], M(1.0));
    EXPECT_FALSE(e.at_branch);
    EXPECT_EQ(e.lambda, kBranchCase.sigma() - M(1.0));
}

TEST(CoeffsOffBranch, GeometricSeries)
{
    const auto e = coeffs_offbranch(P({1, 1}, {1}), M(0.5), 4);
    ASSERT_EQ(e.c.size(), 4u);
    EXPECT_EQ(e.c[0], M(1.0));
    for (std::size_t k = 1; k < 4; ++k) EXPECT_LE(std::abs(e.c[k]), 1e-14);
    // the fit oracle agrees
    const auto pe = P({1, 1}, {1}).as<E>();
    const auto rem = testsupport::remainders_by_tail(pe.upper(), pe.lower(), E(0.5), 60, 200);
    const auto fit = testsupport::fitted_coeffs(rem, E(0.5), E(0.0), range(20, 60, 2), 4);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_LE(std::abs(fit[k]), 1e-10);
}

TEST(CoeffsOffBranch, MatchesLeastSquaresFit)
{
    const M z(0.9);
    const auto e = coeffs_offbranch(kBranchCase, z, 3);
    const auto pe = kBranchCase.as<E>();
    const auto rem = testsupport::remainders_by_tail(pe.upper(), pe.lower(), E(z), 1600, 2500);
    // The higher coefficients are large (|c_3| ~ 4e5), so the fit basis must
    // reach well past 1/n^2 before c_2 is resolved on n in [200, 400].
    const auto fit = testsupport::fitted_coeffs(rem, E(z), E(e.lambda), range(200, 400, 2), 12);
    EXPECT_TRUE(agree_3_digits(e.c[1], fit[1])) << e.c[1] << " vs " << fit[1];
    EXPECT_TRUE(agree_3_digits(e.c[2], fit[2])) << e.c[2] << " vs " << fit[2];
    const auto far = testsupport::fitted_coeffs(rem, E(z), E(e.lambda), range(800, 1600, 8), 10);
    for (std::size_t k = 1; k < 3; ++k) EXPECT_LE(std::abs(e.c[k] - far[k]), 1e-6 * std::abs(e.c[k]));
}

TEST(CoeffsOffBranch, FitAgreementOnRandomCases)
{
    std::mt19937_64 rng(211);
    for (int t = 0; t < 20; ++t) {
        const P p = random_params(rng, 1 + t % 3, 2.0);
        const M z = std::polar(std::uniform_real_distribution<double>(0.3, 0.8)(rng),
                               std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
        const auto e = coeffs_offbranch(p, z, 4);
        const auto pe = p.as<E>();
        const auto rem = testsupport::remainders_by_tail(pe.upper(), pe.lower(), E(z), 200, 800);
        const auto fit = testsupport::fitted_coeffs(rem, E(z), E(e.lambda), range(100, 200, 2), 8);
        for (std::size_t k = 1; k < 3; ++k)
            EXPECT_LE(std::abs(e.c[k] - fit[k]), 1e-3 * std::max(1.0, std::abs(e.c[k])))
                << "case " << t << " k " << k;
    }
}

TEST(CoeffsOffBranch, RejectsBranchPoint) { EXPECT_THROW(coeffs_offbranch(kBranchCase, M(1.0), 4), domain_error); }

TEST(CoeffsBranch, OrderOne)
{
    const auto e = coeffs_branch(P({0.5, 0.5}, {2}), 1);
    ASSERT_EQ(e.c.size(), 1u);
    EXPECT_EQ(e.c[0], M(1.0));
    EXPECT_TRUE(e.at_branch);
    EXPECT_EQ(e.lambda, M(-1.0));
}

TEST(CoeffsBranch, MatchesLeastSquaresFit)
{
    const P p({0.5, 0.5}, {2});
    const auto e = coeffs_branch(p, 3);
    const auto pe = p.as<E>();
    const auto sums = testsupport::partial_sums(pe.upper(), pe.lower(), E(1.0), 10000);
    const E s = E(4.0) / E(dd_const::pi);
    std::vector<E> rem;
    for (const E& v : sums) rem.push_back(v - s);
    const auto fit = testsupport::fitted_coeffs(rem, E(1.0), E(-1.0), range(1000, 10000, 100), 6);
    EXPECT_TRUE(agree_3_digits(e.c[1], fit[1])) << e.c[1] << " vs " << fit[1];
    EXPECT_TRUE(agree_3_digits(e.c[2], fit[2])) << e.c[2] << " vs " << fit[2];
}

TEST(CoeffsBranch, RejectsDivergentCase)
{
    EXPECT_THROW(coeffs_branch(P({1, 1}, {1}), 5), divergence_error);
    EXPECT_THROW(coeffs_branch(P({1, 1}, {2}), 5), divergence_error);
}

TEST(CoeffsBranch, FiniteForAllOrders)
{
    CampaignSpec spec;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto in = random_case(spec, i);
        const auto e = coeffs_branch(in.params, 45);
        for (const M& c : e.c) ASSERT_TRUE(is_finite(c));
    }
}

TEST(Xi1Coeffs, VanishForSimpleCase)
{
    const auto c = xi1_coeffs_offbranch(P({1, 2}, {3}), M(0.5), 6);
    ASSERT_EQ(c.size(), 6u);
    EXPECT_EQ(c[0], M(1.0));
    for (std::size_t k = 1; k < 6; ++k) EXPECT_LE(std::abs(c[k]), 1e-13);
}

TEST(Xi1Coeffs, OrderOne) { EXPECT_EQ(xi1_coeffs_offbranch(kBranchCase, M(0.5), 1), std::vector<M>{M(1.0)}); }

TEST(Xi1Coeffs, VanishForComplexQ2)
{
    std::mt19937_64 rng(227);
    const auto c = xi1_coeffs_offbranch(random_params(rng, 2, 5.0), M(0.3, 0.4), 8);
    for (std::size_t k = 1; k < 8; ++k) EXPECT_LE(std::abs(c[k]), 1e-12);
}

TEST(Xi1Coeffs, VanishingProperty)
{
    std::mt19937_64 rng(229);
    std::uniform_int_distribution<int> qd(0, 3);
    for (int t = 0; t < 200; ++t) {
        const P p = random_params(rng, qd(rng), 10.0);
        const M z = testsupport::random_in_disk(rng, 0.95);
        const auto c = xi1_coeffs_offbranch(p, z, 10);
        for (std::size_t k = 1; k < c.size(); ++k) ASSERT_LE(std::abs(c[k]), 1e-12) << "case " << t << " k " << k;
    }
}

TEST(Xi1Coeffs, RejectsBranchPoint) { EXPECT_THROW(xi1_coeffs_offbranch(kBranchCase, M(1.0), 3), domain_error); }

TEST(Omega, Examples)
{
    const auto prof = profile_of<M>();
    AsymptoticExpansion<M> a{M(-0.5), {M(1.0)}, true, 1};
    EXPECT_LE(std::abs(omega(a, M(1.0), 4, prof).value - M(0.5)), 1e-16);
    EXPECT_EQ(omega(a, M(1.0), 4, prof).rel_err, prof.eps_p);

    AsymptoticExpansion<M> b{M(0.0), {M(1.0), M(2.0)}, false, 2};
    EXPECT_LE(std::abs(omega(b, M(0.5), 2, prof).value - M(0.5)), 1e-16);

    AsymptoticExpansion<M> u{M(0.0), {M(1.0)}, false, 1};
    const auto r = omega(u, M(0.1), 400, prof);
    EXPECT_GT(r.rel_err, prof.eps_p);
    EXPECT_NEAR(r.leading_log_mag, 400.0 * std::log(0.1), 1e-9);
    EXPECT_NEAR(std::log(r.rel_err), std::log(prof.f_norm) - r.leading_log_mag, 1e-9);
}

TEST(Omega, ExtendedAgreesWithMachine)
{
    AsymptoticExpansion<E> a{E(M(-0.5, 7.5)), {E(1.0), E(M(0.3, 2.0)), E(-1.5)}, true, 3};
    AsymptoticExpansion<M> b{M(-0.5, 7.5), {M(1.0), M(0.3, 2.0), M(-1.5)}, true, 3};
    for (long n : {1L, 10L, 100L}) {
        const M we = to_machine(omega(a, E(1.0), n, profile_of<E>()).value);
        const M wm = omega(b, M(1.0), n, profile_of<M>()).value;
        EXPECT_LE(std::abs(we - wm), 1e-13 * std::abs(we));
    }
}

// |(s_n - s) / (z^n n^lambda)| settles to the same constant at n and 2n.
TEST(RemainderLaw, OffBranch)
{
    std::mt19937_64 rng(233);
    for (int t = 0; t < 30; ++t) {
        const P p = random_params(rng, 1 + t % 2, 1.0);
        // below |z| = 0.4 the remainder at n = 600 leaves the binary64 range
        const M z = std::polar(std::uniform_real_distribution<double>(0.4, 0.9)(rng),
                               std::uniform_real_distribution<double>(-3.1, 3.1)(rng));
        const auto pe = p.as<E>();
        const auto rem = testsupport::remainders_by_tail(pe.upper(), pe.lower(), E(z), 600, 1500);
        const E lambda = pe.sigma() - E(1.0);
        const auto scaled = [&](long n) {
            const E nn(static_cast<double>(n));
            return magnitude(rem[static_cast<std::size_t>(n)] /
                             exp_of(nn * log_of(E(z)) + lambda * log_of(nn)));
        };
        const double a = scaled(300), b = scaled(600);
        EXPECT_GT(a, 0.0);
        EXPECT_LE(std::abs(a / b - 1.0), 0.01) << "case " << t << " z " << z;
    }
}

TEST(RemainderLaw, Branch)
{
    const P p({0.5, 0.5}, {2});
    const auto pe = p.as<E>();
    const auto sums = testsupport::partial_sums(pe.upper(), pe.lower(), E(1.0), 10000);
    const E s = E(4.0) / E(dd_const::pi);
    const double a = magnitude((sums[1000] - s) * E(1000.0));
    const double b = magnitude((sums[10000] - s) * E(10000.0));
    EXPECT_GT(a, 0.0);
    EXPECT_LE(std::abs(a / b - 1.0), 0.01);
}

namespace {

double omega10_geomean(int q, bool branch)
{
    CampaignSpec spec;
    spec.q = q;
    spec.R = 5.0;
    spec.at_branch = branch;
    std::mt19937_64 rng(239);
    double log_sum = 0.0;
    int count = 0;
    for (std::uint64_t i = 0; count < 100; ++i) {
        auto in = random_case(spec, i);
        if (!branch) in.z = testsupport::random_in_disk(rng, 0.9);
        const auto pe = in.params.as<E>();
        const auto em = branch ? coeffs_branch(in.params, 30) : coeffs_offbranch(in.params, in.z, 30);
        const auto ee = branch ? coeffs_branch(pe, 30) : coeffs_offbranch(pe, E(in.z), 30);
        const M wm = omega(em, in.z, 10, profile_of<M>()).value;
        const E we = omega(ee, E(in.z), 10, profile_of<E>()).value;
        const double err = magnitude(E(wm) - we) / magnitude(we);
        log_sum += std::log(std::max(err, 1e-300));
        ++count;
    }
    return std::exp(log_sum / count);
}

} // namespace

TEST(Stability, BranchOmega10GeometricMean)
{
    const double g = omega10_geomean(3, true);
    EXPECT_LE(g, 1e-12) << g;
}

TEST(Stability, OffBranchOmega10GeometricMean)
{
    const double g = omega10_geomean(1, false);
    EXPECT_LE(g, 1e-12) << g;
}
