#include "friable/errors.hpp"
#include "friable/local_factors.hpp"
#include "friable/weyl.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <numeric>
#include <random>

using namespace friable;

namespace {

// The four-case mass written out independently of the library.
double mass_oracle(std::int64_t p, int m, int v, double alpha, double y)
{
    const double pd = static_cast<double>(p);
    const double phi = std::pow(pd, m) - std::pow(pd, m - 1);
    if (static_cast<double>(p) > y)
        return v == 0 ? 1.0 / phi : 0.0;
    if (v == m)
        return std::pow(pd, -alpha * m);
    return std::pow(pd, (1 - alpha) * v) * (1 - std::pow(pd, -alpha)) / phi;
}

std::vector<double> mu_oracle(std::int64_t q, double alpha, double y)
{
    std::vector<double> mu(static_cast<std::size_t>(q), 1.0);
    std::int64_t rest = q;
    for (std::int64_t p = 2; p <= rest; ++p) {
        if (rest % p)
            continue;
        int m = 0;
        std::int64_t pm = 1;
        while (rest % p == 0) {
            rest /= p;
            pm *= p;
            ++m;
        }
        for (std::int64_t b = 0; b < q; ++b) {
            int v = 0;
            std::int64_t r = b % pm;
            while (v < m && r % p == 0) {
                r /= p;
                ++v;
            }
            mu[static_cast<std::size_t>(b)] *= mass_oracle(p, m, v, alpha, y);
        }
    }
    return mu;
}

std::int64_t powmod_k(std::int64_t b, int k, std::int64_t q)
{
    std::int64_t r = 1 % q;
    for (int i = 0; i < k; ++i)
        r = r * b % q;
    return r;
}

// M(q) by listing all s-tuples mod q.
double m_oracle(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s)
{
    const auto mu = mu_oracle(q, alpha, y);
    std::vector<double> dist(static_cast<std::size_t>(q), 0.0);
    dist[0] = 1;
    for (int i = 0; i < s; ++i) {
        std::vector<double> next(static_cast<std::size_t>(q), 0.0);
        for (std::int64_t t = 0; t < q; ++t)
            for (std::int64_t b = 0; b < q; ++b)
                next[static_cast<std::size_t>((t + powmod_k(b, k, q)) % q)] +=
                    dist[static_cast<std::size_t>(t)] * mu[static_cast<std::size_t>(b)];
        dist.swap(next);
    }
    return dist[static_cast<std::size_t>(mod(N, q))];
}

cplx s_oracle(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s)
{
    const auto mu = mu_oracle(q, alpha, y);
    cplx total = 0;
    for (std::int64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1)
            continue;
        cplx sa = 0;
        for (std::int64_t b = 0; b < q; ++b)
            sa += mu[static_cast<std::size_t>(b)] * oracle::e(static_cast<long double>(a * powmod_k(b, k, q) % q) / q);
        total += std::pow(sa, s) * oracle::e(-static_cast<long double>(mod(a * N, q)) / q);
    }
    return total;
}

}  // namespace

TEST(Mu, FourCases)
{
    for (std::int64_t p : {2, 3, 5, 7})
        for (int m = 1; m <= 4; ++m)
            for (int v = 0; v <= m; ++v)
                for (double alpha : {0.3, 0.7, 1.0})
                    for (double y : {2.0, 4.0, 10.0})
                        EXPECT_NEAR(mu_mass(p, m, v, alpha, y), mass_oracle(p, m, v, alpha, y), 1e-15);
    EXPECT_THROW(mu_mass(3, 2, 3, 0.5, 10), DomainError);
}

TEST(Mu, UniformAtAlphaOne)
{
    for (int v = 0; v <= 3; ++v)
        EXPECT_NEAR(mu_mass(5, 3, v, 1.0, 10), 1.0 / 125, 1e-16);
    EXPECT_NEAR(mu_mass(11, 2, 0, 0.4, 10), 1.0 / 110, 1e-16);
}

TEST(Mu, Normalized)
{
    for (std::int64_t p : {2, 3, 5, 7, 11})
        for (int m = 1; m <= 5; ++m)
            for (double alpha : {0.25, 0.6, 1.0})
                for (double y : {3.0, 8.0}) {
                    const auto lm = local_measure(p, m, alpha, y);
                    EXPECT_NEAR(lm.total(), 1.0, 1e-13);
                    for (double w : lm.mass_by_valuation)
                        EXPECT_GE(w, 0.0);
                }
    for (std::int64_t q : {1, 12, 90, 210, 1024}) {
        const auto mu = mu_table(q, 0.55, 5);
        const auto want = mu_oracle(q, 0.55, 5);
        ASSERT_EQ(mu.size(), want.size());
        double t = 0;
        for (std::size_t b = 0; b < mu.size(); ++b) {
            EXPECT_NEAR(mu[b], want[b], 1e-15);
            t += mu[b];
        }
        EXPECT_NEAR(t, 1.0, 1e-12);
    }
}

TEST(SumsModQ, SxyAgreesWithDirectSum)
{
    EXPECT_NEAR(std::abs(s_xy_qa(1, 0, 0.5, 10, 2) - 1.0), 0, 1e-15);
    for (std::int64_t q : {5, 12, 27, 60, 128})
        for (int k : {1, 2, 3}) {
            const auto mu = mu_oracle(q, 0.7, 5);
            const auto all = s_xy_q_all(q, 0.7, 5, k);
            for (std::int64_t a = 0; a < q; ++a) {
                cplx want = 0;
                for (std::int64_t b = 0; b < q; ++b)
                    want += mu[static_cast<std::size_t>(b)] *
                            oracle::e(static_cast<long double>(a * powmod_k(b, k, q) % q) / q);
                EXPECT_LT(std::abs(all[static_cast<std::size_t>(a)] - want), 1e-12);
                if (std::gcd(a, q) == 1)
                    EXPECT_LT(std::abs(s_xy_qa(q, a, 0.7, 5, k) - want), 1e-12);
            }
        }
    EXPECT_THROW(s_xy_qa(6, 2, 0.5, 10, 1), DomainError);
}

TEST(SumsModQ, SqMatchesOracle)
{
    EXPECT_NEAR(std::abs(s_q(1, 17, 0.5, 10, 2, 3) - 1.0), 0, 1e-15);
    for (std::int64_t q : {2, 4, 9, 15, 16, 25, 36})
        for (int k : {1, 2, 3})
            for (int s : {2, 3, 5})
                for (std::int64_t N : {0, 1, 7}) {
                    const cplx got = s_q(q, N, 0.65, 6, k, s);
                    EXPECT_LT(std::abs(got - s_oracle(q, N, 0.65, 6, k, s)), 1e-12);
                    EXPECT_LE(std::abs(got.imag()), 1e-9 * std::max(std::abs(got), 1e-300) + 1e-15);
                }
}

TEST(SumsModQ, SqIsMultiplicative)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    for (int i = 0; i < 40; ++i) {
        const std::int64_t N = static_cast<std::int64_t>(rng() % 1000);
        const int k = 1 + static_cast<int>(rng() % 3);
        const int s = 2 + static_cast<int>(rng() % 5);
        const double alpha = u(rng);
        const double y = (rng() % 2) ? 2.5 : 10.0;
        const cplx s6 = s_q(6, N, alpha, y, k, s);
        const cplx s23 = s_q(2, N, alpha, y, k, s) * s_q(3, N, alpha, y, k, s);
        EXPECT_LT(std::abs(s6 - s23), 1e-9);
        const cplx s60 = s_q(60, N, alpha, y, k, s);
        EXPECT_LT(std::abs(s60 - s_q(4, N, alpha, y, k, s) * s_q(15, N, alpha, y, k, s)), 1e-9);
    }
}

TEST(SumsModQ, WorkedValues)
{
    EXPECT_NEAR(std::abs(s_q(2, 0, 1.0, 10, 1, 2)), 0, 1e-15);
    EXPECT_NEAR(m_q(2, 0, 1.0, 10, 1, 2), 0.5, 1e-15);
    for (std::int64_t p : {11, 13, 29})
        EXPECT_NEAR(m_q(p, 3, 0.6, 7, 1, 1), 1.0 / static_cast<double>(p - 1), 1e-15);
}

TEST(SumsModQ, MqMatchesOracleAndIdentity)
{
    for (std::int64_t q : {4, 8, 9, 25, 27, 12, 30})
        for (int k : {1, 2, 3})
            for (int s : {1, 2, 3})
                for (std::int64_t N : {0, 1, 5}) {
                    const double got = m_q(q, N, 0.8, 4, k, s);
                    EXPECT_NEAR(got, m_oracle(q, N, 0.8, 4, k, s), 1e-13);
                    cplx ds = 0;
                    for (auto d : divisors(q))
                        ds += s_q(d, N, 0.8, 4, k, s);
                    EXPECT_NEAR(ds.real(), static_cast<double>(q) * got, 1e-11);
                }
    EXPECT_THROW(m_q(30011, 1, 0.5, 10, 1, 3), ResourceError);
}

TEST(SumsModQ, PrimePowerFormMatchesDirect)
{
    for (std::int64_t p : {2, 3, 5, 7})
        for (int k : {1, 2, 3, 4})
            for (int s : {2, 4})
                for (std::int64_t N : {0, 1, 6, 24})
                    for (int l = 1; std::pow(p, l) <= 2500; ++l) {
                        const std::int64_t q = ipow(p, l);
                        const cplx direct = s_q(q, N, 0.72, 5, k, s);
                        const cplx fast = s_prime_power(p, l, N, 0.72, 5, k, s);
                        EXPECT_LT(std::abs(direct - fast), 1e-12 + 1e-10 * std::abs(direct)) << p << "^" << l;
                    }
}

TEST(SumsModQ, VanishesAboveGaussLevel)
{
    EXPECT_EQ(gauss_level(3, 3), 2);
    EXPECT_EQ(gauss_level(5, 2), 1);
    EXPECT_EQ(gauss_level(2, 1), 2);
    EXPECT_EQ(gauss_level(2, 4), 4);
    // With N != 0, S(p^l) = 0 once l > gamma + v_p(N); checked on the direct sum.
    for (std::int64_t p : {2, 3, 5})
        for (int k : {1, 2, 3})
            for (std::int64_t N : {1, 2, 3, 10, 12}) {
                const int top = gauss_level(p, k) + valuation(N, p, 64);
                for (int l = top + 1; std::pow(p, l) <= 3200; ++l)
                    EXPECT_LT(std::abs(s_q(ipow(p, l), N, 0.66, 7, k, 3)), 1e-13) << p << " " << k << " " << N << " " << l;
            }
}

TEST(BetaP, UniformMeasureGivesOne)
{
    for (std::int64_t p : {2, 3, 5, 7})
        for (int s : {2, 3, 5})
            for (std::int64_t N : {0, 1, 12, 1000}) {
                const auto b = beta_p(p, N, 1.0, 10, 1, s);
                EXPECT_NEAR(b.value, 1.0, 1e-12);
                EXPECT_NEAR(std::pow(p, 4) * m_q(ipow(p, 4), N, 1.0, 10, 1, s), 1.0, 1e-12);
            }
}

TEST(BetaP, EqualsScaledSolutionDensity)
{
    // beta_p = p^m M(p^m) once m passes the last nonzero level.
    for (auto [p, m] : {std::pair{2L, 7}, {3L, 5}, {5L, 3}})
        for (int k : {1, 2, 3})
            for (std::int64_t N : {1, 3, 4, 9}) {
                const auto b = beta_p(p, N, 0.7, 10, k, 6);
                ASSERT_TRUE(b.exact);
                if (b.levels > m)
                    continue;
                const double want = std::pow(static_cast<double>(p), m) * m_q(ipow(p, m), N, 0.7, 10, k, 6);
                EXPECT_NEAR(b.value, want, 1e-10) << p << " " << k << " " << N;
                EXPECT_EQ(b.tail, 0.0);
            }
}

TEST(BetaP, ZeroTargetTailAndStability)
{
    for (std::int64_t p : {2, 3, 7})
        for (auto [k, s] : {std::pair{1, 3}, {2, 6}, {3, 10}}) {
            const double alpha = 0.8;
            const auto b = beta_p(p, 0, alpha, 20, k, s, 1e-10);
            EXPECT_FALSE(b.exact);
            EXPECT_LE(b.tail, 1e-10);
            const int want_L = std::max(4, static_cast<int>(std::ceil(std::log(1e-10) /
                                                  ((1 - s * alpha / k + 0.1) * std::log(static_cast<double>(p))))));
            EXPECT_GE(b.levels, std::min(want_L, 60));
            // A deeper truncation moves the sum by at most the requested tail.
            const auto deeper = beta_p(p, 0, alpha, 20, k, s, 1e-14);
            EXPECT_GE(deeper.levels, b.levels + 2);
            EXPECT_LE(std::abs(deeper.value - b.value), 1e-10);
        }
    EXPECT_THROW(beta_p(3, 0, 0.5, 10, 2, 4), DomainError);
}

TEST(BetaP, CloseToOneForLargeP)
{
    // k = 2, s = 6, alpha = 0.9: |beta_p - 1| <= C p^(1 - s alpha / k + 0.1).
    double C = 0;
    for (std::int64_t p = 2; p <= 100; ++p) {
        if (!oracle::is_prime(p))
            continue;
        const auto b = beta_p(p, 17, 0.9, 50, 2, 6);
        EXPECT_GT(b.value, 0.0);
        C = std::max(C, std::abs(b.value - 1) / std::pow(static_cast<double>(p), 1 - 2.7 + 0.1));
    }
    EXPECT_LE(C, 10.0);
}

TEST(BetaInfty, ClosedForm)
{
    EXPECT_NEAR(beta_infty_closed(1, 1, 2), 1.0, 1e-14);
    EXPECT_NEAR(beta_infty_closed(1, 2, 4), std::numbers::pi * std::numbers::pi / 16, 1e-14);
    EXPECT_NEAR(beta_infty_closed(1, 2, 4), 0.616850, 1e-6);
    // s = 1: Gamma(alpha/k + 1) / Gamma(alpha/k) = alpha / k.
    EXPECT_NEAR(beta_infty_closed(0.6, 3, 1), 0.2, 1e-14);
}

TEST(BetaInfty, NumericIntegral)
{
    const auto r = beta_infty_numeric(1, 1, 2, 1e4);
    EXPECT_NEAR(r.value, 1.0, 1e-3);
    EXPECT_LE(std::abs(r.imag), 1e-8);
    EXPECT_NEAR(r.tail_estimate, std::pow(1e4, 1 - 2.0), 1e-15);
    for (auto [a, k, s] : {std::tuple{0.9, 1, 4}, {0.8, 2, 8}}) {
        const auto n = beta_infty_numeric(a, k, s, 1e4);
        const double c = beta_infty_closed(a, k, s);
        EXPECT_LE(std::abs(n.value - c), 1e-6 * c);
        EXPECT_LE(std::abs(n.imag), 1e-8);
    }
    EXPECT_THROW(beta_infty_numeric(0.5, 2, 4, 100), DomainError);
}

TEST(SingularSeries, QOneIsOne)
{
    const auto r = singular_series_truncated(100, 1, 0.9, 50, 2, 6);
    EXPECT_NEAR(r.value, 1.0, 1e-15);
    EXPECT_THROW(singular_series_truncated(100, 10, 0.5, 50, 2, 6), DomainError);
}

TEST(SingularSeries, MatchesDirectPartialSum)
{
    const auto r = singular_series_truncated(23, 60, 0.9, 50, 2, 6);
    double direct = 0;
    for (std::int64_t q = 1; q <= 60; ++q)
        direct += s_q(q, 23, 0.9, 50, 2, 6).real();
    EXPECT_NEAR(r.value, direct, 1e-11);
}

TEST(SingularSeries, AgreesWithEulerProduct)
{
    const std::int64_t N = 23;
    const auto r = singular_series_truncated(N, 2000, 0.9, 50, 2, 6);
    double prod = 1;
    for (std::int64_t p = 2; p <= 2000; ++p)
        if (oracle::is_prime(p))
            prod *= beta_p(p, N, 0.9, 50, 2, 6).value;
    // Both tails are of size Q^(2 - s alpha / k + 0.1) = 2000^-0.6.
    EXPECT_LE(std::abs(r.value - prod), r.tail_estimate + std::pow(2000.0, -0.6));
    EXPECT_GT(prod, 0.0);
}

TEST(SingularSeries, StabilizesInQ)
{
    double C = 0;
    for (std::int64_t Q : {25, 50, 100, 200, 400}) {
        const double a = singular_series_truncated(5, Q, 0.9, 50, 2, 6).value;
        const double b = singular_series_truncated(5, 2 * Q, 0.9, 50, 2, 6).value;
        C = std::max(C, std::abs(a - b) / std::pow(static_cast<double>(Q), 2 - 2.7 + 0.1));
    }
    EXPECT_LE(C, 10.0);
}

TEST(Exact, ProjectionIdentity)
{
    for (std::int64_t p : {2, 3, 5})
        for (int m = 1; m <= 5; ++m)
            for (auto a : {ExactAlpha::One, ExactAlpha::Half})
                for (bool le : {true, false}) {
                    const auto r = check_projection_exact(p, m, a, le);
                    EXPECT_TRUE(r.ok) << r.failure;
                    EXPECT_GT(r.cases, 0);
                }
}

TEST(Exact, ScaledMeasureMatchesFloat)
{
    for (std::int64_t p : {2, 3, 7})
        for (int m = 1; m <= 4; ++m)
            for (bool le : {true, false}) {
                const auto sm = scaled_measure(p, m, ExactAlpha::Half, le);
                for (int v = 0; v <= m; ++v) {
                    const auto& c = sm.mass[static_cast<std::size_t>(v)];
                    const double val = (static_cast<double>(c.A) + static_cast<double>(c.B) * std::sqrt(static_cast<double>(p))) /
                                       static_cast<double>(sm.W);
                    EXPECT_NEAR(val, mu_mass(p, m, v, 0.5, le ? 1e9 : 1.5), 1e-14);
                }
            }
}

TEST(Exact, SqMqIdentitySmallCases)
{
    // The full sweep over p^m <= 243 is in the acceptance run.
    for (auto [p, m] : {std::pair{2L, 4}, {3L, 3}, {5L, 2}, {7L, 1}})
        for (auto a : {ExactAlpha::One, ExactAlpha::Half}) {
            const auto r = check_sq_mq_exact(p, m, 2, 3, a, true);
            EXPECT_TRUE(r.ok) << r.failure;
        }
}
