#pragma once

// Local densities for Waring's problem in friable variables: the biased
// measure mu_q, the weighted sums S(x, y; q, a), S(q), M(q), the local
// factors beta_p, beta_infinity and the truncated singular series.

#include "friable/arith.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace friable {

// Mass of any b mod p^m with v_p(b) = v (capped at m).
double mu_mass(std::int64_t p, int m, int v, double alpha, double y);

struct LocalMeasure {
    std::int64_t p = 2;
    int m = 1;
    double alpha = 1;
    double y = 2;
    std::vector<double> mass_by_valuation;  // v = 0..m

    double operator()(std::int64_t b) const;
    // sum_v #{b mod p^m : v_p(b) = v} mass(v)
    double total() const;
};

LocalMeasure local_measure(std::int64_t p, int m, double alpha, double y);

// mu_q(b) for b = 0..q-1, multiplicative over the prime powers of q.
std::vector<double> mu_table(std::int64_t q, double alpha, double y);

// S(x, y; q, a) = sum_b mu_q(b) e(a b^k / q).
cplx s_xy_qa(std::int64_t q, std::int64_t a, double alpha, double y, int k);
// S(x, y; q, a) for every a mod q (index a), via one DFT of the k-th power push-forward of mu_q.
std::vector<cplx> s_xy_q_all(std::int64_t q, double alpha, double y, int k);

// S(q) = sum over units a of S(x, y; q, a)^s e(-a N / q).
cplx s_q(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s);

// M(q): mu_q-weighted number of s-tuples mod q with n_1^k + ... + n_s^k = N.
// Computed directly by s-fold cyclic convolution (no character sums).
double m_q(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s);

// S(p^l) from the valuation structure of mu: only a mod p^min(l, gamma)
// matters, gamma = v_p(k) + 1 (+1 more for p = 2).
cplx s_prime_power(std::int64_t p, int l, std::int64_t N, double alpha, double y, int k, int s);
int gauss_level(std::int64_t p, int k);

struct BetaP {
    double value = 0;
    double tail = 0;       // 0 when the series is known to terminate
    bool exact = false;    // S(p^l) = 0 for every l > levels
    int levels = 0;        // last level summed
    std::vector<double> terms;  // Re S(p^l), l = 0..levels
};

// beta_p = sum_l S(p^l). Requires s alpha / k > 1.1.
BetaP beta_p(std::int64_t p, std::int64_t N, double alpha, double y, int k, int s, double tail_tol = 1e-10);

double beta_infty_closed(double alpha, int k, int s);

struct BetaInftyNumeric {
    double value = 0;
    double imag = 0;
    double tail_estimate = 0;  // Delta^(1 - s alpha / k)
    double Delta = 0;
};

// Integral of Phi-check(delta, alpha)^s e(-delta) over |delta| <= Delta.
BetaInftyNumeric beta_infty_numeric(double alpha, int k, int s, double Delta);

struct SingularSeries {
    double value = 0;
    double imag = 0;
    double tail_estimate = 0;  // Q^(2 - s alpha / k + 0.1)
    std::int64_t Q = 1;
};

// sum_{q <= Q} S(q), S(q) assembled multiplicatively. Requires s alpha / k > 2.1.
SingularSeries singular_series_truncated(std::int64_t N, std::int64_t Q, double alpha, double y, int k, int s);

// Exact checks at alpha in {1, 1/2}. Values live in Z[sqrt p]; every mass is
// scaled by an integer W so that W mu is an algebraic integer A + B sqrt(p).
enum class ExactAlpha { One, Half };

struct SurdInt {
    i128 A = 0;
    i128 B = 0;
    bool operator==(const SurdInt&) const = default;
};

struct ScaledMeasure {
    std::int64_t p = 2;
    int m = 0;
    i128 W = 1;
    std::vector<SurdInt> mass;  // W mu_{p^m}(b) for v_p(b) = v, v = 0..m
};

ScaledMeasure scaled_measure(std::int64_t p, int m, ExactAlpha alpha, bool p_le_y);

struct IdentityCheck {
    bool ok = true;
    std::int64_t cases = 0;
    std::string failure;  // first failing case
};

// sum_u mu_{p^m}(u p^(m-l) + b) = mu_{p^(m-l)}(b) for all l <= m and b mod p^m.
IdentityCheck check_projection_exact(std::int64_t p, int m, ExactAlpha alpha, bool p_le_y);

// sum_{d | p^m} S(d) = p^m M(p^m) for every N mod p^m and every s <= s_max.
IdentityCheck check_sq_mq_exact(std::int64_t p, int m, int k, int s_max, ExactAlpha alpha, bool p_le_y);

}  // namespace friable
