#pragma once

// Small-integer arithmetic and exact phase reduction shared by every module.

#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace friable {

using u128 = unsigned __int128;
using i128 = __int128;
using cplx = std::complex<double>;

struct PrimePower {
    std::int64_t p;
    int m;
};

// Trial-division factorization; intended for moduli up to ~10^12.
std::vector<PrimePower> factorize(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n);

std::int64_t euler_phi(std::int64_t n);
int mobius(std::int64_t n);
int omega(std::int64_t n);
std::int64_t tau(std::int64_t n);
// Largest prime factor; P(1) = 1.
std::int64_t largest_prime_factor(std::int64_t n);
bool is_prime(std::int64_t n);
std::int64_t ipow(std::int64_t b, int e);
// p-adic valuation of n (n != 0); returns cap for n == 0.
int valuation(std::int64_t n, std::int64_t p, int cap);

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m);
// Non-negative residue of a mod m.
inline std::int64_t mod(std::int64_t a, std::int64_t m)
{
    auto r = a % m;
    return r < 0 ? r + m : r;
}

// e(t) = exp(2 pi i t)
inline cplx e1(double t)
{
    const double a = 2.0 * std::numbers::pi * t;
    return {std::cos(a), std::sin(a)};
}

// e(r/q) for integer r, reduced exactly before the division.
inline cplx e_frac(std::int64_t r, std::int64_t q) { return e1(static_cast<double>(mod(r, q)) / static_cast<double>(q)); }

// Table of e(j/q) for j = 0..q-1.
std::vector<cplx> roots_of_unity(std::int64_t q);

// out[c] = sum_r w[r] e(r c / n), n = w.size(); FFTW plans cached per length.
std::vector<cplx> dft_positive(const std::vector<cplx>& w);

// A real number mod 1 as a 128-bit binary fraction, theta ~ raw / 2^128.
// Products with exact integers n^k wrap modulo 2^128, which is exactly
// reduction modulo 1, so the phase of n^k * theta carries no cancellation.
class FixedPhase {
public:
    FixedPhase() = default;
    static FixedPhase from_double(double theta);
    // a/q with truncation error below 2^-128.
    static FixedPhase from_rational(std::int64_t a, std::int64_t q);
    static FixedPhase from_raw(u128 raw) { return FixedPhase(raw); }

    FixedPhase operator+(FixedPhase o) const { return FixedPhase(raw_ + o.raw_); }
    FixedPhase operator-(FixedPhase o) const { return FixedPhase(raw_ - o.raw_); }
    FixedPhase operator-() const { return FixedPhase(u128(0) - raw_); }
    // Multiplication by an integer known modulo 2^128.
    FixedPhase times(u128 n) const { return FixedPhase(raw_ * n); }

    // Representative in [0, 1).
    double fraction() const;
    // Distance to the nearest integer, in [0, 1/2].
    double norm() const;
    u128 raw() const { return raw_; }

private:
    explicit FixedPhase(u128 raw) : raw_(raw) {}
    u128 raw_ = 0;
};

// n^k modulo 2^128.
inline u128 pow_wrap(std::uint64_t n, int k)
{
    u128 r = 1;
    for (int i = 0; i < k; ++i)
        r *= n;
    return r;
}

// Neumaier compensated summation.
template <class T>
class CompensatedSum {
public:
    void add(T v)
    {
        T t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

}  // namespace friable
