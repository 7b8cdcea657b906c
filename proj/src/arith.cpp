#include "friable/arith.hpp"

#include "friable/errors.hpp"

#include <algorithm>
#include <cmath>

namespace friable {

std::vector<PrimePower> factorize(std::int64_t n)
{
    if (n <= 0)
        throw DomainError("factorize: n must be positive");
    std::vector<PrimePower> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0)
            continue;
        int m = 0;
        while (n % p == 0) {
            n /= p;
            ++m;
        }
        out.push_back({p, m});
    }
    if (n > 1)
        out.push_back({n, 1});
    return out;
}

std::vector<std::int64_t> divisors(std::int64_t n)
{
    std::vector<std::int64_t> ds{1};
    for (auto [p, m] : factorize(n)) {
        const auto base = ds.size();
        std::int64_t pk = 1;
        for (int e = 1; e <= m; ++e) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i)
                ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

std::int64_t euler_phi(std::int64_t n)
{
    std::int64_t r = n;
    for (auto [p, m] : factorize(n))
        r = r / p * (p - 1);
    return r;
}

int mobius(std::int64_t n)
{
    int r = 1;
    for (auto [p, m] : factorize(n)) {
        if (m > 1)
            return 0;
        r = -r;
    }
    return r;
}

int omega(std::int64_t n) { return static_cast<int>(factorize(n).size()); }

std::int64_t tau(std::int64_t n)
{
    std::int64_t r = 1;
    for (auto [p, m] : factorize(n))
        r *= m + 1;
    return r;
}

std::int64_t largest_prime_factor(std::int64_t n)
{
    auto f = factorize(n);
    return f.empty() ? 1 : f.back().p;
}

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::int64_t ipow(std::int64_t b, int e)
{
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i)
        r *= b;
    return r;
}

int valuation(std::int64_t n, std::int64_t p, int cap)
{
    if (n == 0)
        return cap;
    int v = 0;
    while (v < cap && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m)
{
    return static_cast<std::int64_t>(static_cast<i128>(mod(a, m)) * mod(b, m) % m);
}

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m)
{
    if (m == 1)
        return 0;
    std::int64_t r = 1;
    b = mod(b, m);
    while (e > 0) {
        if (e & 1)
            r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

std::vector<cplx> roots_of_unity(std::int64_t q)
{
    std::vector<cplx> r(static_cast<std::size_t>(q));
    for (std::int64_t j = 0; j < q; ++j)
        r[j] = e1(static_cast<double>(j) / static_cast<double>(q));
    return r;
}

FixedPhase FixedPhase::from_double(double theta)
{
    if (!std::isfinite(theta))
        throw DomainError("phase must be finite");
    const bool neg = theta < 0;
    double a = std::fabs(theta);
    a -= std::floor(a);  // exact for binary floating point
    if (a == 0.0)
        return {};
    int ex = 0;
    const double mant = std::frexp(a, &ex);  // a = mant * 2^ex, mant in [0.5, 1)
    const auto m53 = static_cast<std::uint64_t>(std::ldexp(mant, 53));
    const int shift = ex - 53 + 128;
    u128 raw = 0;
    if (shift >= 0)
        raw = u128(m53) << shift;
    else if (shift > -64)
        raw = u128(m53 >> (-shift));
    FixedPhase f(raw);
    return neg ? -f : f;
}

FixedPhase FixedPhase::from_rational(std::int64_t a, std::int64_t q)
{
    if (q <= 0)
        throw DomainError("phase denominator must be positive");
    const u128 uq = static_cast<u128>(q);
    u128 r = static_cast<u128>(mod(a, q));
    const u128 hi = (r << 64) / uq;
    r = (r << 64) % uq;
    const u128 lo = (r << 64) / uq;
    return FixedPhase((hi << 64) | lo);
}

double FixedPhase::fraction() const
{
    const auto hi = static_cast<std::uint64_t>(raw_ >> 64);
    const auto lo = static_cast<std::uint64_t>(raw_);
    double f = std::ldexp(static_cast<double>(hi), -64) + std::ldexp(static_cast<double>(lo), -128);
    return f >= 1.0 ? 0.0 : f;
}

double FixedPhase::norm() const
{
    const u128 half = u128(1) << 127;
    return raw_ >= half ? (-*this).fraction() : fraction();
}

}  // namespace friable
