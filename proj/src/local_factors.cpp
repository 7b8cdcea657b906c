#include "friable/local_factors.hpp"

#include "friable/errors.hpp"
#include "friable/weyl.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <map>
#include <numeric>

namespace friable {

namespace {

double phi_pp(std::int64_t p, int e)
{
    return e == 0 ? 1.0 : std::pow(static_cast<double>(p), e - 1) * static_cast<double>(p - 1);
}

void check_prime(std::int64_t p)
{
    if (!is_prime(p))
        throw DomainError("expected a prime, got " + std::to_string(p));
}

cplx ipow_c(cplx z, int s)
{
    cplx r = 1.0;
    for (int i = 0; i < s; ++i)
        r *= z;
    return r;
}

// k-th power push-forward of mu_q: P[r] = sum_{b^k = r} mu_q(b).
std::vector<cplx> pushforward(std::int64_t q, double alpha, double y, int k)
{
    const auto mu = mu_table(q, alpha, y);
    std::vector<cplx> P(static_cast<std::size_t>(q), cplx(0, 0));
    for (std::int64_t b = 0; b < q; ++b)
        P[static_cast<std::size_t>(powmod(b, k, q))] += mu[static_cast<std::size_t>(b)];
    return P;
}

}  // namespace

double mu_mass(std::int64_t p, int m, int v, double alpha, double y)
{
    check_prime(p);
    if (m < 0 || v < 0 || v > m)
        throw DomainError("mu_mass needs 0 <= v <= m");
    const double pd = static_cast<double>(p);
    if (pd > y)
        return v > 0 ? 0.0 : 1.0 / phi_pp(p, m);
    if (v == m)
        return std::pow(pd, -alpha * m);
    return std::pow(pd, (1 - alpha) * v) * (1 - std::pow(pd, -alpha)) / phi_pp(p, m);
}

double LocalMeasure::operator()(std::int64_t b) const
{
    return mass_by_valuation[static_cast<std::size_t>(valuation(mod(b, ipow(p, m)), p, m))];
}

double LocalMeasure::total() const
{
    double t = 0;
    for (int v = 0; v <= m; ++v)
        t += phi_pp(p, m - v) * mass_by_valuation[static_cast<std::size_t>(v)];
    return t;
}

LocalMeasure local_measure(std::int64_t p, int m, double alpha, double y)
{
    LocalMeasure lm{p, m, alpha, y, {}};
    for (int v = 0; v <= m; ++v)
        lm.mass_by_valuation.push_back(mu_mass(p, m, v, alpha, y));
    return lm;
}

std::vector<double> mu_table(std::int64_t q, double alpha, double y)
{
    if (q < 1)
        throw DomainError("mu_table: q must be positive");
    if (q > 10'000'000)
        throw ResourceError("mu_table: q exceeds 10^7");
    std::vector<double> mu(static_cast<std::size_t>(q), 1.0);
    for (auto [p, m] : factorize(q)) {
        const auto lm = local_measure(p, m, alpha, y);
        for (std::int64_t b = 0; b < q; ++b)
            mu[static_cast<std::size_t>(b)] *= lm.mass_by_valuation[static_cast<std::size_t>(valuation(b, p, m))];
    }
    return mu;
}

cplx s_xy_qa(std::int64_t q, std::int64_t a, double alpha, double y, int k)
{
    if (q < 1 || k < 1)
        throw DomainError("s_xy_qa needs q >= 1 and k >= 1");
    if (std::gcd(mod(a, q), q) != 1)
        throw DomainError("s_xy_qa needs gcd(a, q) = 1");
    if (q > 100'000)
        throw ResourceError("s_xy_qa: q exceeds 10^5");
    const auto mu = mu_table(q, alpha, y);
    const auto roots = roots_of_unity(q);
    const auto ar = mod(a, q);
    cplx acc = 0;
    for (std::int64_t b = 0; b < q; ++b)
        acc += mu[static_cast<std::size_t>(b)] * roots[static_cast<std::size_t>(mulmod(ar, powmod(b, k, q), q))];
    return acc;
}

std::vector<cplx> s_xy_q_all(std::int64_t q, double alpha, double y, int k)
{
    if (q < 1 || k < 1)
        throw DomainError("s_xy_q_all needs q >= 1 and k >= 1");
    return dft_positive(pushforward(q, alpha, y, k));
}

cplx s_q(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s)
{
    if (s < 1)
        throw DomainError("s_q needs s >= 1");
    if (q > 1'000'000)
        throw ResourceError("s_q: q exceeds 10^6");
    if (q == 1)
        return 1.0;
    const auto S = s_xy_q_all(q, alpha, y, k);
    const auto roots = roots_of_unity(q);
    const auto Nr = mod(N, q);
    cplx acc = 0;
    for (std::int64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1)
            continue;
        acc += ipow_c(S[static_cast<std::size_t>(a)], s) * roots[static_cast<std::size_t>(mod(-mulmod(a, Nr, q), q))];
    }
    return acc;
}

double m_q(std::int64_t q, std::int64_t N, double alpha, double y, int k, int s)
{
    if (q < 1 || s < 1 || k < 1)
        throw DomainError("m_q needs q, k, s >= 1");
    if (static_cast<double>(s) * static_cast<double>(q) * static_cast<double>(q) > 4e8)
        throw ResourceError("m_q: direct convolution over Z/" + std::to_string(q) +
                            " too large; use sum_{d|q} S(d) = q M(q) instead");
    const auto P = pushforward(q, alpha, y, k);
    std::vector<std::pair<std::int64_t, double>> support;
    for (std::int64_t r = 0; r < q; ++r)
        if (P[static_cast<std::size_t>(r)].real() != 0.0)
            support.emplace_back(r, P[static_cast<std::size_t>(r)].real());
    std::vector<double> D(static_cast<std::size_t>(q), 0.0);
    for (auto [r, w] : support)
        D[static_cast<std::size_t>(r)] = w;
    for (int i = 1; i < s; ++i) {
        std::vector<double> next(static_cast<std::size_t>(q), 0.0);
        for (std::int64_t t = 0; t < q; ++t) {
            const double dt = D[static_cast<std::size_t>(t)];
            if (dt == 0.0)
                continue;
            for (auto [r, w] : support)
                next[static_cast<std::size_t>((t + r) % q)] += dt * w;
        }
        D.swap(next);
    }
    return D[static_cast<std::size_t>(mod(N, q))];
}

int gauss_level(std::int64_t p, int k)
{
    const int tau = valuation(k, p, 64);
    return p == 2 ? tau + 2 : tau + 1;
}

cplx s_prime_power(std::int64_t p, int l, std::int64_t N, double alpha, double y, int k, int s)
{
    check_prime(p);
    if (l < 0 || k < 1 || s < 1)
        throw DomainError("s_prime_power needs l >= 0, k >= 1, s >= 1");
    if (l == 0)
        return 1.0;
    const int gamma = gauss_level(p, k);
    const int g = std::min(l, gamma);
    // The sum over a = a0 + p^g t collapses to p^(l-g) [p^(l-g) | N] e(-a0 N / p^l).
    if (N != 0 && valuation(N, p, l) < l - g)
        return 0.0;
    const std::int64_t pg = ipow(p, g);

    // U_j(a) = sum over units c mod p^j of e(a c^k / p^j), j = 1..g.
    std::vector<std::vector<cplx>> U(static_cast<std::size_t>(g) + 1);
    for (int j = 1; j <= g; ++j) {
        const std::int64_t pj = ipow(p, j);
        std::vector<cplx> cnt(static_cast<std::size_t>(pj), cplx(0, 0));
        for (std::int64_t c = 1; c < pj; ++c)
            if (c % p != 0)
                cnt[static_cast<std::size_t>(powmod(c, k, pj))] += 1.0;
        U[static_cast<std::size_t>(j)] = dft_positive(cnt);
    }

    std::vector<double> mass(static_cast<std::size_t>(l) + 1);
    for (int v = 0; v <= l; ++v)
        mass[static_cast<std::size_t>(v)] = mu_mass(p, l, v, alpha, y);

    // e(-a0 N / p^l); when N != 0 we know p^(l-g) | N, so p^l <= N p^g.
    std::int64_t pl = 0, Nr = 0;
    if (N != 0) {
        pl = ipow(p, l);
        Nr = mod(N, pl);
    }
    cplx acc = 0;
    for (std::int64_t a0 = 1; a0 < pg; ++a0) {
        if (a0 % p == 0)
            continue;
        cplx F = mass[static_cast<std::size_t>(l)];
        for (int v = 0; v < l; ++v) {
            const double w = mass[static_cast<std::size_t>(v)];
            if (w == 0.0)
                continue;
            if (static_cast<std::int64_t>(v) * k >= l) {
                F += w * phi_pp(p, l - v);
                continue;
            }
            const int j = l - v * k;
            if (j > gamma)
                continue;  // complete sums over units vanish beyond the Gauss level
            const auto pj = ipow(p, j);
            F += w * phi_pp(p, l - v) / phi_pp(p, j) * U[static_cast<std::size_t>(j)][static_cast<std::size_t>(a0 % pj)];
        }
        const cplx phase = N == 0 ? cplx(1, 0) : e_frac(-mulmod(a0, Nr, pl), pl);
        acc += ipow_c(F, s) * phase;
    }
    return acc * std::pow(static_cast<double>(p), l - g);
}

BetaP beta_p(std::int64_t p, std::int64_t N, double alpha, double y, int k, int s, double tail_tol)
{
    check_prime(p);
    if (k < 1 || s < 1 || !(alpha > 0) || !(tail_tol > 0))
        throw DomainError("beta_p needs k, s >= 1, alpha > 0, tail_tol > 0");
    const double r = s * alpha / k;
    if (!(r > 1.1))
        throw DomainError("beta_p: s alpha / k = " + std::to_string(r) + " <= 1.1, the local series need not converge");
    const double expo = 1 - r + 0.1;
    const double lp = std::log(static_cast<double>(p));
    const int L = std::max(4, static_cast<int>(std::ceil(std::log(tail_tol) / (expo * lp))));
    BetaP out;
    if (N != 0) {
        out.levels = gauss_level(p, k) + valuation(N, p, 64);
        out.exact = true;
    } else {
        out.levels = std::min(L, 60);
        out.tail = std::exp((out.levels + 1) * expo * lp) / (1 - std::exp(expo * lp));
    }
    double total = 0;
    for (int l = 0; l <= out.levels; ++l) {
        const double t = s_prime_power(p, l, N, alpha, y, k, s).real();
        out.terms.push_back(t);
        total += t;
    }
    out.value = total;
    return out;
}

double beta_infty_closed(double alpha, int k, int s)
{
    if (!(alpha > 0) || k < 1 || s < 1)
        throw DomainError("beta_infty_closed needs alpha > 0, k >= 1, s >= 1");
    const double b = alpha / k;
    return std::exp(s * std::lgamma(b + 1) - std::lgamma(s * b));
}

BetaInftyNumeric beta_infty_numeric(double alpha, int k, int s, double Delta)
{
    if (!(alpha > 0) || k < 1 || s < 1)
        throw DomainError("beta_infty_numeric needs alpha > 0, k >= 1, s >= 1");
    const double r = s * alpha / k;
    if (!(r > 1))
        throw DomainError("beta_infty_numeric: s alpha / k <= 1, the integral diverges");
    if (!(Delta > 0) || Delta > 1e7)
        throw DomainError("beta_infty_numeric: Delta must lie in (0, 10^7]");
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    const PhiCheck phi(cplx(alpha, 0), k);
    const double h = std::min(0.25, 1.0 / s);
    CompensatedSum<double> re, im;
    for (double sign : {1.0, -1.0}) {
        for (double lo = 0; lo < Delta; lo += h) {
            const double hi = std::min(lo + h, Delta);
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            cplx panel = 0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                for (double sg : {-1.0, 1.0}) {
                    const double d = sign * (mid + sg * half * xs[j]);
                    panel += ws[j] * ipow_c(phi(d), s) * e1(-d);
                }
            }
            panel *= half;
            re.add(panel.real());
            im.add(panel.imag());
        }
    }
    return {re.value(), im.value(), std::pow(Delta, 1 - r), Delta};
}

SingularSeries singular_series_truncated(std::int64_t N, std::int64_t Q, double alpha, double y, int k, int s)
{
    if (Q < 1 || k < 1 || s < 1)
        throw DomainError("singular_series_truncated needs Q, k, s >= 1");
    if (Q > 10'000'000)
        throw ResourceError("singular_series_truncated: Q exceeds 10^7");
    const double r = s * alpha / k;
    if (!(r > 2.1))
        throw DomainError("singular_series_truncated: s alpha / k = " + std::to_string(r) +
                          " <= 2.1, the singular series need not converge");
    std::map<std::pair<std::int64_t, int>, cplx> cache;
    cplx total = 0;
    for (std::int64_t q = 1; q <= Q; ++q) {
        cplx term = 1.0;
        for (auto [p, m] : factorize(q)) {
            auto key = std::make_pair(p, m);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, s_prime_power(p, m, N, alpha, y, k, s)).first;
            term *= it->second;
            if (term == 0.0)
                break;
        }
        total += term;
    }
    return {total.real(), total.imag(), std::pow(static_cast<double>(Q), 2 - r + 0.1), Q};
}

// Exact arithmetic.

namespace {

i128 checked_mul(i128 a, i128 b)
{
    i128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw NumericError("exact identity check overflowed 128-bit integers");
    return r;
}

i128 checked_add(i128 a, i128 b)
{
    i128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw NumericError("exact identity check overflowed 128-bit integers");
    return r;
}

SurdInt operator+(SurdInt x, SurdInt y) { return {checked_add(x.A, y.A), checked_add(x.B, y.B)}; }

SurdInt scale(SurdInt x, i128 c) { return {checked_mul(x.A, c), checked_mul(x.B, c)}; }

SurdInt surd_mul(SurdInt x, SurdInt y, std::int64_t p)
{
    return {checked_add(checked_mul(x.A, y.A), checked_mul(checked_mul(x.B, y.B), p)),
            checked_add(checked_mul(x.A, y.B), checked_mul(x.B, y.A))};
}

i128 ipow128(i128 b, int e)
{
    i128 r = 1;
    for (int i = 0; i < e; ++i)
        r = checked_mul(r, b);
    return r;
}

// p^(v/2) as an element of Z[sqrt p].
SurdInt half_power(std::int64_t p, int v)
{
    const i128 c = ipow128(p, v / 2);
    return v % 2 == 0 ? SurdInt{c, 0} : SurdInt{0, c};
}

std::string fmt128(i128 v)
{
    if (v == 0)
        return "0";
    const bool neg = v < 0;
    u128 u = neg ? u128(0) - static_cast<u128>(v) : static_cast<u128>(v);
    std::string s;
    while (u > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    return neg ? "-" + s : s;
}

std::string fmt_surd(SurdInt x) { return fmt128(x.A) + " + " + fmt128(x.B) + " sqrt(p)"; }

// Cyclic convolution of Z[sqrt p]-valued vectors.
std::vector<SurdInt> convolve(const std::vector<SurdInt>& a, const std::vector<SurdInt>& b, std::int64_t p)
{
    const std::size_t n = a.size();
    std::vector<SurdInt> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == SurdInt{})
            continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (b[j] == SurdInt{})
                continue;
            auto& o = out[(i + j) % n];
            o = o + surd_mul(a[i], b[j], p);
        }
    }
    return out;
}

// Ramanujan sum c_{p^j}(n).
i128 ramanujan_pp(std::int64_t p, int j, std::int64_t n)
{
    if (j == 0)
        return 1;
    const std::int64_t pj = ipow(p, j), pj1 = pj / p;
    if (mod(n, pj) == 0)
        return pj - pj1;
    if (mod(n, pj1) == 0)
        return -pj1;
    return 0;
}

}  // namespace

ScaledMeasure scaled_measure(std::int64_t p, int m, ExactAlpha alpha, bool p_le_y)
{
    check_prime(p);
    if (m < 0 || m > 40)
        throw DomainError("scaled_measure needs 0 <= m <= 40");
    ScaledMeasure sm;
    sm.p = p;
    sm.m = m;
    sm.mass.assign(static_cast<std::size_t>(m) + 1, SurdInt{});
    if (m == 0) {
        sm.W = 1;
        sm.mass[0] = {1, 0};
        return sm;
    }
    const i128 pm = ipow128(p, m);
    if (!p_le_y) {
        sm.W = pm / p * (p - 1);
        sm.mass[0] = {1, 0};
        return sm;
    }
    if (alpha == ExactAlpha::One) {
        sm.W = pm;
        for (auto& x : sm.mass)
            x = {1, 0};
        return sm;
    }
    // alpha = 1/2: W = p^m (p - 1); W mu(v) = p^(v/2) (p - sqrt p) for v < m,
    // and (p - 1) p^(m/2) for v = m.
    sm.W = checked_mul(pm, p - 1);
    for (int v = 0; v < m; ++v)
        sm.mass[static_cast<std::size_t>(v)] = surd_mul(half_power(p, v), SurdInt{p, -1}, p);
    sm.mass[static_cast<std::size_t>(m)] = scale(half_power(p, m), p - 1);
    return sm;
}

IdentityCheck check_projection_exact(std::int64_t p, int m, ExactAlpha alpha, bool p_le_y)
{
    IdentityCheck res;
    const auto top = scaled_measure(p, m, alpha, p_le_y);
    const std::int64_t pm = ipow(p, m);
    for (int l = 0; l <= m; ++l) {
        const auto low = scaled_measure(p, m - l, alpha, p_le_y);
        if (top.W % low.W != 0) {
            res.ok = false;
            res.failure = "scale of p^(m-l) does not divide scale of p^m";
            return res;
        }
        const i128 ratio = top.W / low.W;
        const std::int64_t step = ipow(p, m - l), count = ipow(p, l);
        for (std::int64_t b = 0; b < pm; ++b) {
            SurdInt lhs{};
            for (std::int64_t u = 0; u < count; ++u)
                lhs = lhs + top.mass[static_cast<std::size_t>(valuation(mod(u * step + b, pm), p, m))];
            const SurdInt rhs = scale(low.mass[static_cast<std::size_t>(valuation(mod(b, step), p, m - l))], ratio);
            ++res.cases;
            if (!(lhs == rhs)) {
                res.ok = false;
                res.failure = "p=" + std::to_string(p) + " m=" + std::to_string(m) + " l=" + std::to_string(l) +
                              " b=" + std::to_string(b) + ": " + fmt_surd(lhs) + " != " + fmt_surd(rhs);
                return res;
            }
        }
    }
    return res;
}

IdentityCheck check_sq_mq_exact(std::int64_t p, int m, int k, int s_max, ExactAlpha alpha, bool p_le_y)
{
    if (k < 1 || s_max < 1 || m < 0)
        throw DomainError("check_sq_mq_exact needs k, s_max >= 1 and m >= 0");
    IdentityCheck res;
    const std::int64_t q = ipow(p, m);

    std::vector<ScaledMeasure> meas;
    std::vector<std::vector<SurdInt>> push(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) {
        meas.push_back(scaled_measure(p, j, alpha, p_le_y));
        const std::int64_t pj = ipow(p, j);
        auto& P = push[static_cast<std::size_t>(j)];
        P.assign(static_cast<std::size_t>(pj), SurdInt{});
        for (std::int64_t b = 0; b < pj; ++b) {
            auto& slot = P[static_cast<std::size_t>(powmod(b, k, pj))];
            slot = slot + meas.back().mass[static_cast<std::size_t>(valuation(b, p, j))];
        }
    }
    const i128 Wm = meas.back().W;
    auto D = push;  // D[j] = s-fold convolution power, starting at s = 1
    for (int s = 1; s <= s_max; ++s) {
        if (s > 1)
            for (int j = 0; j <= m; ++j)
                D[static_cast<std::size_t>(j)] = convolve(D[static_cast<std::size_t>(j)], push[static_cast<std::size_t>(j)], p);
        // W_m^s S(p^j) at every residue N mod p^j.
        std::vector<std::vector<SurdInt>> S(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j <= m; ++j) {
            const std::int64_t pj = ipow(p, j), pj1 = j == 0 ? 1 : pj / p;
            const i128 ratio = ipow128(Wm / meas[static_cast<std::size_t>(j)].W, s);
            const auto& Dj = D[static_cast<std::size_t>(j)];
            auto& Sj = S[static_cast<std::size_t>(j)];
            Sj.assign(static_cast<std::size_t>(pj), SurdInt{});
            for (std::int64_t N = 0; N < pj; ++N) {
                SurdInt acc{};
                // c_{p^j}(r - N) vanishes unless r = N mod p^(j-1).
                for (std::int64_t r = mod(N, pj1); r < pj; r += pj1)
                    acc = acc + scale(Dj[static_cast<std::size_t>(r)], ramanujan_pp(p, j, r - N));
                Sj[static_cast<std::size_t>(N)] = scale(acc, ratio);
            }
        }
        for (std::int64_t N = 0; N < q; ++N) {
            SurdInt lhs{};
            for (int j = 0; j <= m; ++j)
                lhs = lhs + S[static_cast<std::size_t>(j)][static_cast<std::size_t>(mod(N, ipow(p, j)))];
            const SurdInt rhs = scale(D[static_cast<std::size_t>(m)][static_cast<std::size_t>(N)], q);
            ++res.cases;
            if (!(lhs == rhs)) {
                res.ok = false;
                res.failure = "p=" + std::to_string(p) + " m=" + std::to_string(m) + " k=" + std::to_string(k) +
                              " s=" + std::to_string(s) + " N=" + std::to_string(N) + ": " + fmt_surd(lhs) +
                              " != " + fmt_surd(rhs);
                return res;
            }
        }
    }
    return res;
}

}  // namespace friable
