#include "friable/core.hpp"

#include "friable/characters.hpp"
#include "friable/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace friable {

namespace {

Limits make_limits()
{
    Limits l;
    if (const char* env = std::getenv("FRIABLE_MEMORY_BUDGET")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v >= 1)
            l.sieve_limit = static_cast<std::uint64_t>(v);
    }
    return l;
}

std::mutex g_cache_mutex;

std::shared_ptr<const SpfSieve> shared_sieve(std::uint64_t limit)
{
    static std::shared_ptr<const SpfSieve> cached;
    std::lock_guard lock(g_cache_mutex);
    if (!cached || cached->limit() < limit)
        cached = std::make_shared<const SpfSieve>(std::max<std::uint64_t>(limit, 1024));
    return cached;
}

// Friability flags for 0..X from the smallest-prime-factor table.
std::vector<std::uint8_t> friable_flags(const SpfSieve& sieve, std::uint64_t X, double y)
{
    std::vector<std::uint8_t> flag(X + 1, 0);
    if (X >= 1)
        flag[1] = 1;
    for (std::uint64_t n = 2; n <= X; ++n) {
        const std::uint32_t p = sieve[n];
        flag[n] = static_cast<double>(p) <= y && flag[n / p];
    }
    return flag;
}

template <class Emit>
void lattice_walk(const std::vector<std::int64_t>& primes, std::uint64_t X, Emit&& emit)
{
    // Each friable integer is produced once as a non-decreasing product of primes.
    struct Frame {
        std::uint64_t value;
        std::size_t next;
    };
    std::vector<Frame> stack{{1, 0}};
    while (!stack.empty()) {
        auto [v, i] = stack.back();
        stack.pop_back();
        emit(v);
        for (std::size_t j = i; j < primes.size(); ++j) {
            const auto p = static_cast<std::uint64_t>(primes[j]);
            if (v > X / p)
                break;
            stack.push_back({v * p, j});
        }
    }
}

EnumerationStrategy choose_strategy(std::uint64_t X, double y, EnumerationStrategy requested)
{
    const auto& lim = limits();
    if (requested == EnumerationStrategy::Sieve) {
        if (X > lim.sieve_limit)
            throw ResourceError("sieve strategy: x = " + std::to_string(X) + " exceeds sieve limit " +
                                std::to_string(lim.sieve_limit));
        return requested;
    }
    if (requested == EnumerationStrategy::Lattice)
        return requested;
    if (y <= lim.lattice_y_limit && (X > 1'000'000 || X > lim.sieve_limit))
        return EnumerationStrategy::Lattice;
    if (X <= lim.sieve_limit)
        return EnumerationStrategy::Sieve;
    throw ResourceError("enumeration infeasible: x = " + std::to_string(X) + " exceeds sieve limit " +
                        std::to_string(lim.sieve_limit) + " and y = " + std::to_string(y) +
                        " exceeds lattice limit " + std::to_string(lim.lattice_y_limit));
}

std::uint64_t to_floor(double x)
{
    if (!(x >= 1))
        return 0;
    if (x >= 1.8e19)
        throw ResourceError("x too large for 64-bit enumeration");
    return static_cast<std::uint64_t>(std::floor(x));
}

}  // namespace

Limits& limits()
{
    static Limits l = make_limits();
    return l;
}

FriableParams FriableParams::make(double x, double y)
{
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DomainError("x and y must be finite");
    if (y < 2)
        throw DomainError("y must be at least 2");
    if (y > x)
        throw DomainError("y must not exceed x");
    return {x, y};
}

double FriableParams::u() const { return std::log(x) / std::log(y); }

std::uint64_t FriableParams::floor_x() const { return to_floor(x); }

AsymptoticScales asymptotic_scales(const FriableParams& params, double eps)
{
    AsymptoticScales s;
    const double lx = std::log(params.x);
    const double ly = std::log(params.y);
    s.u = lx / ly;
    s.u_y = 1.0 / std::min(1.0 / s.u, std::log1p(s.u) / ly);
    s.H_u = std::exp(s.u / std::pow(std::log1p(s.u), 2));
    s.Y = std::min(params.y, std::exp(std::sqrt(lx)));
    s.Y_eps = std::exp(std::pow(ly, 0.6 - eps));
    s.T_eps = std::min(std::exp(std::pow(ly, 1.5 - eps)), s.H_u);
    return s;
}

SpfSieve::SpfSieve(std::uint64_t limit)
{
    if (limit < 1)
        throw DomainError("sieve limit must be at least 1");
    if (limit > limits().sieve_limit)
        throw ResourceError("sieve limit " + std::to_string(limit) + " exceeds memory cap " +
                            std::to_string(limits().sieve_limit));
    spf_.assign(limit + 1, 0);
    spf_[1] = kUnit;
    std::vector<std::uint32_t> primes;
    for (std::uint64_t n = 2; n <= limit; ++n) {
        if (spf_[n] == 0) {
            spf_[n] = static_cast<std::uint32_t>(n);
            primes.push_back(static_cast<std::uint32_t>(n));
        }
        for (std::uint32_t p : primes) {
            if (p > spf_[n] || static_cast<std::uint64_t>(p) * n > limit)
                break;
            spf_[p * n] = p;
        }
    }
}

std::shared_ptr<const std::vector<std::int64_t>> primes_up_to(double y)
{
    static std::map<std::int64_t, std::shared_ptr<const std::vector<std::int64_t>>> cache;
    const auto Y = static_cast<std::int64_t>(std::floor(std::max(y, 0.0)));
    if (static_cast<std::uint64_t>(Y) > limits().sieve_limit)
        throw ResourceError("prime bound " + std::to_string(Y) + " exceeds sieve limit");
    std::lock_guard lock(g_cache_mutex);
    if (auto it = cache.find(Y); it != cache.end())
        return it->second;
    std::vector<std::uint8_t> composite(static_cast<std::size_t>(std::max<std::int64_t>(Y, 1) + 1), 0);
    auto out = std::make_shared<std::vector<std::int64_t>>();
    for (std::int64_t n = 2; n <= Y; ++n) {
        if (composite[n])
            continue;
        out->push_back(n);
        for (std::int64_t m = n * n; m <= Y; m += n)
            composite[m] = 1;
    }
    cache.emplace(Y, out);
    return out;
}

std::vector<std::uint64_t> enumerate_friable_raw(double x, double y, EnumerationStrategy strategy)
{
    const std::uint64_t X = to_floor(x);
    std::vector<std::uint64_t> out;
    if (X == 0)
        return out;
    if (choose_strategy(X, y, strategy) == EnumerationStrategy::Sieve) {
        const auto sieve = shared_sieve(X);
        const auto flag = friable_flags(*sieve, X, y);
        for (std::uint64_t n = 1; n <= X; ++n)
            if (flag[n])
                out.push_back(n);
        return out;
    }
    const auto primes = primes_up_to(std::min(y, static_cast<double>(X)));
    const auto cap = limits().max_enumerated;
    lattice_walk(*primes, X, [&](std::uint64_t v) {
        if (out.size() >= cap)
            throw ResourceError("lattice enumeration exceeded " + std::to_string(cap) + " elements");
        out.push_back(v);
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> enumerate_friable(const FriableParams& params, EnumerationStrategy strategy)
{
    return enumerate_friable_raw(params.x, params.y, strategy);
}

std::uint64_t psi_raw(double x, double y)
{
    const std::uint64_t X = to_floor(x);
    if (X == 0)
        return 0;
    if (choose_strategy(X, y, EnumerationStrategy::Auto) == EnumerationStrategy::Sieve) {
        const auto sieve = shared_sieve(X);
        const auto flag = friable_flags(*sieve, X, y);
        return static_cast<std::uint64_t>(std::count(flag.begin() + 1, flag.end(), std::uint8_t{1}));
    }
    std::uint64_t count = 0;
    lattice_walk(*primes_up_to(std::min(y, static_cast<double>(X))), X, [&](std::uint64_t) { ++count; });
    return count;
}

std::uint64_t psi(const FriableParams& params) { return psi_raw(params.x, params.y); }

cplx psi_char(const FriableParams& params, const DirichletCharacter& chi)
{
    const auto q = static_cast<std::uint64_t>(chi.modulus());
    std::complex<long double> acc = 0;
    for (auto n : enumerate_friable(params))
        acc += std::complex<long double>(chi(static_cast<std::int64_t>(n % q)));
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

double saddle_sum(double alpha, double y)
{
    const auto primes = primes_up_to(y);
    CompensatedSum<double> acc;
    // Terms decrease with p; small ones first.
    for (auto it = primes->rbegin(); it != primes->rend(); ++it) {
        const double lp = std::log(static_cast<double>(*it));
        acc.add(lp / std::expm1(alpha * lp));
    }
    return acc.value();
}

namespace {

struct SaddleTerms {
    double f;       // saddle_sum - log x
    double sigma2;  // -d/dalpha saddle_sum
};

SaddleTerms saddle_terms(double alpha, const std::vector<std::int64_t>& primes, double log_x)
{
    CompensatedSum<double> sum, s2;
    for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
        const double lp = std::log(static_cast<double>(*it));
        const double em = std::expm1(alpha * lp);
        sum.add(lp / em);
        s2.add(lp * lp * (em + 1.0) / (em * em));
    }
    return {sum.value() - log_x, s2.value()};
}

}  // namespace

SaddleData saddle_alpha(const FriableParams& params, double tol)
{
    if (!(tol > 0))
        throw DomainError("saddle tolerance must be positive");
    const auto primes = primes_up_to(params.y);
    if (primes->empty())
        throw DomainError("saddle point needs y >= 2");
    const double log_x = std::log(params.x);

    double lo = 0.5, hi = 1.0;
    while (saddle_terms(hi, *primes, log_x).f > 0) {
        lo = hi;
        hi *= 2;
        if (hi > 1e3)
            throw NumericError("saddle: no upper bracket");
    }
    while (saddle_terms(lo, *primes, log_x).f < 0) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-15)
            throw NumericError("saddle: no lower bracket");
    }

    const double ly = std::log(params.y);
    double alpha = std::log1p(params.y / log_x) / ly;
    if (!(alpha > lo && alpha < hi))
        alpha = 0.5 * (lo + hi);

    SaddleData out;
    for (int it = 1; it <= 200; ++it) {
        const auto t = saddle_terms(alpha, *primes, log_x);
        if (t.f > 0)
            lo = alpha;
        else
            hi = alpha;
        if (std::fabs(t.f) <= tol || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
            out.alpha = alpha;
            out.sigma2 = t.sigma2;
            out.residual = t.f;
            out.iterations = it;
            out.zeta_alpha_y = zeta_partial(alpha, params.y);
            if (std::fabs(t.f) > tol)
                throw NumericError("saddle: bracket collapsed at alpha=" + std::to_string(alpha) +
                                   " with residual " + std::to_string(t.f));
            return out;
        }
        double next = alpha + t.f / t.sigma2;  // Newton on f' = -sigma2
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        alpha = next;
    }
    throw NumericError("saddle: no convergence, bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double zeta_partial(double s, double y)
{
    if (!(s > 0))
        throw DomainError("zeta_partial requires s > 0");
    const auto primes = primes_up_to(y);
    CompensatedSum<double> acc;
    for (auto it = primes->rbegin(); it != primes->rend(); ++it)
        acc.add(-std::log1p(-std::exp(-s * std::log(static_cast<double>(*it)))));
    return std::exp(acc.value());
}

DickmanTable::DickmanTable(double u_max, double grid_step) : step_(grid_step)
{
    if (!(grid_step > 0) || !(u_max >= 1))
        throw DomainError("Dickman table needs grid_step > 0 and u_max >= 1");
    const double per_unit = 1.0 / grid_step;
    const auto n1 = static_cast<std::size_t>(std::llround(per_unit));
    if (std::fabs(per_unit - static_cast<double>(n1)) > 1e-9 * per_unit)
        throw DomainError("Dickman grid step must divide 1");
    const auto n = static_cast<std::size_t>(std::ceil(u_max * static_cast<double>(n1) - 1e-9));
    values_.assign(n + 1, 1.0);
    // Trapezoid rule on the integrated form u rho(u) = int_{u-1}^u rho(t) dt.
    // Every weight is positive, so the table keeps its relative accuracy (and
    // its sign) far out where rho is ~1e-30; marching on rho' directly does not.
    // window = sum of values_[i - n1 + 1 .. i - 1], refreshed exactly every 64 steps.
    double window = 0;
    for (std::size_t i = n1 + 1; i <= n; ++i) {
        if ((i - n1 - 1) % 64 == 0) {
            window = 0;
            for (std::size_t j = i - 1; j > i - n1; --j)
                window += values_[j];
        } else {
            window += values_[i - 1] - values_[i - n1];
        }
        const double u = static_cast<double>(i) * step_;
        values_[i] = step_ * (0.5 * values_[i - n1] + window) / (u - 0.5 * step_);
    }
}

double DickmanTable::operator()(double u) const
{
    if (!(u >= 0) || u > u_max() * (1 + 1e-12))
        throw DomainError("dickman_rho: u outside table range");
    const double pos = u / step_;
    const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double t = pos - static_cast<double>(i);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double dickman_rho(double u, const DickmanTable& table) { return table(u); }

double ht_estimate(const FriableParams& params, const SaddleData& saddle)
{
    const double a = saddle.alpha;
    const double log_val = a * std::log(params.x) + std::log(saddle.zeta_alpha_y) - std::log(a) -
                           0.5 * std::log(2 * std::numbers::pi * saddle.sigma2);
    return std::exp(log_val);
}

double ht_estimate(const FriableParams& params) { return ht_estimate(params, saddle_alpha(params)); }

}  // namespace friable
