#include "friable/dioph.hpp"

#include "friable/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace friable {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int to_big(u128 v)
{
    cpp_int r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v);
    return r;
}

// |n/d - a/q| scaled by d: |n q - a d| / q, as an exact rational.
cpp_rational scaled_distance(const cpp_int& n, const cpp_int& d, std::int64_t a, std::int64_t q)
{
    cpp_int num = n * q - cpp_int(a) * d;
    if (num < 0)
        num = -num;
    return cpp_rational(num, cpp_int(q));
}

}  // namespace

Approximation rational_approx(double theta, std::int64_t Qmax)
{
    if (Qmax < 1)
        throw DomainError("rational_approx: Qmax must be at least 1");
    if (!std::isfinite(theta))
        throw DomainError("rational_approx: theta must be finite");
    const double t = theta - std::floor(theta);
    if (t == 0.0)
        return {0, 1, 0.0};
    const double half_gap = 0.5 / static_cast<double>(Qmax);
    if (t < half_gap)
        return {0, 1, t};
    if (1.0 - t < half_gap)
        return {0, 1, t - 1.0};

    // t = n / d exactly, d a power of two no larger than 2^117.
    int ex = 0;
    const double f = std::frexp(t, &ex);
    u128 n = static_cast<u128>(static_cast<std::uint64_t>(std::ldexp(f, 53)));
    int e = 53 - ex;
    while (e > 0 && (n & 1) == 0) {
        n >>= 1;
        --e;
    }
    const u128 d0 = u128(1) << e;
    const cpp_int N = to_big(n), D = to_big(d0);

    // Convergents h/k of n/d.
    u128 num = n, den = d0;
    std::int64_t h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    std::int64_t best_a = 0, best_q = 1;
    bool first = true;
    while (den != 0) {
        const u128 ai = num / den;
        const u128 rem = num % den;
        const u128 kq = ai * static_cast<u128>(k1) + static_cast<u128>(k2);
        if (!first && kq > static_cast<u128>(Qmax)) {
            const std::int64_t j = (Qmax - k2) / k1;
            best_a = h1;
            best_q = k1;
            if (j >= 1) {
                const std::int64_t sa = j * h1 + h2, sq = j * k1 + k2;
                const auto ds = scaled_distance(N, D, sa, sq);
                const auto dc = scaled_distance(N, D, h1, k1);
                if (ds < dc || (ds == dc && sq < k1)) {
                    best_a = sa;
                    best_q = sq;
                }
            }
            break;
        }
        const auto h = static_cast<std::int64_t>(ai * static_cast<u128>(h1) + static_cast<u128>(h2));
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = static_cast<std::int64_t>(kq);
        best_a = h1;
        best_q = k1;
        first = false;
        num = den;
        den = rem;
    }

    cpp_rational diff = cpp_rational(N, D) - cpp_rational(cpp_int(best_a), cpp_int(best_q));
    Approximation out;
    out.q = best_q;
    out.a = mod(best_a, best_q);
    out.delta = diff.convert_to<double>();
    return out;
}

double power_phase_norm(FixedPhase theta, std::int64_t m, int k)
{
    const auto am = static_cast<std::uint64_t>(m < 0 ? -m : m);
    FixedPhase p = theta.times(pow_wrap(am, k));
    if (m < 0 && (k & 1))
        p = -p;
    return p.norm();
}

VinogradovResult vinogradov_detect(const RecurrenceInstance& inst, const VinogradovConfig& cfg)
{
    if (!(inst.epsilon > 0 && inst.epsilon < 0.5) || !(inst.delta > 0 && inst.delta < 0.5))
        throw DomainError("vinogradov_detect: epsilon and delta must lie in (0, 1/2)");
    if (inst.M < 1 || inst.k < 1 || inst.k > 8)
        throw DomainError("vinogradov_detect: need M >= 1 and 1 <= k <= 8");
    const double Mk = std::pow(static_cast<double>(inst.M), inst.k);
    if (Mk >= 0x1p100)
        throw NumericError("vinogradov_detect: M^k too large for exact phase reduction");

    const auto theta = FixedPhase::from_double(inst.theta);
    VinogradovResult r;
    for (std::int64_t m = -inst.M; m <= inst.M; ++m)
        if (power_phase_norm(theta, m, inst.k) <= inst.epsilon)
            ++r.recurrence_count;
    r.precondition_met = static_cast<double>(r.recurrence_count) >= inst.delta * static_cast<double>(inst.M);
    r.threshold = cfg.slack * std::pow(inst.delta, -cfg.slack_delta_exponent) * inst.epsilon / Mk;
    const double lim = std::pow(inst.delta, -cfg.search_exponent);
    r.search_limit = lim >= static_cast<double>(cfg.search_cap) ? cfg.search_cap
                                                                : static_cast<std::int64_t>(std::floor(lim));
    if (!r.precondition_met)
        return r;
    for (std::int64_t q = 1; q <= r.search_limit; ++q) {
        const double nq = theta.times(static_cast<u128>(q)).norm();
        if (nq <= r.threshold) {
            r.q = q;
            r.q_theta_norm = nq;
            break;
        }
    }
    return r;
}

std::string to_string(SparseVerdict v)
{
    switch (v) {
    case SparseVerdict::FirstDisjunct:
        return "first";
    case SparseVerdict::SecondDisjunct:
        return "second";
    case SparseVerdict::Violation:
        return "violation";
    case SparseVerdict::PreconditionFailed:
        return "precondition";
    }
    return "unknown";
}

HostDensity estimate_host_density(const std::vector<std::int64_t>& A, std::int64_t M, std::int64_t L,
                                  int samples_per_length, std::uint64_t seed)
{
    if (A.empty() || M < 1 || L < 1 || L > M + 1)
        throw DomainError("estimate_host_density: need nonempty A and 1 <= L <= M + 1");
    std::vector<std::uint8_t> in(static_cast<std::size_t>(M + 1), 0);
    for (auto a : A) {
        if (a < M || a > 2 * M)
            throw DomainError("host set must lie in [M, 2M]");
        in[static_cast<std::size_t>(a - M)] = 1;
    }
    std::mt19937_64 rng(seed);
    HostDensity hd;
    hd.min_length = L;
    const double scale = static_cast<double>(M) / static_cast<double>(A.size());
    for (std::int64_t len = L;; len = std::min(2 * len, M + 1)) {
        const std::int64_t max_step = len > 1 ? M / (len - 1) : M;
        std::uniform_int_distribution<std::int64_t> step_dist(1, std::max<std::int64_t>(1, max_step));
        for (int i = 0; i < samples_per_length; ++i) {
            const std::int64_t d = step_dist(rng);
            const std::int64_t span = (len - 1) * d;
            std::uniform_int_distribution<std::int64_t> start_dist(0, M - span);
            const std::int64_t s = start_dist(rng);
            std::int64_t cnt = 0;
            for (std::int64_t j = 0; j < len; ++j)
                cnt += in[static_cast<std::size_t>(s + j * d)];
            hd.Delta = std::max(hd.Delta, static_cast<double>(cnt) * scale / static_cast<double>(len));
            ++hd.progressions;
        }
        if (len == M + 1)
            break;
    }
    return hd;
}

SparseReport sparse_vinogradov_check(const RecurrenceInstance& inst, double Delta, std::int64_t L,
                                     const SparseConfig& cfg, const HostDensity* density)
{
    if (!(inst.epsilon > 0 && inst.epsilon < 0.5) || !(inst.delta > 0 && inst.delta < 0.5))
        throw DomainError("sparse_vinogradov_check: epsilon and delta must lie in (0, 1/2)");
    if (inst.host_set.empty())
        throw DomainError("sparse_vinogradov_check: host set is empty");
    if (inst.k < 1 || inst.k > 8 || inst.M < 1 || L < 1 || L > inst.M || !(Delta >= 1))
        throw DomainError("sparse_vinogradov_check: need 1 <= k <= 8, 1 <= L <= M, Delta >= 1");

    SparseReport r;
    const double M = static_cast<double>(inst.M);
    const auto theta = FixedPhase::from_double(inst.theta);
    r.theta_norm = theta.norm();
    for (auto a : inst.host_set)
        if (a < inst.M || a > 2 * inst.M) {
            r.precondition = "host set leaves [M, 2M]";
            return r;
        }
    if (r.theta_norm > inst.epsilon / (static_cast<double>(L) * std::pow(M, inst.k - 1))) {
        r.precondition = "||theta|| exceeds eps / (L M^(k-1))";
        return r;
    }
    const HostDensity hd = density ? *density
                                   : estimate_host_density(inst.host_set, inst.M, L, cfg.samples_per_length, cfg.seed);
    r.measured_Delta = hd.Delta;
    if (hd.Delta > Delta) {
        r.precondition = "sampled progression density " + std::to_string(hd.Delta) + " exceeds Delta";
        return r;
    }
    for (auto a : inst.host_set)
        if (power_phase_norm(theta, a, inst.k) <= inst.epsilon)
            ++r.recurrence_count;
    if (static_cast<double>(r.recurrence_count) < inst.delta * static_cast<double>(inst.host_set.size())) {
        r.precondition = "fewer than delta |A| recurrent elements";
        return r;
    }
    const double Mk = std::pow(M, inst.k);
    const bool second = r.theta_norm <= cfg.second_constant * Delta * inst.epsilon / (inst.delta * Mk);
    const bool first = inst.epsilon >= inst.delta / (cfg.first_constant * Delta);
    r.verdict = second ? SparseVerdict::SecondDisjunct
                       : (first ? SparseVerdict::FirstDisjunct : SparseVerdict::Violation);
    return r;
}

ErdosTuranResult erdos_turan_check(const std::vector<double>& points, double lo, double length, int J)
{
    if (J < 1)
        throw DomainError("erdos_turan_check: J must be at least 1");
    if (!(length >= 0 && length <= 1))
        throw DomainError("erdos_turan_check: interval length must lie in [0, 1]");
    ErdosTuranResult r;
    const double N = static_cast<double>(points.size());
    for (double t : points) {
        double rel = t - lo;
        rel -= std::floor(rel);
        if (rel < length)
            ++r.count;
    }
    r.lhs = std::fabs(static_cast<double>(r.count) - N * length);
    double acc = 0;
    for (int j = 1; j <= J; ++j) {
        cplx s = 0;
        for (double t : points) {
            double v = static_cast<double>(j) * t;
            v -= std::floor(v);
            s += e1(v);
        }
        acc += std::abs(s) / j;
    }
    r.rhs = N / (J + 1) + 3 * acc;
    // Rounding slack only; the inequality itself is exact.
    r.holds = r.lhs <= r.rhs + 1e-9 * std::max(1.0, N);
    return r;
}

double bourgain_weight(double theta, double x, int k, std::int64_t Q, double Delta)
{
    if (Q < 1)
        throw DomainError("bourgain_weight: Q must be at least 1");
    const double X = std::pow(x, k);
    if (!(Delta <= 0.5) || !(Delta * X >= 1 - 1e-12))
        throw DomainError("bourgain_weight: need 1/x^k <= Delta <= 1/2");
    const double t = theta - std::floor(theta);
    CompensatedSum<double> total;
    for (std::int64_t q = 1; q <= Q; ++q) {
        const double qd = static_cast<double>(q);
        const auto a_lo = static_cast<std::int64_t>(std::ceil(qd * (t - Delta) - 1e-12));
        const auto a_hi = std::min(static_cast<std::int64_t>(std::floor(qd * (t + Delta) + 1e-12)), a_lo + q - 1);
        double inner = 0;
        for (std::int64_t a = a_lo; a <= a_hi; ++a) {
            double dist = std::fabs(t - static_cast<double>(a) / qd);
            dist = std::fabs(dist - std::round(dist));
            if (dist <= Delta)
                inner += 1.0 / (1.0 + X * dist);
        }
        total.add(inner / qd);
    }
    return total.value();
}

}  // namespace friable
