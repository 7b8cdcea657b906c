// Acceptance run: one PASS/FAIL line per criterion, measured values alongside.
// Exit status is nonzero when any criterion fails.

#include "friable/characters.hpp"
#include "friable/circle.hpp"
#include "friable/core.hpp"
#include "friable/dioph.hpp"
#include "friable/errors.hpp"
#include "friable/local_factors.hpp"
#include "friable/weyl.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

using namespace friable;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::int64_t> prime_powers_upto(std::int64_t bound)
{
    std::vector<std::int64_t> out;
    for (std::int64_t n = 2; n <= bound; ++n)
        if (factorize(n).size() == 1)
            out.push_back(n);
    return out;
}

// Least-squares slope of log t against log d.
double loglog_slope(const std::vector<double>& d, const std::vector<double>& t)
{
    const double n = static_cast<double>(d.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double lx = std::log(d[i]), ly = std::log(t[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Sum over t of #{s-tuples with n_1^k + ... + n_s^k = t}^2, listing every tuple.
std::uint64_t brute_moment(const std::vector<std::uint64_t>& support, int k, int s)
{
    std::vector<std::uint64_t> pw;
    for (auto n : support)
        pw.push_back(oracle::ipow(n, k));
    std::vector<std::uint64_t> sums{0};
    for (int i = 0; i < s; ++i) {
        std::vector<std::uint64_t> next;
        next.reserve(sums.size() * pw.size());
        for (auto t : sums)
            for (auto v : pw)
                next.push_back(t + v);
        sums.swap(next);
    }
    std::sort(sums.begin(), sums.end());
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < sums.size();) {
        std::size_t j = i;
        while (j < sums.size() && sums[j] == sums[i])
            ++j;
        total += (j - i) * (j - i);
        i = j;
    }
    return total;
}

Outcome criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::int64_t proj = 0, sq = 0;
    std::string failure;
    for (auto q : prime_powers_upto(243)) {
        const auto [p, m] = factorize(q).front();
        for (auto alpha : {ExactAlpha::One, ExactAlpha::Half})
            for (bool le : {true, false}) {
                const auto r = check_projection_exact(p, m, alpha, le);
                proj += r.cases;
                if (!r.ok && failure.empty())
                    failure = "projection " + r.failure;
                for (int k = 1; k <= 3; ++k) {
                    const auto c = check_sq_mq_exact(p, m, k, 4, alpha, le);
                    sq += c.cases;
                    if (!c.ok && failure.empty())
                        failure = "S/M " + c.failure;
                }
            }
    }
    const double secs = seconds_since(t0);
    o.pass = failure.empty() && secs < 60;
    std::ostringstream os;
    os << proj << " projection cases, " << sq << " sum_{d|q} S(d) = q M(q) cases, " << secs << " s (limit 60)";
    if (!failure.empty())
        os << "; first failure: " << failure;
    o.detail = os.str();
    return o;
}

Outcome criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::int64_t cases = 0;
    for (std::int64_t q = 1; q <= 200; ++q)
        for (int k = 1; k <= 3; ++k)
            for (double alpha : {0.6, 0.8, 1.0})
                for (double y : {5.0, 50.0, kInf})
                    for (std::int64_t a = 0; a < q; ++a) {
                        if (std::gcd(a, q) != 1)
                            continue;
                        worst = std::max(worst, std::abs(h_aq(a, q, alpha, y, k) - s_xy_qa(q, a, alpha, y, k)));
                        ++cases;
                    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << cases << " cases, max |H - S| = " << worst << " (tol 1e-9), " << secs << " s (limit 120)";
    return {worst <= 1e-9 && secs < 120, os.str()};
}

Outcome criterion3()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst_rel = 0;
    int slope_ok = 0, slope_total = 0, unmeasured = 0;
    std::ostringstream fits;
    for (double alpha : {0.7, 0.85, 1.0})
        for (int k = 1; k <= 3; ++k)
            for (int mult : {4, 5, 6}) {
                const int s = mult * k;
                const double closed = beta_infty_closed(alpha, k, s);
                const auto far = beta_infty_numeric(alpha, k, s, 1e4);
                worst_rel = std::max(worst_rel, std::fabs(far.value / closed - 1));

                // Integer cutoffs keep e(Delta) = 1, so the tail has no oscillating phase.
                std::vector<double> ds, ts;
                for (double D = 4; D <= 1024; D *= 2) {
                    const double tail = std::fabs(beta_infty_numeric(alpha, k, s, D).value - closed);
                    if (tail >= 1e-12) {
                        ds.push_back(D);
                        ts.push_back(tail);
                    }
                }
                if (ds.size() < 3) {
                    ++unmeasured;
                    continue;
                }
                ++slope_total;
                const double want = 1 - s * alpha / k;
                const double got = loglog_slope(ds, ts);
                const bool ok = std::fabs(got / want - 1) <= 0.2;
                slope_ok += ok;
                if (!ok)
                    fits << " (a=" << alpha << ",k=" << k << ",s=" << s << ": " << got << " vs " << want << ")";
            }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os.precision(4);
    os << "max rel |numeric(1e4)/closed - 1| = " << worst_rel << " (tol 1e-6); tail slope within 20% of "
       << "1 - s alpha/k at " << slope_ok << "/" << slope_total << " grid points (" << unmeasured
       << " below 1e-12 throughout), " << secs << " s";
    if (slope_ok != slope_total)
        os << "; off:" << fits.str();
    return {worst_rel <= 1e-6 && slope_ok == slope_total, os.str()};
}

Outcome criterion4()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::int64_t instances = 0, mismatches = 0;
    std::string first;
    // Distinct friable sets with Psi <= 60 and x <= 1000: x a y-friable integer, y a prime.
    for (auto p : oracle::primes(60)) {
        const auto support = oracle::friables(1000, static_cast<std::uint64_t>(p));
        for (std::size_t i = 0; i < support.size() && i < 60; ++i) {
            const auto x = support[i];
            if (x < static_cast<std::uint64_t>(p))
                continue;
            const std::vector<std::uint64_t> sub(support.begin(), support.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            const auto params = FriableParams::make(static_cast<double>(x), static_cast<double>(p));
            for (int k = 1; k <= 3; ++k)
                for (int s = 1; s <= 3; ++s) {
                    ++instances;
                    if (moment_exact(params, k, s) != BigInt(brute_moment(sub, k, s))) {
                        ++mismatches;
                        if (first.empty())
                            first = "x=" + std::to_string(x) + " y=" + std::to_string(p) + " k=" +
                                    std::to_string(k) + " s=" + std::to_string(s);
                    }
                }
        }
    }
    std::mt19937_64 rng(404);
    int coeff_ok = 0, nonzero = 0;
    for (int t = 0; t < 50; ++t) {
        const int k = 1 + static_cast<int>(rng() % 2);
        const int s = 1 + static_cast<int>(rng() % 3);
        const std::uint64_t x = 2 + rng() % 59;
        const std::uint64_t y = 2 + rng() % (x - 1);
        std::uint64_t N = 0;
        if (t % 2 == 0) {
            // Planted: a sum of s friable k-th powers.
            const auto sup = oracle::friables(x, y);
            for (int i = 0; i < s; ++i)
                N += oracle::ipow(sup[rng() % sup.size()], k);
        } else {
            N = 1 + rng() % (s * oracle::ipow(x, k));
        }
        const auto params = FriableParams::make(static_cast<double>(x), static_cast<double>(y));
        const auto c = count_exact(make_query(N, k, s, static_cast<double>(y), static_cast<double>(x)));
        coeff_ok += representation_coefficient(params, k, s, N) == c;
        nonzero += c != 0;
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << instances << " moment instances (x <= 1000), " << mismatches << " mismatches; coefficient = count on "
       << coeff_ok << "/50 (" << nonzero << " nonzero), " << secs << " s";
    if (!first.empty())
        os << "; first mismatch " << first;
    return {mismatches == 0 && coeff_ok == 50, os.str()};
}

Outcome criterion5()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<FriableParams> lin, sq;
    for (double x : {200.0, 400.0, 800.0}) {
        lin.push_back(FriableParams::make(x, 20));
        sq.push_back(FriableParams::make(x, x));
    }
    const auto a = moment_scaling_report(lin, 1, {2});
    const auto b = moment_scaling_report(sq, 2, {3});
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "spread (k=1,s=2,y=20) = " << a.spread[0] << ", spread (k=2,s=3,y=x) = " << b.spread[0] << " (band 3), ratios";
    for (const auto* r : {&a, &b})
        for (const auto& row : r->rows)
            os << " " << row.normalized_ratio;
    os << ", " << secs << " s (limit 600)";
    return {a.spread[0] <= 3 && b.spread[0] <= 3 && secs < 600, os.str()};
}

Outcome criterion6()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto params = FriableParams::make(1e5, 1e3);
    const auto saddle = saddle_alpha(params);
    const double P = static_cast<double>(psi(params));
    double worst[3] = {0, 0, 0};
    std::int64_t points = 0;
    for (int k = 1; k <= 2; ++k) {
        const WeylEvaluator eval(params, k);
        const double xk = std::pow(1e5, k);
        for (std::int64_t q = 1; q <= 5; ++q)
            for (std::int64_t a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1)
                    continue;
                for (int j = -20; j <= 20; ++j) {
                    const auto phase = make_phase(a, q, 0.25 * j / xk, 1e5, k);
                    const cplx E = eval(phase.fixed());
                    const cplx main = major_arc_main_term(params, k, phase, saddle);
                    worst[k] = std::max(worst[k], std::abs(E - main) / P);
                    ++points;
                }
            }
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << points << " phases, max |E/Psi - PhiCheck H| = " << worst[1] << " (k=1), " << worst[2]
       << " (k=2), tol 0.2, " << secs << " s (limit 300)";
    return {worst[1] <= 0.2 && worst[2] <= 0.2 && secs < 300, os.str()};
}

Outcome criterion7()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = minor_arc_decay(FriableParams::make(1e4, 100), 2, {5, 10, 20, 40}, 16384);
    std::ostringstream os;
    os << "sup |E|/Psi =";
    for (const auto& r : d.reports)
        os << " " << r.sup << " (Q=" << r.Q << ")";
    os << ", c_hat = " << d.c_hat << ", " << seconds_since(t0) << " s";
    return {d.strictly_decreasing && d.c_hat > 0, os.str()};
}

Outcome criterion8()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = predict(make_query(10'000, 2, 5, 50), 100);
    const auto b = predict(make_query(10'000, 1, 3, 30), 100);
    const double secs = seconds_since(t0);
    const bool have = a.ratio && b.ratio;
    const double ra = a.ratio.value_or(0), rb = b.ratio.value_or(0);
    std::ostringstream os;
    os << "exact/predicted = " << ra << " (N=1e4,k=2,s=5,y=50; band [1/3,3]), " << rb
       << " (N=1e4,k=1,s=3,y=30; band [1/2,2]), " << secs << " s (limit 600)";
    return {have && ra >= 1.0 / 3 && ra <= 3 && rb >= 0.5 && rb <= 2 && secs < 600, os.str()};
}

Outcome criterion9()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::int64_t checks = 0, chars = 0;
    std::string first;
    for (std::int64_t q = 1; q <= 500; ++q) {
        const CharacterGroup group(q);
        for (std::int64_t i = 0; i < group.size(); ++i) {
            const auto chi = group.character(i);
            const auto cond = conductor(chi);
            ++chars;
            for (int k = 1; k <= 4; ++k) {
                const auto G = gauss_sums_all(chi, k);
                for (std::int64_t a = 1; a <= q; ++a) {
                    const double g = std::abs(G[static_cast<std::size_t>(a % q)]);
                    const double bound = gauss_sum_bound(q, a, cond, k);
                    worst = std::max(worst, g / bound);
                    ++checks;
                    if (g > bound + 1e-8 * static_cast<double>(q) && first.empty())
                        first = "q=" + std::to_string(q) + " a=" + std::to_string(a) + " k=" + std::to_string(k);
                }
            }
        }
    }
    std::ostringstream os;
    os << chars << " characters, " << checks << " (chi, k, a) checks, max |G|/bound = " << worst << ", "
       << seconds_since(t0) << " s";
    if (!first.empty())
        os << "; first violation " << first;
    return {first.empty(), os.str()};
}

Outcome criterion10()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0, 1);

    int et_ok = 0;
    double et_margin = kInf;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> pts(10 + rng() % 1000);
        for (auto& p : pts)
            p = (t % 3 == 0) ? std::fmod(static_cast<double>(&p - pts.data()) * std::numbers::phi, 1.0) : u(rng);
        const int J = 1 + static_cast<int>(rng() % 50);
        const auto r = erdos_turan_check(pts, u(rng), u(rng), J);
        et_ok += r.holds;
        et_margin = std::min(et_margin, r.rhs - r.lhs);
    }

    VinogradovConfig cfg;
    cfg.slack_delta_exponent = 3;
    int vin_ok = 0;
    for (int t = 0; t < 100; ++t) {
        const std::int64_t q0 = 1 + static_cast<std::int64_t>(rng() % 50);
        std::int64_t a0 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q0));
        while (std::gcd(a0, q0) != 1)
            a0 = (a0 + 1) % q0;
        const std::int64_t M = (rng() % 2) ? 100 : 1000;
        const int k = 1 + static_cast<int>(rng() % 3);
        const double eps = 1e-6;
        const double eta = (2 * u(rng) - 1) * eps / std::pow(static_cast<double>(M), k);
        RecurrenceInstance inst{static_cast<double>(a0) / static_cast<double>(q0) + eta, k, M, eps, 0.49, {}};
        // Recurrence is measured; delta is set just under the measured share.
        const auto probe = vinogradov_detect(inst, cfg);
        inst.delta = std::min(0.49, (1 - 1e-12) * static_cast<double>(probe.recurrence_count) / static_cast<double>(M));
        const auto r = vinogradov_detect(inst, cfg);
        vin_ok += r.precondition_met && r.q && *r.q % q0 == 0;
    }

    // Spacing sums over Kronecker sets {r phi} and random 1/X-separated sets.
    const double x = 1e4;
    const int k = 2;
    const double X = x * x;
    double worst_offdiag = 0, C_max = 0;
    bool first_term_dominant = true;
    int sets = 0;
    for (int R : {50, 200})
        for (std::int64_t Q : {10, 20, 40})
            for (double Delta : {static_cast<double>(Q) / X, 1e-3})
                for (int kind = 0; kind < 2; ++kind) {
                    std::vector<double> th;
                    while (static_cast<int>(th.size()) < R) {
                        const double c = kind == 0 ? std::fmod((th.size() + 1) * std::numbers::phi, 1.0) : u(rng);
                        bool spaced = true;
                        for (double t : th) {
                            const double d = std::fabs(c - t);
                            spaced = spaced && std::min(d, 1 - d) >= 1 / X;
                        }
                        if (spaced)
                            th.push_back(c);
                    }
                    double total = 0, diag = 0;
                    for (int r = 0; r < R; ++r)
                        for (int s = 0; s < R; ++s) {
                            const double g = bourgain_weight(th[r] - th[s], x, k, Q, Delta);
                            total += g;
                            diag += r == s ? g : 0;
                        }
                    const double Rd = R, Qd = static_cast<double>(Q);
                    const double t1 = Rd * std::pow(Qd, 0.1), t2 = Rd * Rd * Qd / X, t3 = Rd * Rd * std::pow(Qd, -5);
                    first_term_dominant = first_term_dominant && t1 > t2 && t1 > t3;
                    C_max = std::max(C_max, total / ((t1 + t2 + t3) * std::log1p(Delta * X)));
                    worst_offdiag = std::max(worst_offdiag, total / diag - 1);
                    ++sets;
                }

    std::ostringstream os;
    os << "Erdos-Turan " << et_ok << "/1000 (min rhs - lhs " << et_margin << "); Vinogradov " << vin_ok
       << "/100; Bourgain " << sets << " sets, max off-diagonal/diagonal " << worst_offdiag << ", fitted C "
       << C_max << ", " << seconds_since(t0) << " s";
    return {et_ok == 1000 && vin_ok == 100 && first_term_dominant && worst_offdiag <= 1 && C_max <= 10, os.str()};
}

Outcome criterion11()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::int64_t bad_psi = 0;
    for (int n = 2; n <= 10'000; ++n) {
        for (double x : {static_cast<double>(n), n + 0.5}) {
            if (x > 1e4)
                continue;
            if (psi(FriableParams::make(x, x)) != static_cast<std::uint64_t>(std::floor(x)))
                ++bad_psi;
        }
    }
    double worst_res = 0, worst_alpha = 0, ht_lo = kInf, ht_hi = 0;
    for (double x : {1e3, 1e4, 1e5, 1e6, 1e7})
        for (double y : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
            const auto p = FriableParams::make(x, y);
            const auto sd = saddle_alpha(p);
            worst_res = std::max(worst_res, std::fabs(sd.residual));
            worst_alpha = std::max(worst_alpha, std::fabs(sd.alpha - oracle::saddle_bisection(x, y)));
            const double r = ht_estimate(p, sd) / static_cast<double>(psi(p));
            ht_lo = std::min(ht_lo, r);
            ht_hi = std::max(ht_hi, r);
        }
    std::ostringstream os;
    os << "Psi(x,x) != floor(x) at " << bad_psi << " points; saddle residual max " << worst_res
       << ", |alpha - bisection| max " << worst_alpha << "; ht/Psi in [" << ht_lo << ", " << ht_hi << "], "
       << seconds_since(t0) << " s";
    return {bad_psi == 0 && worst_res <= 1e-10 && worst_alpha <= 1e-9 && ht_lo >= 0.7 && ht_hi <= 1.4, os.str()};
}

}  // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
