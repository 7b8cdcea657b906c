#include "friable/weyl.hpp"

#include "friable/dioph.hpp"
#include "friable/errors.hpp"
#include "friable/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace friable {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

void check_weyl_degree(int k)
{
    if (k < 1 || k > 8)
        throw DomainError("Weyl sums need 1 <= k <= 8, got " + std::to_string(k));
}

}  // namespace

FixedPhase RationalPhase::fixed() const { return FixedPhase::from_rational(a, q) + FixedPhase::from_double(delta); }

RationalPhase make_phase(std::int64_t a, std::int64_t q, double delta, double x, int k)
{
    if (q < 1 || a < 0 || a >= q)
        throw DomainError("phase needs q >= 1 and 0 <= a < q");
    if (std::gcd(a, q) != 1)
        throw DomainError("phase needs gcd(a, q) = 1");
    RationalPhase ph;
    ph.a = a;
    ph.q = q;
    ph.delta = delta;
    ph.theta = ph.fixed().fraction();
    ph.height = static_cast<double>(q) * (1.0 + std::fabs(delta) * std::pow(x, k));
    return ph;
}

RationalPhase rational_decompose(double theta, double x, int k, std::int64_t Qmax)
{
    const auto ap = rational_approx(theta, Qmax);
    auto ph = make_phase(ap.a, ap.q, ap.delta, x, k);
    ph.theta = theta - std::floor(theta);
    return ph;
}

WeylEvaluator::WeylEvaluator(const FriableParams& params, int k) : WeylEvaluator(enumerate_friable(params), k) {}

WeylEvaluator::WeylEvaluator(std::vector<std::uint64_t> friables, int k) : k_(k), n_(std::move(friables))
{
    check_weyl_degree(k);
    check_range();
    nk_.reserve(n_.size());
    for (auto n : n_)
        nk_.push_back(pow_wrap(n, k));
}

void WeylEvaluator::check_range() const
{
    if (n_.empty())
        return;
    const double top = std::pow(static_cast<double>(n_.back()), k_);
    if (top >= 0x1p100)
        throw NumericError("n^k = " + std::to_string(top) + " leaves the exact phase-reduction range (2^100)");
}

cplx WeylEvaluator::operator()(FixedPhase theta) const
{
    return sum_upto(theta, std::numeric_limits<double>::infinity());
}

cplx WeylEvaluator::sum_upto(FixedPhase theta, double limit) const
{
    double re = 0, im = 0;
    const u128 t = theta.raw();
    for (std::size_t i = 0; i < nk_.size(); ++i) {
        if (static_cast<double>(n_[i]) > limit)
            break;
        const double f = FixedPhase::from_raw(t * nk_[i]).fraction();
        const double ang = 2.0 * kPi * f;
        re += std::cos(ang);
        im += std::sin(ang);
    }
    return {re, im};
}

cplx weyl_sum(const FriableParams& params, int k, double theta)
{
    return WeylEvaluator(params, k)(FixedPhase::from_double(theta));
}

cplx weyl_sum(const FriableParams& params, int k, const RationalPhase& phase)
{
    return WeylEvaluator(params, k)(phase.fixed());
}

cplx complex_gamma(cplx z)
{
    static constexpr double g = 7.0;
    static constexpr double p[] = {0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
                                   771.32342877765313,      -176.61502916214059,   12.507343278686905,
                                   -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5)
        return kPi / (std::sin(kPi * z) * complex_gamma(1.0 - z));
    z -= 1.0;
    cplx acc = p[0];
    for (int i = 1; i < 9; ++i)
        acc += p[i] / (z + static_cast<double>(i));
    const cplx t = z + g + 0.5;
    return std::sqrt(2 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * acc;
}

namespace {

// F(mu, beta) = int_0^1 exp(i mu w) w^(beta - 1) dw for mu >= 0.
cplx oscillatory_power_integral(double mu, cplx beta, cplx gamma_beta)
{
    if (mu <= 8.0) {
        // sum_n (i mu)^n / (n! (n + beta))
        cplx term = 1.0, acc = 0.0;
        for (int n = 0; n < 400; ++n) {
            acc += term / (static_cast<double>(n) + beta);
            term *= kI * mu / static_cast<double>(n + 1);
            if (n > mu && std::abs(term) < 1e-18 * std::max(1.0, std::abs(acc)))
                break;
        }
        return acc;
    }
    // Rotate the contour: [0, 1] = [0, i inf) - [1, 1 + i inf).
    const cplx head = std::exp(kI * (kPi / 2) * beta - beta * std::log(mu)) * gamma_beta;
    // tail = int_0^inf exp(-tau) (1 + i tau / mu)^(beta - 1) dtau
    cplx tail = 0.0;
    if (mu >= 40.0 && std::abs(beta) <= 4.0) {
        cplx c = 1.0;
        double last = std::numeric_limits<double>::infinity();
        for (int n = 1; n < 200; ++n) {
            tail += c;
            c *= (beta - static_cast<double>(n)) * kI / mu;
            const double mag = std::abs(c);
            if (mag >= last || mag < 1e-18)
                break;
            last = mag;
        }
    } else {
        using GL = boost::math::quadrature::gauss<double, 20>;
        const auto& xs = GL::abscissa();
        const auto& ws = GL::weights();
        const double upper = 45.0 + 2.0 * std::max(0.0, beta.real());
        for (double lo = 0; lo < upper; lo += 1.0) {
            const double mid = lo + 0.5;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                for (double sgn : {-1.0, 1.0}) {
                    const double tau = mid + sgn * 0.5 * xs[j];
                    tail += 0.5 * ws[j] * std::exp(-tau) * std::pow(1.0 + kI * tau / mu, beta - 1.0);
                }
            }
        }
    }
    tail /= mu;
    return head - kI * std::exp(kI * mu) * tail;
}

}  // namespace

PhiCheck::PhiCheck(cplx s, int k)
{
    if (!(s.real() > 0))
        throw DomainError("phi_check needs Re(s) > 0");
    if (k < 1)
        throw DomainError("phi_check needs k >= 1");
    beta_ = s / static_cast<double>(k);
    gamma_beta_ = complex_gamma(beta_);
    gamma_beta_conj_ = complex_gamma(std::conj(beta_));
}

cplx PhiCheck::operator()(double lambda) const
{
    if (!std::isfinite(lambda))
        throw DomainError("phi_check needs finite lambda");
    if (lambda == 0.0)
        return 1.0;
    const double mu = 2 * kPi * lambda;
    const cplx F = mu > 0 ? oscillatory_power_integral(mu, beta_, gamma_beta_)
                          : std::conj(oscillatory_power_integral(-mu, std::conj(beta_), gamma_beta_conj_));
    return beta_ * F;
}

cplx phi_check(double lambda, cplx s, int k) { return PhiCheck(s, k)(lambda); }

std::vector<std::pair<std::int64_t, cplx>> gcd_class_sums(std::int64_t a, std::int64_t q, int k)
{
    if (q < 1)
        throw DomainError("modulus must be positive");
    if (q > 100'000)
        throw ResourceError("modulus " + std::to_string(q) + " exceeds 10^5");
    const auto roots = roots_of_unity(q);
    std::vector<cplx> by_gcd(static_cast<std::size_t>(q) + 1, cplx(0, 0));
    const auto ar = mod(a, q);
    for (std::int64_t b = 0; b < q; ++b) {
        const auto g = std::gcd(b, q);
        by_gcd[static_cast<std::size_t>(g)] += roots[static_cast<std::size_t>(mulmod(ar, powmod(b, k, q), q))];
    }
    std::vector<std::pair<std::int64_t, cplx>> out;
    for (auto d : divisors(q))
        out.emplace_back(d, by_gcd[static_cast<std::size_t>(d)]);
    return out;
}

namespace {

// Calls f(d1, d = d1 d2, weight = mu(d2) T(d1) / phi(q / d1)) over the pairs
// with d1 d2 | q and P(d1 d2) <= y.
template <class F>
void for_each_divisor_pair(std::int64_t a, std::int64_t q, int k, double y, F&& f)
{
    for (const auto& [d1, T] : gcd_class_sums(a, q, k)) {
        const double phi = static_cast<double>(euler_phi(q / d1));
        for (auto d2 : divisors(q / d1)) {
            const int mu = mobius(d2);
            if (mu == 0)
                continue;
            const std::int64_t d = d1 * d2;
            if (static_cast<double>(largest_prime_factor(d)) > y)
                continue;
            f(d, static_cast<double>(mu) * T / phi);
        }
    }
}

}  // namespace

cplx h_aq(std::int64_t a, std::int64_t q, double alpha, double y, int k)
{
    if (q < 1)
        throw DomainError("h_aq: q must be positive");
    if (std::gcd(mod(a, q), q) != 1)
        throw DomainError("h_aq: gcd(a, q) must be 1");
    if (k < 1)
        throw DomainError("h_aq: k must be positive");
    cplx acc = 0;
    for_each_divisor_pair(a, q, k, y, [&](std::int64_t d, cplx w) {
        acc += w * std::pow(static_cast<double>(d), -alpha);
    });
    return acc;
}

cplx major_arc_main_term(double psi_value, double x, int k, const RationalPhase& phase, double alpha, double y)
{
    const double lambda = phase.delta * std::pow(x, k);
    return psi_value * phi_check(lambda, cplx(alpha, 0), k) * h_aq(phase.a, phase.q, alpha, y, k);
}

cplx major_arc_main_term(const FriableParams& params, int k, const RationalPhase& phase, const SaddleData& saddle)
{
    return major_arc_main_term(static_cast<double>(psi(params)), params.x, k, phase, saddle.alpha, params.y);
}

cplx mk_main_term(const WeylEvaluator& eval, double x, double y, const RationalPhase& phase)
{
    if (phase.q > 1000)
        throw ResourceError("mk_main_term: q = " + std::to_string(phase.q) + " exceeds 10^3");
    const int k = eval.k();
    const auto delta = FixedPhase::from_double(phase.delta);
    cplx acc = 0;
    for_each_divisor_pair(phase.a, phase.q, k, y, [&](std::int64_t d, cplx w) {
        const auto ud = static_cast<std::uint64_t>(d);
        acc += w * eval.sum_upto(delta.times(pow_wrap(ud, k)), x / static_cast<double>(d));
    });
    return acc;
}

cplx mk_main_term(const FriableParams& params, int k, const RationalPhase& phase)
{
    return mk_main_term(WeylEvaluator(params, k), params.x, params.y, phase);
}

ArcSet arc_decompose(double Q, double x, int k)
{
    if (!(Q >= 1))
        throw DomainError("arc_decompose: Q must be at least 1");
    const double X = std::pow(x, k);
    const auto qmax = static_cast<std::int64_t>(std::floor(Q));
    if (static_cast<double>(qmax) * static_cast<double>(qmax) > 5e7)
        throw ResourceError("arc_decompose: too many arcs for Q = " + std::to_string(Q));
    ArcSet s;
    s.Q = Q;
    s.x = x;
    s.k = k;
    s.overlap_possible = 2 * Q * Q > X;
    for (std::int64_t q = 1; q <= qmax; ++q) {
        const double hw = Q / (static_cast<double>(q) * X);
        for (std::int64_t a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1)
                continue;
            s.arcs.push_back({a, q, hw});
            s.total_measure += 2 * hw;
        }
    }
    return s;
}

bool in_major_arcs(FixedPhase theta, double Q, double x, int k)
{
    const double thr = Q / std::pow(x, k);
    const auto qmax = static_cast<std::int64_t>(std::floor(Q));
    for (std::int64_t q = 1; q <= qmax; ++q)
        if (theta.times(static_cast<u128>(q)).norm() <= thr)
            return true;
    return false;
}

namespace {

constexpr std::int64_t kScanBudget = 1'000'000;

void add_ladder_points(std::vector<FixedPhase>& pts, double Q, double X)
{
    const auto qmax = static_cast<std::int64_t>(std::floor(2 * Q));
    for (std::int64_t q = 1; q <= qmax; ++q) {
        const double w = Q / (static_cast<double>(q) * X);
        for (std::int64_t a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1)
                continue;
            const auto centre = FixedPhase::from_rational(a, q);
            if (static_cast<double>(q) > Q)
                pts.push_back(centre);
            double d = 1.02 * w;
            for (int j = 0; j < 6; ++j, d *= 2) {
                if (d >= 0.5)
                    break;
                pts.push_back(centre + FixedPhase::from_double(d));
                pts.push_back(centre - FixedPhase::from_double(d));
            }
        }
        if (pts.size() > static_cast<std::size_t>(kScanBudget))
            throw ResourceError("minor-arc scan exceeds the 10^6 point budget");
    }
}

std::vector<FixedPhase> scan_points(const std::vector<double>& Qs, double X, std::int64_t grid_size)
{
    if (grid_size < 1 || grid_size > kScanBudget)
        throw ResourceError("minor-arc grid size must lie in [1, 10^6]");
    std::vector<FixedPhase> pts;
    const double offset = (std::sqrt(5.0) - 1) / 2;
    for (std::int64_t i = 0; i < grid_size; ++i)
        pts.push_back(FixedPhase::from_double((static_cast<double>(i) + offset) / static_cast<double>(grid_size)));
    for (double Q : Qs)
        add_ladder_points(pts, Q, X);
    if (pts.size() > static_cast<std::size_t>(kScanBudget))
        throw ResourceError("minor-arc scan exceeds the 10^6 point budget");
    return pts;
}

// Smallest Q' with theta in M(Q', x), searching q <= qcap; infinity if none.
double arc_entry_level(FixedPhase theta, double X, std::int64_t qcap)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t q = 1; q <= qcap && static_cast<double>(q) < best; ++q)
        best = std::min(best, std::max(static_cast<double>(q), theta.times(static_cast<u128>(q)).norm() * X));
    return best;
}

}  // namespace

MinorArcDecay minor_arc_decay(const FriableParams& params, int k, const std::vector<double>& Qs,
                              std::int64_t grid_size)
{
    if (Qs.empty())
        throw DomainError("minor_arc_decay: empty Q list");
    for (double Q : Qs)
        if (!(Q >= 1))
            throw DomainError("minor_arc_decay: every Q must be at least 1");
    check_weyl_degree(k);
    const double X = std::pow(params.x, k);
    const double Qtop = *std::max_element(Qs.begin(), Qs.end());
    const auto pts = scan_points(Qs, X, grid_size);

    std::vector<double> level(pts.size());
    const auto qcap = static_cast<std::int64_t>(std::floor(std::min(Qtop, X)));
    parallel_for(pts.size(), [&](std::size_t i) { level[i] = arc_entry_level(pts[i], X, qcap); });

    const double Qlow = *std::min_element(Qs.begin(), Qs.end());
    const WeylEvaluator eval(params, k);
    const double psi_value = static_cast<double>(eval.size());
    std::vector<double> val(pts.size(), -1.0);
    parallel_for(pts.size(), [&](std::size_t i) {
        if (Qlow < level[i])
            val[i] = std::abs(eval(pts[i])) / psi_value;
    });

    MinorArcDecay out;
    for (double Q : Qs) {
        MinorArcReport r;
        r.Q = Q;
        if (Q < X) {
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (!(Q < level[i]))
                    continue;
                ++r.points;
                if (val[i] > r.sup) {
                    r.sup = val[i];
                    r.argmax_theta = pts[i].fraction();
                }
            }
        }
        out.reports.push_back(r);
    }
    out.strictly_decreasing = true;
    std::vector<std::pair<double, double>> fit;
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
        if (i > 0 && Qs[i] > Qs[i - 1] && !(out.reports[i].sup < out.reports[i - 1].sup))
            out.strictly_decreasing = false;
        if (out.reports[i].sup > 0)
            fit.emplace_back(std::log(Qs[i]), std::log(out.reports[i].sup));
    }
    if (fit.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [a, b] : fit) {
            mx += a;
            my += b;
        }
        mx /= static_cast<double>(fit.size());
        my /= static_cast<double>(fit.size());
        double sxy = 0, sxx = 0;
        for (auto [a, b] : fit) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
        }
        out.c_hat = sxx > 0 ? -sxy / sxx : 0.0;
    }
    return out;
}

MinorArcReport minor_arc_scan(const FriableParams& params, int k, double Q, std::int64_t grid_size, bool keep_rows)
{
    if (!(Q >= 1))
        throw DomainError("minor_arc_scan: Q must be at least 1");
    check_weyl_degree(k);
    const double X = std::pow(params.x, k);
    MinorArcReport r;
    r.Q = Q;
    if (Q >= X)
        return r;
    const auto pts = scan_points({Q}, X, grid_size);
    const auto qcap = static_cast<std::int64_t>(std::floor(Q));
    const WeylEvaluator eval(params, k);
    const double psi_value = static_cast<double>(eval.size());
    std::vector<double> val(pts.size(), -1.0);
    parallel_for(pts.size(), [&](std::size_t i) {
        if (Q < arc_entry_level(pts[i], X, qcap))
            val[i] = std::abs(eval(pts[i])) / psi_value;
    });
    const auto qrow = static_cast<std::int64_t>(std::floor(2 * Q));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (val[i] < 0)
            continue;
        ++r.points;
        if (val[i] > r.sup) {
            r.sup = val[i];
            r.argmax_theta = pts[i].fraction();
        }
        if (keep_rows) {
            const auto ph = rational_decompose(pts[i].fraction(), params.x, k, qrow);
            r.rows.push_back({ph.theta, ph.q, ph.delta, val[i]});
        }
    }
    return r;
}

void write_scan_csv(std::ostream& os, const MinorArcReport& report)
{
    os << "theta,q,delta,abs_E_over_psi\n";
    os << std::setprecision(17);
    for (const auto& row : report.rows)
        os << row.theta << ',' << row.q << ',' << row.delta << ',' << row.abs_E_over_psi << '\n';
}

}  // namespace friable
