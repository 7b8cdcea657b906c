#include "cli.hpp"

#include "friable/circle.hpp"
#include "friable/dioph.hpp"
#include "friable/local_factors.hpp"
#include "friable/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace friable::cli {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<std::int64_t> prime_powers_upto(std::int64_t bound)
{
    std::vector<std::int64_t> out;
    for (std::int64_t n = 2; n <= bound; ++n)
        if (factorize(n).size() == 1)
            out.push_back(n);
    return out;
}

SuiteRow projection_suite()
{
    SuiteRow row{"appendix", "local measure projection (exact)", 0, true, ""};
    for (std::int64_t p : {2, 3, 5})
        for (int m = 1; m <= 5; ++m)
            for (auto alpha : {ExactAlpha::One, ExactAlpha::Half})
                for (bool le : {true, false}) {
                    const auto r = check_projection_exact(p, m, alpha, le);
                    row.cases += r.cases;
                    if (!r.ok && row.pass) {
                        row.pass = false;
                        row.detail = r.failure;
                    }
                }
    return row;
}

SuiteRow sq_mq_suite()
{
    SuiteRow row{"appendix", "sum_{d|q} S(d) = q M(q) (exact, q <= 243)", 0, true, ""};
    for (auto q : prime_powers_upto(243)) {
        const auto [p, m] = factorize(q).front();
        for (int k = 1; k <= 3; ++k)
            for (auto alpha : {ExactAlpha::One, ExactAlpha::Half})
                for (bool le : {true, false}) {
                    const auto r = check_sq_mq_exact(p, m, k, 4, alpha, le);
                    row.cases += r.cases;
                    if (!r.ok && row.pass) {
                        row.pass = false;
                        row.detail = r.failure;
                    }
                }
    }
    return row;
}

SuiteRow haq_suite()
{
    SuiteRow row{"appendix", "H_{a/q}(alpha) = S(x, y; q, a), q <= 200", 0, true, ""};
    double worst = 0;
    for (std::int64_t q = 1; q <= 200; ++q)
        for (int k = 1; k <= 3; ++k)
            for (double alpha : {0.6, 0.8, 1.0})
                for (double y : {5.0, 50.0, kInf}) {
                    const auto S = s_xy_q_all(q, alpha, y, k);
                    for (std::int64_t a = 0; a < q; ++a) {
                        if (std::gcd(a, q) != 1)
                            continue;
                        const double d = std::abs(h_aq(a, q, alpha, y, k) - S[static_cast<std::size_t>(a)]);
                        worst = std::max(worst, d);
                        ++row.cases;
                        if (d > 1e-9 && row.pass) {
                            row.pass = false;
                            std::ostringstream os;
                            os << "q=" << q << " a=" << a << " k=" << k << " alpha=" << alpha << " y=" << y
                               << " diff=" << d;
                            row.detail = os.str();
                        }
                    }
                }
    if (row.pass) {
        std::ostringstream os;
        os << "max diff " << worst;
        row.detail = os.str();
    }
    return row;
}

SuiteRow s_bound_suite()
{
    SuiteRow row{"appendix", "|S(x, y; q, a)| <= 16^omega(q) q^(-alpha/k), q <= 500", 0, true, ""};
    double worst = 0;
    for (std::int64_t q = 2; q <= 500; ++q)
        for (int k = 1; k <= 3; ++k)
            for (double alpha : {0.6, 0.8, 1.0})
                for (double y : {5.0, 50.0, kInf}) {
                    const auto S = s_xy_q_all(q, alpha, y, k);
                    const double bound = std::pow(16.0, omega(q)) * std::pow(static_cast<double>(q), -alpha / k);
                    for (std::int64_t a = 1; a < q; ++a) {
                        if (std::gcd(a, q) != 1)
                            continue;
                        const double r = std::abs(S[static_cast<std::size_t>(a)]) / bound;
                        worst = std::max(worst, r);
                        ++row.cases;
                        if (r > 1 && row.pass) {
                            row.pass = false;
                            row.detail = "q=" + std::to_string(q) + " a=" + std::to_string(a);
                        }
                    }
                }
    std::ostringstream os;
    os << "max ratio " << worst;
    if (row.pass)
        row.detail = os.str();
    return row;
}

// Sum of squared multiplicities of s-fold sums of n^k, by listing every s-tuple.
BigInt brute_moment(const std::vector<std::uint64_t>& support, int k, int s)
{
    std::vector<std::uint64_t> powers;
    for (auto n : support)
        powers.push_back(static_cast<std::uint64_t>(pow_wrap(n, k)));
    std::vector<std::uint64_t> sums{0};
    for (int i = 0; i < s; ++i) {
        std::vector<std::uint64_t> next;
        for (auto t : sums)
            for (auto v : powers)
                next.push_back(t + v);
        sums.swap(next);
    }
    std::sort(sums.begin(), sums.end());
    BigInt total = 0;
    for (std::size_t i = 0; i < sums.size();) {
        std::size_t j = i;
        while (j < sums.size() && sums[j] == sums[i])
            ++j;
        total += BigInt(j - i) * (j - i);
        i = j;
    }
    return total;
}

SuiteRow moment_suite()
{
    SuiteRow row{"moments", "moment_exact = brute force over s-tuples (Psi <= 30)", 0, true, ""};
    for (double x : {3.0, 10.0, 20.0, 40.0})
        for (double y : {2.0, 3.0, 7.0, 40.0}) {
            if (y > x)
                continue;
            const auto params = FriableParams::make(x, y);
            const auto support = enumerate_friable(params);
            if (support.size() > 30)
                continue;
            for (int k = 1; k <= 3; ++k)
                for (int s = 1; s <= 3; ++s) {
                    ++row.cases;
                    if (moment_exact(params, k, s) != brute_moment(support, k, s) && row.pass) {
                        row.pass = false;
                        row.detail = "x=" + std::to_string(x) + " y=" + std::to_string(y);
                    }
                }
        }
    return row;
}

SuiteRow coefficient_suite(std::uint64_t seed)
{
    SuiteRow row{"moments", "coefficient of E_k^s at N = count_exact (50 random)", 0, true, ""};
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 50; ++t) {
        const int k = 1 + static_cast<int>(rng() % 2);
        const int s = 1 + static_cast<int>(rng() % 3);
        const double x = static_cast<double>(2 + rng() % 59);
        const double y = static_cast<double>(2 + rng() % static_cast<std::uint64_t>(x - 1));
        const std::uint64_t top = s * static_cast<std::uint64_t>(pow_wrap(static_cast<std::uint64_t>(x), k));
        const std::uint64_t N = 1 + rng() % top;
        const auto q = make_query(N, k, s, y, x);
        ++row.cases;
        if (count_exact(q) != representation_coefficient(FriableParams::make(x, y), k, s, N) && row.pass) {
            row.pass = false;
            row.detail = "N=" + std::to_string(N);
        }
    }
    return row;
}

SuiteRow erdos_turan_suite(std::uint64_t seed)
{
    SuiteRow row{"erdos-turan", "discrepancy inequality (1000 random)", 0, true, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const int n = 1 + static_cast<int>(rng() % 200);
        std::vector<double> pts(static_cast<std::size_t>(n));
        const int kind = static_cast<int>(rng() % 3);
        const double centre = unit(rng), spread = unit(rng) * 0.1;
        const int m = 1 + static_cast<int>(rng() % 50);
        for (auto& v : pts) {
            if (kind == 0)
                v = unit(rng);
            else if (kind == 1)
                v = centre + spread * unit(rng);
            else
                v = static_cast<double>(rng() % static_cast<std::uint64_t>(m)) / m;
            v -= std::floor(v);
        }
        const int J = 1 + static_cast<int>(rng() % 40);
        const auto r = erdos_turan_check(pts, unit(rng), unit(rng), J);
        ++row.cases;
        if (!r.holds && row.pass) {
            row.pass = false;
            row.detail = "instance " + std::to_string(t);
        }
    }
    return row;
}

}  // namespace

std::vector<SuiteRow> run_verify(const std::string& suite, std::uint64_t seed)
{
    std::vector<SuiteRow> rows;
    const bool all = suite == "all";
    if (all || suite == "appendix") {
        rows.push_back(projection_suite());
        rows.push_back(sq_mq_suite());
        rows.push_back(haq_suite());
        rows.push_back(s_bound_suite());
    }
    if (all || suite == "moments") {
        rows.push_back(moment_suite());
        rows.push_back(coefficient_suite(seed));
    }
    if (all || suite == "erdos-turan")
        rows.push_back(erdos_turan_suite(seed));
    return rows;
}

}  // namespace friable::cli
