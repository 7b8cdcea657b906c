#include "friable/characters.hpp"

#include "friable/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace friable {

namespace {

constexpr std::int64_t kCharacterTableBudget = 50'000'000;

std::int64_t primitive_root_prime(std::int64_t p)
{
    if (p == 2)
        return 1;
    const auto fs = factorize(p - 1);
    for (std::int64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [l, e] : fs)
            if (powmod(g, (p - 1) / l, p) == 1) {
                ok = false;
                break;
            }
        if (ok)
            return g;
    }
    throw NumericError("no primitive root mod " + std::to_string(p));
}

struct LocalFactor {
    std::int64_t pm;
    std::vector<std::int64_t> orders;
    std::vector<std::vector<std::int32_t>> logs;  // one table of length pm per generator
};

LocalFactor local_factor(std::int64_t p, int m)
{
    LocalFactor f;
    f.pm = ipow(p, m);
    const auto pm = f.pm;
    if (p != 2) {
        std::int64_t g = primitive_root_prime(p);
        if (m >= 2 && powmod(g, p - 1, p * p) == 1)
            g += p;
        const std::int64_t phi = pm / p * (p - 1);
        std::vector<std::int32_t> lg(static_cast<std::size_t>(pm), -1);
        std::int64_t v = 1;
        for (std::int64_t e = 0; e < phi; ++e) {
            lg[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(e);
            v = mulmod(v, g, pm);
        }
        f.orders.push_back(phi);
        f.logs.push_back(std::move(lg));
        return f;
    }
    if (m == 1)
        return f;
    // n = (-1)^a 5^b
    std::vector<std::int32_t> sign(static_cast<std::size_t>(pm), -1);
    std::vector<std::int32_t> five(static_cast<std::size_t>(pm), -1);
    const std::int64_t half_order = m >= 3 ? pm / 4 : 1;
    std::int64_t v = 1;
    for (std::int64_t b = 0; b < half_order; ++b) {
        five[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(b);
        five[static_cast<std::size_t>(pm - v)] = static_cast<std::int32_t>(b);
        sign[static_cast<std::size_t>(v)] = 0;
        sign[static_cast<std::size_t>(pm - v)] = 1;
        v = mulmod(v, 5, pm);
    }
    f.orders.push_back(2);
    f.logs.push_back(std::move(sign));
    if (m >= 3) {
        f.orders.push_back(half_order);
        f.logs.push_back(std::move(five));
    }
    return f;
}

}  // namespace

CharacterGroup::CharacterGroup(std::int64_t q) : q_(q)
{
    if (q <= 0)
        throw DomainError("character modulus must be positive");
    const auto uq = static_cast<std::size_t>(q);
    unit_.assign(uq, 0);
    for (std::int64_t n = 0; n < q; ++n)
        unit_[static_cast<std::size_t>(n)] = std::gcd(n, q) == 1;
    for (auto [p, m] : factorize(q)) {
        auto f = local_factor(p, m);
        for (std::size_t i = 0; i < f.orders.size(); ++i) {
            std::vector<std::int32_t> lg(uq, -1);
            for (std::int64_t n = 0; n < q; ++n)
                if (unit_[static_cast<std::size_t>(n)])
                    lg[static_cast<std::size_t>(n)] = f.logs[i][static_cast<std::size_t>(n % f.pm)];
            orders_.push_back(f.orders[i]);
            logs_.push_back(std::move(lg));
            size_ *= f.orders[i];
            exponent_ = std::lcm(exponent_, f.orders[i]);
        }
    }
}

std::vector<std::int64_t> CharacterGroup::exponents_of(std::int64_t index) const
{
    if (index < 0 || index >= size_)
        throw DomainError("character index out of range");
    std::vector<std::int64_t> e(orders_.size());
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        e[i] = index % orders_[i];
        index /= orders_[i];
    }
    return e;
}

DirichletCharacter CharacterGroup::character(const std::vector<std::int64_t>& exponents) const
{
    if (exponents.size() != orders_.size())
        throw DomainError("exponent vector has wrong length");
    DirichletCharacter chi;
    chi.q_ = q_;
    chi.order_ = exponent_;
    chi.exps_.resize(orders_.size());
    chi.principal_ = true;
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        chi.exps_[i] = mod(exponents[i], orders_[i]);
        chi.principal_ = chi.principal_ && chi.exps_[i] == 0;
    }
    const auto uq = static_cast<std::size_t>(q_);
    chi.phase_.assign(uq, -1);
    for (std::size_t n = 0; n < uq; ++n) {
        if (!unit_[n])
            continue;
        std::int64_t ph = 0;
        for (std::size_t i = 0; i < orders_.size(); ++i)
            ph += chi.exps_[i] * logs_[i][n] % orders_[i] * (exponent_ / orders_[i]);
        chi.phase_[n] = static_cast<std::int32_t>(ph % exponent_);
    }
    const auto roots = roots_of_unity(exponent_);
    chi.values_.assign(uq, cplx(0, 0));
    for (std::size_t n = 0; n < uq; ++n)
        if (chi.phase_[n] >= 0)
            chi.values_[n] = roots[static_cast<std::size_t>(chi.phase_[n])];
    return chi;
}

DirichletCharacter CharacterGroup::character(std::int64_t index) const { return character(exponents_of(index)); }

DirichletCharacter CharacterGroup::principal() const { return character(std::int64_t{0}); }

DirichletCharacter CharacterGroup::multiply(const DirichletCharacter& a, const DirichletCharacter& b) const
{
    if (a.modulus() != q_ || b.modulus() != q_)
        throw DomainError("character modulus mismatch");
    std::vector<std::int64_t> e(orders_.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = a.exps_[i] + b.exps_[i];
    return character(e);
}

DirichletCharacter CharacterGroup::power(const DirichletCharacter& a, std::int64_t k) const
{
    if (a.modulus() != q_)
        throw DomainError("character modulus mismatch");
    std::vector<std::int64_t> e(orders_.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = mod(a.exps_[i] * mod(k, orders_[i]), orders_[i]);
    return character(e);
}

std::vector<DirichletCharacter> character_group(std::int64_t q)
{
    CharacterGroup g(q);
    if (g.size() > kCharacterTableBudget / q)
        throw ResourceError("character tables for q = " + std::to_string(q) + " exceed budget");
    std::vector<DirichletCharacter> out;
    out.reserve(static_cast<std::size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i)
        out.push_back(g.character(i));
    return out;
}

std::int64_t DirichletCharacter::conductor() const
{
    for (auto d : divisors(q_)) {
        bool induced = true;
        for (std::int64_t n = 1 % d; n < q_ && induced; n += d)
            if (phase_[static_cast<std::size_t>(n)] > 0)
                induced = false;
        if (induced)
            return d;
    }
    return q_;
}

std::int64_t conductor(const DirichletCharacter& chi) { return chi.conductor(); }

cplx gauss_sum_k(std::int64_t q, std::int64_t a, const DirichletCharacter& chi, int k)
{
    if (q < 1)
        throw DomainError("gauss_sum_k: q must be positive");
    if (chi.modulus() != q)
        throw DomainError("gauss_sum_k: character modulus " + std::to_string(chi.modulus()) +
                          " differs from q = " + std::to_string(q));
    if (k < 1)
        throw DomainError("gauss_sum_k: k must be positive");
    const auto roots = roots_of_unity(q);
    std::complex<long double> acc = 0;
    const auto ar = mod(a, q);
    for (std::int64_t b = 0; b < q; ++b) {
        if (chi.phase(b) < 0)
            continue;
        const auto r = mulmod(ar, powmod(b, k, q), q);
        acc += std::complex<long double>(chi(b) * roots[static_cast<std::size_t>(r)]);
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

std::vector<cplx> gauss_sums_all(const DirichletCharacter& chi, int k)
{
    const std::int64_t q = chi.modulus();
    const auto n = static_cast<std::size_t>(q);
    std::vector<cplx> w(n, cplx(0, 0));
    for (std::int64_t b = 0; b < q; ++b)
        if (chi.phase(b) >= 0)
            w[static_cast<std::size_t>(powmod(b, k, q))] += chi(b);
    return dft_positive(w);
}

double gauss_sum_bound(std::int64_t q, std::int64_t a, std::int64_t conductor, int k)
{
    const double w = std::pow(static_cast<double>(k), omega(q));
    const double lhs = static_cast<double>(q) / std::sqrt(static_cast<double>(conductor));
    const double rhs = std::sqrt(static_cast<double>(a) * static_cast<double>(q));
    return 2.0 * w * static_cast<double>(tau(q)) * std::min(lhs, rhs);
}

}  // namespace friable
