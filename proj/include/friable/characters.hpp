#pragma once

// Dirichlet characters modulo q and the generalized Gauss sums
// G_k(q, a, chi) = sum_{b mod q} chi(b) e(a b^k / q).

#include "friable/arith.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace friable {

class CharacterGroup;

// A character modulo q, stored as exponents on the group generators together
// with a materialized table: chi(n) = e(phase[n] / order), phase -1 off units.
class DirichletCharacter {
public:
    std::int64_t modulus() const { return q_; }
    // Exponent of the group; every value is an order-th root of unity.
    std::int64_t order() const { return order_; }
    const std::vector<std::int64_t>& exponents() const { return exps_; }
    bool is_principal() const { return principal_; }

    // Phase index of chi(n mod q), or -1 when gcd(n, q) > 1.
    std::int32_t phase(std::int64_t n) const { return phase_[static_cast<std::size_t>(mod(n, q_))]; }
    cplx operator()(std::int64_t n) const { return values_[static_cast<std::size_t>(mod(n, q_))]; }
    const std::vector<cplx>& values() const { return values_; }

    std::int64_t conductor() const;

private:
    friend class CharacterGroup;
    std::int64_t q_ = 1;
    std::int64_t order_ = 1;
    bool principal_ = true;
    std::vector<std::int64_t> exps_;
    std::vector<std::int32_t> phase_;
    std::vector<cplx> values_;
};

// The character group of (Z/qZ)^x built from the CRT decomposition:
// one cyclic factor per odd prime power, and {+-1} x <5> for powers of 2.
class CharacterGroup {
public:
    explicit CharacterGroup(std::int64_t q);

    std::int64_t modulus() const { return q_; }
    std::int64_t size() const { return size_; }
    // Orders of the cyclic factors (generators) in a fixed order.
    const std::vector<std::int64_t>& factor_orders() const { return orders_; }

    DirichletCharacter character(const std::vector<std::int64_t>& exponents) const;
    DirichletCharacter character(std::int64_t index) const;
    DirichletCharacter principal() const;
    std::vector<std::int64_t> exponents_of(std::int64_t index) const;

    DirichletCharacter multiply(const DirichletCharacter& a, const DirichletCharacter& b) const;
    DirichletCharacter power(const DirichletCharacter& a, std::int64_t k) const;

    // Discrete logarithm of a unit n on generator i.
    std::int64_t log(std::size_t i, std::int64_t n) const { return logs_[i][static_cast<std::size_t>(mod(n, q_))]; }

private:
    std::int64_t q_;
    std::int64_t size_ = 1;
    std::int64_t exponent_ = 1;
    std::vector<std::int64_t> orders_;
    std::vector<std::vector<std::int32_t>> logs_;
    std::vector<std::uint8_t> unit_;
};

// All phi(q) characters; throws ResourceError above the table budget.
std::vector<DirichletCharacter> character_group(std::int64_t q);

std::int64_t conductor(const DirichletCharacter& chi);

cplx gauss_sum_k(std::int64_t q, std::int64_t a, const DirichletCharacter& chi, int k);

// G_k(q, c, chi) for every c mod q at once (one length-q DFT).
std::vector<cplx> gauss_sums_all(const DirichletCharacter& chi, int k);

// Upper bound 2 k^omega(q) tau(q) min(q / sqrt(q*), sqrt(a q)).
double gauss_sum_bound(std::int64_t q, std::int64_t a, std::int64_t conductor, int k);

}  // namespace friable
