#pragma once

// Friable integers: sieving, enumeration, counting, the saddle point of
// x^s zeta(s, y), Dickman's function and the saddle-point approximation
// of Psi(x, y).

#include "friable/arith.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace friable {

class DirichletCharacter;

// Process-wide resource caps. The sieve cap can be overridden through the
// FRIABLE_MEMORY_BUDGET environment variable (number of sieve entries).
struct Limits {
    std::uint64_t sieve_limit = 100'000'000;
    double lattice_y_limit = 1000.0;
    std::uint64_t max_enumerated = 200'000'000;
};
Limits& limits();

struct FriableParams {
    double x = 2;
    double y = 2;

    // Validates 2 <= y <= x.
    static FriableParams make(double x, double y);
    double u() const;
    std::uint64_t floor_x() const;
};

struct SaddleData {
    double alpha = 0;
    double sigma2 = 0;
    double zeta_alpha_y = 0;
    double residual = 0;
    int iterations = 0;
};

struct AsymptoticScales {
    double u = 0;
    double u_y = 0;
    double H_u = 0;
    double Y = 0;
    double Y_eps = 0;
    double T_eps = 0;
};

AsymptoticScales asymptotic_scales(const FriableParams& params, double eps = 0.1);

// Smallest-prime-factor table for 0..limit. Immutable once built.
class SpfSieve {
public:
    static constexpr std::uint32_t kUnit = 1;

    explicit SpfSieve(std::uint64_t limit);

    std::uint64_t limit() const { return spf_.size() - 1; }
    std::uint32_t operator[](std::uint64_t n) const { return spf_[n]; }
    std::span<const std::uint32_t> table() const { return spf_; }

private:
    std::vector<std::uint32_t> spf_;
};

// Primes <= y, computed once per bound and shared.
std::shared_ptr<const std::vector<std::int64_t>> primes_up_to(double y);

enum class EnumerationStrategy { Auto, Sieve, Lattice };

// All y-friable n in [1, x], ascending, 1 included.
std::vector<std::uint64_t> enumerate_friable(const FriableParams& params,
                                             EnumerationStrategy strategy = EnumerationStrategy::Auto);
// Same set without the 2 <= y <= x validation; x < 1 gives the empty set.
std::vector<std::uint64_t> enumerate_friable_raw(double x, double y,
                                                 EnumerationStrategy strategy = EnumerationStrategy::Auto);

std::uint64_t psi(const FriableParams& params);
std::uint64_t psi_raw(double x, double y);
cplx psi_char(const FriableParams& params, const DirichletCharacter& chi);

// Sum_{p <= y} log p / (p^alpha - 1), the left side of the saddle equation.
double saddle_sum(double alpha, double y);
SaddleData saddle_alpha(const FriableParams& params, double tol = 1e-10);

// Truncated Euler product prod_{p <= y} (1 - p^-s)^-1.
double zeta_partial(double s, double y);

// Dickman's rho tabulated on [0, u_max] by trapezoidal integration of
// u rho'(u) = -rho(u - 1).
class DickmanTable {
public:
    explicit DickmanTable(double u_max = 20.0, double grid_step = 1e-3);

    double grid_step() const { return step_; }
    double u_max() const { return step_ * static_cast<double>(values_.size() - 1); }
    std::span<const double> values() const { return values_; }
    double operator()(double u) const;

private:
    double step_;
    std::vector<double> values_;
};

double dickman_rho(double u, const DickmanTable& table);

// x^alpha zeta(alpha, y) / (alpha sqrt(2 pi sigma2)).
double ht_estimate(const FriableParams& params);
double ht_estimate(const FriableParams& params, const SaddleData& saddle);

}  // namespace friable
