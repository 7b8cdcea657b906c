#pragma once

// Waring's problem in friable variables: exact representation counts, exact
// moments of E_k and the circle-method prediction.

#include "friable/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace friable {

using BigInt = boost::multiprecision::cpp_int;

struct RepresentationQuery {
    std::uint64_t N = 1;
    int k = 1;
    int s = 1;
    double x = 1;
    double y = 2;
};

// x defaults to ceil(N^(1/k)). Requires N >= 1, 1 <= k <= 8, s >= 1, 2 <= y <= x.
RepresentationQuery make_query(std::uint64_t N, int k, int s, double y, std::optional<double> x = std::nullopt);

// Largest budget for one half of the meet-in-the-middle, in ordered tuples.
inline constexpr double kHalfSumBudget = 5e7;
// Largest s x^k for moment_exact.
inline constexpr double kMomentBudget = 4e9;

// Ordered s-tuples of friables n_j <= x with sum n_j^k = N, by joining
// sorted half-sum tables.
BigInt count_exact(const RepresentationQuery& query);

// Coefficient of z^N in (sum_{n in S(x,y)} z^(n^k))^s, i.e. the integral of
// E_k(theta)^s e(-N theta) over [0, 1], by full s-fold convolution.
BigInt representation_coefficient(const FriableParams& params, int k, int s, std::uint64_t N);

// Integral over [0, 1] of |E_k(theta)|^(2s): sum over t of r_s(t)^2.
BigInt moment_exact(const FriableParams& params, int k, int s);

struct MomentRow {
    double x = 0;
    double y = 0;
    int k = 1;
    int s = 1;
    BigInt moment;
    std::uint64_t psi = 0;
    double normalized_ratio = 0;  // moment / (Psi^(2s) x^-k)
};

struct MomentScaling {
    std::vector<MomentRow> rows;
    std::vector<int> s_list;
    std::vector<double> spread;  // max / min normalized ratio per s
    std::vector<bool> bounded;   // spread <= band per s
    double band = 3;
};

MomentScaling moment_scaling_report(const std::vector<FriableParams>& grid, int k, const std::vector<int>& s_list,
                                    double band = 3);

// Columns x,y,k,s,moment,psi,normalized_ratio.
void write_moment_csv(std::ostream& os, const MomentScaling& report);

struct LocalFactorEntry {
    std::int64_t p = 2;
    double value = 1;
    double tail = 0;
    bool exact = false;
};

struct PredictionReport {
    RepresentationQuery query;
    std::int64_t prime_cutoff = 2;
    double alpha = 0;
    std::uint64_t psi = 0;
    double s_alpha_over_k = 0;
    bool asymptotic_regime = false;  // s alpha / k > 2
    double beta_infty = 0;
    std::vector<LocalFactorEntry> local_factors;
    double beta_product = 1;
    double tail_total = 0;  // sum of the local tail estimates
    double scale = 0;       // Psi^s x^-k
    double predicted = 0;
    std::optional<BigInt> exact;
    std::optional<double> ratio;  // exact / predicted
};

// x^-k Psi(x, y)^s beta_infty prod_{p <= P} beta_p. Requires s alpha / k > 1.1
// so that every local series converges; the exact count is attached when the
// meet-in-the-middle budget allows.
PredictionReport predict(const RepresentationQuery& query, std::int64_t prime_cutoff, double tail_tol = 1e-10,
                         bool with_exact = true);

}  // namespace friable
