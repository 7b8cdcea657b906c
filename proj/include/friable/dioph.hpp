#pragma once

// Rational approximation, recurrence detection (Vinogradov-type lemmas),
// the Erdos-Turan discrepancy inequality and Bourgain's major-arc weight.

#include "friable/arith.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace friable {

struct Approximation {
    std::int64_t a = 0;  // 0 <= a < q
    std::int64_t q = 1;
    double delta = 0;    // theta - a/q, taken in (-1/2, 1/2]
};

// Closest a/q to theta (mod 1) with q <= Qmax; ties go to the smaller q.
// Exact continued fractions on the binary expansion of theta.
Approximation rational_approx(double theta, std::int64_t Qmax);

struct RecurrenceInstance {
    double theta = 0;
    int k = 1;
    std::int64_t M = 1;
    double epsilon = 0.1;
    double delta = 0.1;
    std::vector<std::int64_t> host_set;  // optional, sorted, inside [M, 2M]
};

struct VinogradovConfig {
    double search_exponent = 6;  // q <= delta^-search_exponent
    double slack = 10;           // C in ||q theta|| <= C delta^-slack_delta_exponent eps / M^k
    double slack_delta_exponent = 0;
    std::int64_t search_cap = 10'000'000;
};

struct VinogradovResult {
    std::int64_t recurrence_count = 0;  // #{m in [-M, M] : ||m^k theta|| <= eps}
    bool precondition_met = false;      // recurrence_count >= delta M
    std::int64_t search_limit = 0;
    double threshold = 0;
    std::optional<std::int64_t> q;
    double q_theta_norm = 0;  // ||q theta|| for the returned q
};

// ||m^k theta|| computed exactly in fixed point.
double power_phase_norm(FixedPhase theta, std::int64_t m, int k);

VinogradovResult vinogradov_detect(const RecurrenceInstance& inst, const VinogradovConfig& cfg = {});

enum class SparseVerdict { FirstDisjunct, SecondDisjunct, Violation, PreconditionFailed };
std::string to_string(SparseVerdict v);

struct SparseConfig {
    double first_constant = 5;    // eps >= delta / (first_constant * Delta)
    double second_constant = 10;  // ||theta|| <= second_constant * Delta * eps / (delta M^k)
    int samples_per_length = 1000;
    std::uint64_t seed = 1;
};

struct HostDensity {
    double Delta = 0;  // max over sampled progressions of |A n P| M / (|A| |P|)
    std::int64_t progressions = 0;
    std::int64_t min_length = 0;
};

// Samples progressions P in [M, 2M] with lengths on a doubling ladder from L to M.
HostDensity estimate_host_density(const std::vector<std::int64_t>& A, std::int64_t M, std::int64_t L,
                                  int samples_per_length = 1000, std::uint64_t seed = 1);

struct SparseReport {
    SparseVerdict verdict = SparseVerdict::PreconditionFailed;
    std::string precondition;  // reason when the hypotheses fail
    std::int64_t recurrence_count = 0;
    double measured_Delta = 0;
    double theta_norm = 0;
};

// Lemma-style dichotomy for recurrence inside a sparse host set.
// `density`, when given, is reused instead of sampling again.
SparseReport sparse_vinogradov_check(const RecurrenceInstance& inst, double Delta, std::int64_t L,
                                     const SparseConfig& cfg = {}, const HostDensity* density = nullptr);

struct ErdosTuranResult {
    double lhs = 0;
    double rhs = 0;
    std::int64_t count = 0;
    bool holds = false;
};

// Interval I = [lo, lo + length) on R/Z, 0 <= length <= 1.
ErdosTuranResult erdos_turan_check(const std::vector<double>& points, double lo, double length, int J);

// G_{X,Q,Delta}(theta) with X = x^k.
double bourgain_weight(double theta, double x, int k, std::int64_t Q, double Delta);

}  // namespace friable
