#pragma once

// Friable Weyl sums E_k(x, y; theta), the local transforms Phi-check and
// H_{a/q}, the major-arc main terms and the arc geometry.

#include "friable/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace friable {

struct RationalPhase {
    double theta = 0;  // in [0, 1)
    std::int64_t a = 0;
    std::int64_t q = 1;
    double delta = 0;
    double height = 1;  // q (1 + |delta| x^k)

    // a/q + delta as a fixed-point phase; a/q is exact.
    FixedPhase fixed() const;
};

// Validates gcd(a, q) = 1 and 0 <= a < q, fills theta and height.
RationalPhase make_phase(std::int64_t a, std::int64_t q, double delta, double x, int k);

// Best a/q with q <= Qmax, then delta and height for (x, k).
RationalPhase rational_decompose(double theta, double x, int k, std::int64_t Qmax);

// Caches the friable integers up to x and their k-th powers modulo 2^128.
class WeylEvaluator {
public:
    WeylEvaluator(const FriableParams& params, int k);
    WeylEvaluator(std::vector<std::uint64_t> friables, int k);

    int k() const { return k_; }
    std::size_t size() const { return n_.size(); }
    const std::vector<std::uint64_t>& support() const { return n_; }

    // Sum over friable n <= limit of e(n^k theta); limit defaults to all.
    cplx operator()(FixedPhase theta) const;
    cplx sum_upto(FixedPhase theta, double limit) const;

private:
    void check_range() const;
    int k_;
    std::vector<std::uint64_t> n_;
    std::vector<u128> nk_;
};

cplx weyl_sum(const FriableParams& params, int k, double theta);
cplx weyl_sum(const FriableParams& params, int k, const RationalPhase& phase);

// Complex Gamma via the Lanczos approximation (g = 7, 9 terms).
cplx complex_gamma(cplx z);

// Phi-check(lambda, s) = s int_0^1 e(lambda t^k) t^(s-1) dt for real lambda.
// Power series for |2 pi lambda| <= 8; otherwise the contour is turned onto
// two vertical rays, the ray from 1 done by Gauss-Legendre panels or, for
// |2 pi lambda| >= 40, by its asymptotic series cut at the smallest term.
cplx phi_check(double lambda, cplx s, int k);

// Same, with Gamma(s/k) cached for repeated evaluation at fixed (s, k).
class PhiCheck {
public:
    PhiCheck(cplx s, int k);
    cplx operator()(double lambda) const;

private:
    cplx beta_;
    cplx gamma_beta_;
    cplx gamma_beta_conj_;
};

// H_{a/q}(s) for real s; y may be +infinity.
cplx h_aq(std::int64_t a, std::int64_t q, double alpha, double y, int k);

// T(d1) = sum over b mod q with gcd(b, q) = d1 of e(a b^k / q), keyed by divisor.
std::vector<std::pair<std::int64_t, cplx>> gcd_class_sums(std::int64_t a, std::int64_t q, int k);

cplx major_arc_main_term(const FriableParams& params, int k, const RationalPhase& phase, const SaddleData& saddle);
cplx major_arc_main_term(double psi_value, double x, int k, const RationalPhase& phase, double alpha, double y);

cplx mk_main_term(const FriableParams& params, int k, const RationalPhase& phase);
cplx mk_main_term(const WeylEvaluator& eval, double x, double y, const RationalPhase& phase);

struct Arc {
    std::int64_t a;
    std::int64_t q;
    double half_width;
};

struct ArcSet {
    double Q = 1;
    double x = 1;
    int k = 1;
    std::vector<Arc> arcs;
    double total_measure = 0;
    bool overlap_possible = false;  // 2 Q^2 > x^k
};

ArcSet arc_decompose(double Q, double x, int k);

// theta in M(Q, x): some q <= Q has ||q theta|| <= Q / x^k.
bool in_major_arcs(FixedPhase theta, double Q, double x, int k);

struct ScanRow {
    double theta;
    std::int64_t q;
    double delta;
    double abs_E_over_psi;
};

struct MinorArcReport {
    double Q = 0;
    double sup = 0;
    double argmax_theta = 0;
    std::int64_t points = 0;  // scanned points outside the arcs
    std::vector<ScanRow> rows;
};

struct MinorArcDecay {
    std::vector<MinorArcReport> reports;
    double c_hat = 0;  // minus the log-log slope of sup against Q
    bool strictly_decreasing = false;
};

// Scan points: a golden-ratio offset grid of grid_size points plus, for every
// a/q with q <= 2Q, the point a/q itself and a geometric ladder just outside
// its arc. Only points outside M(Q, x) count.
MinorArcReport minor_arc_scan(const FriableParams& params, int k, double Q, std::int64_t grid_size,
                              bool keep_rows = false);
// One shared point set for all Q; each sup is over the points outside M(Q, x).
MinorArcDecay minor_arc_decay(const FriableParams& params, int k, const std::vector<double>& Qs,
                              std::int64_t grid_size);

void write_scan_csv(std::ostream& os, const MinorArcReport& report);

}  // namespace friable
