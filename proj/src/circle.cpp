#include "friable/circle.hpp"

#include "friable/errors.hpp"
#include "friable/local_factors.hpp"
#include "friable/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace friable {

namespace {

// Sorted (sum, number of ordered tuples) pairs.
using SumTable = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

constexpr std::uint64_t kDenseLimit = 20'000'000;
constexpr std::size_t kChunk = 4096;

std::uint64_t add_count(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw NumericError("tuple count overflowed 64 bits");
    return r;
}

void combine_sorted(SumTable& t)
{
    std::sort(t.begin(), t.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (w > 0 && t[w - 1].first == t[i].first)
            t[w - 1].second = add_count(t[w - 1].second, t[i].second);
        else
            t[w++] = t[i];
    }
    t.resize(w);
}

SumTable merge_tables(const SumTable& a, const SumTable& b)
{
    SumTable out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            out.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first)
            out.push_back(b[j++]);
        else {
            out.emplace_back(a[i].first, add_count(a[i].second, b[j].second));
            ++i;
            ++j;
        }
    }
    return out;
}

// One more summand: {t + v : (t, c) in table, v in values, t + v <= bound}.
SumTable fold(const SumTable& table, const std::vector<std::uint64_t>& values, std::uint64_t bound)
{
    if (bound <= kDenseLimit) {
        std::vector<std::uint64_t> dense(bound + 1, 0);
        for (auto [t, c] : table)
            for (auto v : values) {
                if (v > bound - t)
                    break;
                dense[t + v] = add_count(dense[t + v], c);
            }
        SumTable out;
        for (std::uint64_t t = 0; t <= bound; ++t)
            if (dense[t] != 0)
                out.emplace_back(t, dense[t]);
        return out;
    }
    const std::size_t chunks = (table.size() + kChunk - 1) / kChunk;
    std::vector<SumTable> parts(chunks);
    parallel_for(chunks, [&](std::size_t ci) {
        SumTable part;
        const std::size_t lo = ci * kChunk, hi = std::min(table.size(), lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto [t, c] = table[i];
            for (auto v : values) {
                if (v > bound - t)
                    break;
                part.emplace_back(t + v, c);
            }
        }
        combine_sorted(part);
        parts[ci] = std::move(part);
    });
    SumTable acc;
    for (auto& part : parts)
        acc = merge_tables(acc, part);
    return acc;
}

SumTable fold_power(const std::vector<std::uint64_t>& values, int times, std::uint64_t bound)
{
    SumTable t{{0, 1}};
    for (int i = 0; i < times; ++i)
        t = fold(t, values, bound);
    return t;
}

std::uint64_t pow_checked(std::uint64_t n, int k)
{
    u128 r = 1;
    for (int i = 0; i < k; ++i) {
        r *= n;
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw ResourceError("n^k exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

// k-th powers of the friables up to x that are <= bound, ascending.
std::vector<std::uint64_t> friable_powers(double x, double y, int k, std::uint64_t bound)
{
    std::vector<std::uint64_t> out;
    for (auto n : enumerate_friable_raw(x, y)) {
        const u128 r = [&] {
            u128 acc = 1;
            for (int i = 0; i < k && acc <= bound; ++i)
                acc *= n;
            return acc;
        }();
        if (r > bound)
            break;
        out.push_back(static_cast<std::uint64_t>(r));
    }
    return out;
}

class BigAccumulator {
public:
    void add(u128 v)
    {
        u128 r;
        if (__builtin_add_overflow(lo_, v, &r)) {
            flush();
            lo_ = v;
        } else {
            lo_ = r;
        }
    }
    BigInt value()
    {
        flush();
        return big_;
    }

private:
    void flush()
    {
        BigInt hi = static_cast<std::uint64_t>(lo_ >> 64);
        big_ += (hi << 64) + static_cast<std::uint64_t>(lo_);
        lo_ = 0;
    }
    u128 lo_ = 0;
    BigInt big_ = 0;
};

void check_k(int k)
{
    if (k < 1 || k > 8)
        throw DomainError("k must lie in [1, 8]");
}

}  // namespace

RepresentationQuery make_query(std::uint64_t N, int k, int s, double y, std::optional<double> x)
{
    if (N < 1)
        throw DomainError("N must be >= 1");
    check_k(k);
    if (s < 1)
        throw DomainError("s must be >= 1");
    RepresentationQuery q{N, k, s, 0, y};
    if (x) {
        q.x = *x;
    } else {
        // ceil(N^(1/k)) by integer correction of the floating root.
        auto r = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(N), 1.0 / k)));
        while (r > 1 && static_cast<u128>(pow_wrap(r - 1, k)) >= N)
            --r;
        while (pow_wrap(r, k) < N)
            ++r;
        q.x = static_cast<double>(r);
    }
    FriableParams::make(q.x, q.y);
    return q;
}

BigInt count_exact(const RepresentationQuery& query)
{
    check_k(query.k);
    if (query.s < 1)
        throw DomainError("s must be >= 1");
    const auto values = friable_powers(query.x, query.y, query.k, query.N);
    const int h1 = (query.s + 1) / 2, h2 = query.s / 2;
    const double cost = std::pow(static_cast<double>(values.size()), h1);
    if (cost > kHalfSumBudget) {
        std::ostringstream msg;
        msg << "meet-in-the-middle needs " << values.size() << "^" << h1 << " = " << cost
            << " half-sum tuples, budget is " << kHalfSumBudget;
        throw ResourceError(msg.str());
    }
    SumTable low = fold_power(values, h2, query.N);
    SumTable high = h1 == h2 ? low : fold(low, values, query.N);
    // Join: sums t in high against N - t in low.
    BigAccumulator acc;
    std::size_t j = low.size();
    for (auto [t, c] : high) {
        const std::uint64_t need = query.N - t;
        while (j > 0 && low[j - 1].first > need)
            --j;
        if (j > 0 && low[j - 1].first == need)
            acc.add(static_cast<u128>(c) * low[j - 1].second);
    }
    return acc.value();
}

BigInt representation_coefficient(const FriableParams& params, int k, int s, std::uint64_t N)
{
    check_k(k);
    if (s < 1)
        throw DomainError("s must be >= 1");
    const auto values = friable_powers(params.x, params.y, k, N);
    const double cost = static_cast<double>(s) * static_cast<double>(N + 1) * static_cast<double>(values.size());
    if (N > kDenseLimit || cost > 1e10)
        throw ResourceError("coefficient extraction needs s (N + 1) Psi = " + std::to_string(cost) +
                            " updates with N <= 2e7, budget 1e10");
    const auto t = fold_power(values, s, N);
    auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(N, std::uint64_t{0}));
    return it != t.end() && it->first == N ? BigInt(it->second) : BigInt(0);
}

BigInt moment_exact(const FriableParams& params, int k, int s)
{
    check_k(k);
    if (s < 1)
        throw DomainError("s must be >= 1");
    const double top = static_cast<double>(s) * std::pow(std::floor(params.x), k);
    if (top > kMomentBudget)
        throw ResourceError("moment convolution spans s x^k = " + std::to_string(top) + " > budget " +
                            std::to_string(kMomentBudget));
    const auto bound = static_cast<std::uint64_t>(top);
    const auto values = friable_powers(params.x, params.y, k, pow_checked(params.floor_x(), k));
    const auto t = fold_power(values, s, bound);
    BigAccumulator acc;
    for (auto [sum, c] : t)
        acc.add(static_cast<u128>(c) * c);
    return acc.value();
}

MomentScaling moment_scaling_report(const std::vector<FriableParams>& grid, int k, const std::vector<int>& s_list,
                                    double band)
{
    MomentScaling rep;
    rep.s_list = s_list;
    rep.band = band;
    std::vector<MomentRow> rows(grid.size() * s_list.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const auto& params = grid[i / s_list.size()];
        const int s = s_list[i % s_list.size()];
        MomentRow row;
        row.x = params.x;
        row.y = params.y;
        row.k = k;
        row.s = s;
        row.moment = moment_exact(params, k, s);
        row.psi = psi(params);
        const double log_scale = 2 * s * std::log(static_cast<double>(row.psi)) - k * std::log(params.x);
        row.normalized_ratio = std::exp(std::log(row.moment.convert_to<double>()) - log_scale);
        rows[i] = std::move(row);
    });
    // Rows are ordered by grid point, then s.
    rep.rows = std::move(rows);
    for (std::size_t si = 0; si < s_list.size(); ++si) {
        double lo = INFINITY, hi = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double r = rep.rows[g * s_list.size() + si].normalized_ratio;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rep.spread.push_back(hi / lo);
        rep.bounded.push_back(hi / lo <= band);
    }
    return rep;
}

void write_moment_csv(std::ostream& os, const MomentScaling& report)
{
    os << "x,y,k,s,moment,psi,normalized_ratio\n";
    const auto old = os.precision(17);
    for (const auto& r : report.rows)
        os << r.x << ',' << r.y << ',' << r.k << ',' << r.s << ',' << r.moment << ',' << r.psi << ','
           << r.normalized_ratio << '\n';
    os.precision(old);
}

PredictionReport predict(const RepresentationQuery& query, std::int64_t prime_cutoff, double tail_tol,
                         bool with_exact)
{
    check_k(query.k);
    if (prime_cutoff < 2)
        throw DomainError("prime cutoff must be >= 2");
    const auto params = FriableParams::make(query.x, query.y);
    PredictionReport rep;
    rep.query = query;
    rep.prime_cutoff = prime_cutoff;
    rep.alpha = saddle_alpha(params).alpha;
    rep.psi = psi(params);
    rep.s_alpha_over_k = query.s * rep.alpha / query.k;
    if (!(rep.s_alpha_over_k > 1.1))
        throw DomainError("s alpha / k = " + std::to_string(rep.s_alpha_over_k) +
                          " <= 1.1: the local factors diverge");
    rep.asymptotic_regime = rep.s_alpha_over_k > 2;
    rep.beta_infty = beta_infty_closed(rep.alpha, query.k, query.s);
    const auto N = static_cast<std::int64_t>(query.N);
    const auto primes = primes_up_to(static_cast<double>(prime_cutoff));
    rep.local_factors.resize(primes->size());
    parallel_for(primes->size(), [&](std::size_t i) {
        const auto p = (*primes)[i];
        const auto b = beta_p(p, N, rep.alpha, query.y, query.k, query.s, tail_tol);
        rep.local_factors[i] = {p, b.value, b.tail, b.exact};
    });
    for (const auto& f : rep.local_factors) {
        rep.beta_product *= f.value;
        rep.tail_total += f.tail;
    }
    rep.scale = std::exp(query.s * std::log(static_cast<double>(rep.psi)) - query.k * std::log(query.x));
    rep.predicted = rep.scale * rep.beta_infty * rep.beta_product;
    if (with_exact) {
        try {
            rep.exact = count_exact(query);
            rep.ratio = rep.exact->convert_to<double>() / rep.predicted;
        } catch (const ResourceError&) {
        }
    }
    return rep;
}

}  // namespace friable
