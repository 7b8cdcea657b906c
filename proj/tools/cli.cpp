#include "cli.hpp"

#include "friable/characters.hpp"
#include "friable/circle.hpp"
#include "friable/core.hpp"
#include "friable/errors.hpp"
#include "friable/local_factors.hpp"
#include "friable/parallel.hpp"
#include "friable/weyl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace friable::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& why)
{
    if (!ok)
        throw UsageError(why);
}

Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

double parse_real(const std::string& text, const std::string& name)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("--" + name + ": not a number: " + text);
    }
    require(used == text.size(), "--" + name + ": not a number: " + text);
    require(!std::isnan(v), "--" + name + " must not be NaN");
    return v;
}

void check_k(int k) { require(k >= 1 && k <= 8, "--k must lie in [1, 8]"); }
void check_s(int s) { require(s >= 1 && s <= 64, "--s must lie in [1, 64]"); }
void check_alpha(double a) { require(a > 0 && a <= 1, "--alpha must lie in (0, 1]"); }

void check_params(double x, double y)
{
    require(std::isfinite(x), "--x must be finite");
    require(y >= 2, "--y must be >= 2");
    require(y <= x, "--y must not exceed --x");
    require(x <= 1e15, "--x must be <= 1e15");
}

struct Spec {
    std::string name;
    std::string help;
};

// Subcommand help: the module operation and the statement it computes or checks.
const std::vector<Spec>& specs()
{
    static const std::vector<Spec> s = {
        {"psi", "friable-core/psi: count Psi(x, y) of y-friable n <= x."},
        {"alpha", "friable-core/saddle_alpha: saddle point alpha(x, y) of x^s zeta(s, y) and the "
                  "Hildebrand-Tenenbaum estimate of Psi(x, y)."},
        {"rho", "friable-core/dickman_rho: Dickman's function, u rho'(u) = -rho(u - 1)."},
        {"weyl", "weyl/weyl_sum: E_k(x, y; theta) = sum over friable n <= x of e(n^k theta). With --a/--q "
                 "the phase is a/q + delta and the major-arc main terms are reported as well."},
        {"arcs", "weyl/arc_decompose: major arcs |theta - a/q| <= Q / (q x^k), q <= Q.\n"
                 "CSV columns: a,q,half_width."},
        {"gauss", "characters/gauss_sum_k: G_k(q, a, chi) for every character mod q against the bound "
                  "2 k^omega(q) tau(q) min(q / sqrt(q*), sqrt(a q)).\n"
                  "CSV columns: index,conductor,order,max_ratio."},
        {"hq", "weyl/h_aq and local-factors/s_xy_qa: H_{a/q}(alpha) and the mu_q-weighted sum "
               "S(x, y; q, a), which coincide."},
        {"singular", "local-factors/singular_series_truncated: sum over q <= Q of S(q)."},
        {"beta", "local-factors/beta_p: beta_p = sum_l S(p^l) with tail bound. With --infty: "
                 "beta_infty = Gamma(alpha/k + 1)^s / Gamma(s alpha / k) and its truncated Fourier integral."},
        {"predict", "circle/predict: x^-k Psi(x, y)^s beta_infty prod_{p <= P} beta_p against the exact "
                    "count of ordered representations N = n_1^k + ... + n_s^k."},
        {"count", "circle/count_exact: ordered representations of N as s k-th powers of friables <= x, "
                  "by meet in the middle."},
        {"moment", "circle/moment_exact: the integral of |E_k|^(2s) over [0, 1], an exact integer. With "
                   "--xs: the sweep moment / (Psi^(2s) x^-k).\n"
                   "CSV columns: x,y,k,s,moment,psi,normalized_ratio."},
        {"scan-minor", "weyl/minor_arc_scan: sup of |E_k| / Psi over scanned theta outside the major arcs.\n"
                       "CSV columns (single Q): theta,q,delta,abs_E_over_psi; (several Q): Q,sup,argmax_theta,points."},
        {"verify", "Exact-identity self tests. Suites: appendix (local measure projection, sum_{d|q} S(d) = "
                   "q M(q), H_{a/q} = S(x, y; q, a), the bound on S(x, y; q, a)), moments (convolution "
                   "moments and coefficients against brute force), erdos-turan (discrepancy inequality), all."},
    };
    return s;
}

void validate(RunConfig& c, const std::string& y_text)
{
    require(c.threads >= 1 && c.threads <= 256, "--threads must lie in [1, 256]");
    if (c.has("y"))
        c.y = parse_real(y_text, "y");
    const auto& cmd = c.subcommand;
    const bool sweep = cmd == "arcs" || cmd == "gauss" || cmd == "scan-minor" || (cmd == "moment" && c.has("xs"));
    require(c.format != Format::Csv || sweep, cmd + ": CSV output is only available for sweeps");

    if (cmd == "psi") {
        check_params(c.x, c.y);
        require(c.strategy == "auto" || c.strategy == "sieve" || c.strategy == "lattice",
                "--strategy must be auto, sieve or lattice");
    } else if (cmd == "alpha") {
        check_params(c.x, c.y);
        require(c.tol > 0 && c.tol < 1, "--tol must lie in (0, 1)");
    } else if (cmd == "rho") {
        require(c.u >= 0 && c.u <= 100, "--u must lie in [0, 100]");
    } else if (cmd == "weyl") {
        check_params(c.x, c.y);
        check_k(c.k);
        const bool rational = c.has("a") || c.has("q") || c.has("delta");
        require(!(rational && c.has("theta")), "give either --theta or --a/--q/--delta");
        require(rational || c.has("theta"), "give --theta or --a and --q");
        if (rational) {
            require(c.q >= 1, "--q must be >= 1");
            require(c.a >= 0 && c.a < c.q && std::gcd(c.a, c.q) == 1, "--a must satisfy 0 <= a < q, gcd(a, q) = 1");
            require(std::isfinite(c.delta) && std::abs(c.delta) < 0.5, "--delta must satisfy |delta| < 1/2");
        } else {
            require(std::isfinite(c.theta), "--theta must be finite");
        }
    } else if (cmd == "arcs") {
        require(c.Q >= 1, "--Q must be >= 1");
        require(c.x >= 1 && std::isfinite(c.x), "--x must be >= 1");
        check_k(c.k);
        require(std::pow(static_cast<double>(c.Q), 2) <= 5e7, "--Q too large: Q^2 arcs exceed 5e7");
    } else if (cmd == "gauss") {
        require(c.q >= 1 && c.q <= 2000, "--q must lie in [1, 2000]");
        check_k(c.k);
    } else if (cmd == "hq") {
        require(c.q >= 1 && c.q <= 100000, "--q must lie in [1, 1e5]");
        require(std::gcd(c.a, c.q) == 1, "--a must be coprime to --q");
        check_alpha(c.alpha);
        require(c.y >= 2, "--y must be >= 2 (inf allowed)");
        check_k(c.k);
    } else if (cmd == "singular") {
        require(c.Q >= 1 && c.Q <= 1000000, "--Q must lie in [1, 1e6]");
        check_alpha(c.alpha);
        require(c.y >= 2, "--y must be >= 2 (inf allowed)");
        check_k(c.k);
        check_s(c.s);
        require(c.s * c.alpha / c.k > 2.1, "singular series needs s alpha / k > 2.1");
    } else if (cmd == "beta") {
        require(c.alpha > 0, "--alpha must be > 0");
        check_k(c.k);
        check_s(c.s);
        if (c.infty) {
            require(c.s * c.alpha / c.k > 1, "beta_infty needs s alpha / k > 1");
            require(c.Delta > 0 && c.Delta <= 1e6, "--Delta must lie in (0, 1e6]");
        } else {
            check_alpha(c.alpha);
            require(c.p >= 2 && is_prime(c.p), "--p must be prime");
            require(c.y >= 2, "--y must be >= 2 (inf allowed)");
            require(c.tail_tol > 0 && c.tail_tol < 1, "--tail-tol must lie in (0, 1)");
            require(c.s * c.alpha / c.k > 1.1, "beta_p needs s alpha / k > 1.1");
        }
    } else if (cmd == "predict" || cmd == "count") {
        require(c.N >= 1, "--N must be >= 1");
        check_k(c.k);
        check_s(c.s);
        require(c.y >= 2, "--y must be >= 2");
        try {
            const auto q = make_query(c.N, c.k, c.s, c.y, c.has("x") ? std::optional<double>(c.x) : std::nullopt);
            c.x = q.x;
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        if (cmd == "predict") {
            require(c.prime_cutoff >= 2 && c.prime_cutoff <= 1000000, "--prime-cutoff must lie in [2, 1e6]");
            require(c.tail_tol > 0 && c.tail_tol < 1, "--tail-tol must lie in (0, 1)");
        }
    } else if (cmd == "moment") {
        check_k(c.k);
        if (c.has("xs")) {
            require(!c.xs.empty(), "--xs needs at least one value");
            for (double x : c.xs)
                check_params(x, c.y_equals_x ? x : c.y);
            if (c.s_list.empty())
                c.s_list = {c.s};
            for (int s : c.s_list)
                check_s(s);
        } else {
            if (c.y_equals_x)
                c.y = c.x;
            check_params(c.x, c.y);
            check_s(c.s);
        }
    } else if (cmd == "scan-minor") {
        check_params(c.x, c.y);
        check_k(c.k);
        require(!c.Qs.empty(), "--Q needs at least one value");
        for (double Q : c.Qs)
            require(Q >= 1 && std::isfinite(Q), "--Q values must be >= 1");
        require(c.grid >= 1 && c.grid <= 1000000, "--grid must lie in [1, 1e6]");
    } else if (cmd == "verify") {
        require(c.suite == "appendix" || c.suite == "moments" || c.suite == "erdos-turan" || c.suite == "all",
                "--suite must be appendix, moments, erdos-turan or all");
    }
}

struct Output {
    Json inputs = Json::object();
    Json result = Json::object();
    Json tolerances = Json::object();
    Json tails = Json::object();
    std::string plain;
    std::string csv;
};

std::string scalar(const Json& v) { return v.dump(); }

Output run_psi(const RunConfig& c)
{
    Output o;
    o.inputs = {{"x", c.x}, {"y", c.y}, {"strategy", c.strategy}};
    const auto params = FriableParams::make(c.x, c.y);
    const auto strategy = c.strategy == "sieve"     ? EnumerationStrategy::Sieve
                          : c.strategy == "lattice" ? EnumerationStrategy::Lattice
                                                    : EnumerationStrategy::Auto;
    const auto v = c.strategy == "auto" ? psi(params) : enumerate_friable(params, strategy).size();
    o.result = {{"psi", v}};
    o.plain = std::to_string(v);
    return o;
}

Output run_alpha(const RunConfig& c)
{
    Output o;
    o.inputs = {{"x", c.x}, {"y", c.y}, {"tol", c.tol}};
    const auto params = FriableParams::make(c.x, c.y);
    const auto sd = saddle_alpha(params, c.tol);
    o.result = {{"alpha", sd.alpha},
                {"sigma2", sd.sigma2},
                {"zeta_alpha_y", sd.zeta_alpha_y},
                {"ht_estimate", ht_estimate(params, sd)},
                {"iterations", sd.iterations}};
    o.tolerances = {{"saddle_residual", sd.residual}};
    o.plain = scalar(sd.alpha);
    return o;
}

Output run_rho(const RunConfig& c)
{
    Output o;
    o.inputs = {{"u", c.u}};
    const DickmanTable table(std::max(20.0, std::ceil(c.u) + 1));
    const double v = dickman_rho(c.u, table);
    o.result = {{"rho", v}};
    o.tolerances = {{"grid_step", table.grid_step()}};
    o.plain = scalar(v);
    return o;
}

Output run_weyl(const RunConfig& c)
{
    Output o;
    const auto params = FriableParams::make(c.x, c.y);
    const bool rational = !c.has("theta");
    const std::uint64_t ps = psi(params);
    if (!rational) {
        o.inputs = {{"x", c.x}, {"y", c.y}, {"k", c.k}, {"theta", c.theta}};
        const cplx e = weyl_sum(params, c.k, c.theta);
        o.result = {{"E", complex_json(e)}, {"abs", std::abs(e)}, {"psi", ps},
                    {"abs_over_psi", std::abs(e) / static_cast<double>(ps)}};
        o.plain = scalar(e.real()) + " " + scalar(e.imag());
        return o;
    }
    o.inputs = {{"x", c.x}, {"y", c.y}, {"k", c.k}, {"a", c.a}, {"q", c.q}, {"delta", c.delta}};
    const auto phase = make_phase(c.a, c.q, c.delta, c.x, c.k);
    const auto sd = saddle_alpha(params);
    const cplx e = weyl_sum(params, c.k, phase);
    const cplx main = major_arc_main_term(params, c.k, phase, sd);
    Json res = {{"E", complex_json(e)},
                {"abs", std::abs(e)},
                {"psi", ps},
                {"theta", phase.theta},
                {"height", phase.height},
                {"main_term", complex_json(main)},
                {"relative_deviation", std::abs(e - main) / static_cast<double>(ps)}};
    if (c.q <= 1000) {
        const cplx mk = mk_main_term(params, c.k, phase);
        res["mk_main_term"] = complex_json(mk);
        res["mk_relative_deviation"] = std::abs(e - mk) / static_cast<double>(ps);
    }
    o.result = res;
    o.tolerances = {{"saddle_residual", sd.residual}};
    o.plain = scalar(e.real()) + " " + scalar(e.imag());
    return o;
}

Output run_arcs(const RunConfig& c)
{
    Output o;
    o.inputs = {{"Q", c.Q}, {"x", c.x}, {"k", c.k}};
    const auto set = arc_decompose(static_cast<double>(c.Q), c.x, c.k);
    o.result = {{"arcs", set.arcs.size()}, {"total_measure", set.total_measure},
                {"overlap_possible", set.overlap_possible}};
    std::ostringstream csv;
    csv.precision(17);
    csv << "a,q,half_width\n";
    for (const auto& a : set.arcs)
        csv << a.a << ',' << a.q << ',' << a.half_width << '\n';
    o.csv = csv.str();
    o.plain = std::to_string(set.arcs.size()) + " " + scalar(set.total_measure);
    return o;
}

Output run_gauss(const RunConfig& c)
{
    Output o;
    o.inputs = {{"q", c.q}, {"k", c.k}};
    const CharacterGroup group(c.q);
    std::ostringstream csv;
    csv.precision(17);
    csv << "index,conductor,order,max_ratio\n";
    double worst = 0;
    std::int64_t checks = 0;
    bool holds = true;
    for (std::int64_t i = 0; i < group.size(); ++i) {
        const auto chi = group.character(i);
        const auto cond = conductor(chi);
        const auto G = gauss_sums_all(chi, c.k);
        // max |G(c)| over each orbit {a a' : a' a unit}, i.e. over gcd(c, q).
        std::vector<double> orbit_max(static_cast<std::size_t>(c.q) + 1, 0.0);
        for (std::int64_t r = 0; r < c.q; ++r) {
            const auto g = std::gcd(r, c.q);
            orbit_max[static_cast<std::size_t>(g)] = std::max(orbit_max[static_cast<std::size_t>(g)], std::abs(G[static_cast<std::size_t>(r)]));
        }
        double ratio = 0;
        for (std::int64_t a = 1; a <= c.q; ++a) {
            const double m = orbit_max[static_cast<std::size_t>(std::gcd(a, c.q))];
            const double bound = gauss_sum_bound(c.q, a, cond, c.k);
            ratio = std::max(ratio, m / bound);
            holds = holds && m <= bound + 1e-8 * static_cast<double>(c.q);
            ++checks;
        }
        worst = std::max(worst, ratio);
        csv << i << ',' << cond << ',' << chi.order() << ',' << ratio << '\n';
    }
    o.result = {{"characters", group.size()}, {"checks", checks}, {"max_ratio", worst}, {"holds", holds}};
    o.tolerances = {{"absolute_slack", 1e-8 * static_cast<double>(c.q)}};
    o.csv = csv.str();
    o.plain = std::string(holds ? "holds " : "fails ") + scalar(worst);
    return o;
}

Output run_hq(const RunConfig& c)
{
    Output o;
    o.inputs = {{"a", c.a}, {"q", c.q}, {"alpha", c.alpha}, {"y", std::isinf(c.y) ? Json("inf") : Json(c.y)},
                {"k", c.k}};
    const cplx h = h_aq(c.a, c.q, c.alpha, c.y, c.k);
    const cplx s = s_xy_qa(c.q, c.a, c.alpha, c.y, c.k);
    o.result = {{"h_aq", complex_json(h)}, {"s_xy_qa", complex_json(s)}, {"difference", std::abs(h - s)}};
    o.plain = scalar(h.real()) + " " + scalar(h.imag());
    return o;
}

Output run_singular(const RunConfig& c)
{
    Output o;
    o.inputs = {{"N", c.N}, {"Q", c.Q}, {"alpha", c.alpha}, {"y", std::isinf(c.y) ? Json("inf") : Json(c.y)},
                {"k", c.k}, {"s", c.s}};
    const auto r = singular_series_truncated(static_cast<std::int64_t>(c.N), c.Q, c.alpha, c.y, c.k, c.s);
    o.result = {{"value", r.value}, {"imag", r.imag}};
    o.tails = {{"series", r.tail_estimate}};
    o.plain = scalar(r.value);
    return o;
}

Output run_beta(const RunConfig& c)
{
    Output o;
    if (c.infty) {
        o.inputs = {{"alpha", c.alpha}, {"k", c.k}, {"s", c.s}, {"Delta", c.Delta}};
        const double closed = beta_infty_closed(c.alpha, c.k, c.s);
        const auto num = beta_infty_numeric(c.alpha, c.k, c.s, c.Delta);
        o.result = {{"closed", closed}, {"numeric", num.value}, {"numeric_imag", num.imag},
                    {"relative_difference", std::abs(num.value - closed) / closed}};
        o.tails = {{"truncation", num.tail_estimate}};
        o.plain = scalar(closed);
        return o;
    }
    o.inputs = {{"p", c.p}, {"N", c.N}, {"alpha", c.alpha}, {"y", std::isinf(c.y) ? Json("inf") : Json(c.y)},
                {"k", c.k}, {"s", c.s}, {"tail_tol", c.tail_tol}};
    const auto b = beta_p(c.p, static_cast<std::int64_t>(c.N), c.alpha, c.y, c.k, c.s, c.tail_tol);
    o.result = {{"beta_p", b.value}, {"levels", b.levels}, {"exact", b.exact}, {"terms", b.terms}};
    o.tails = {{"beta_p", b.tail}};
    o.tolerances = {{"tail_tol", c.tail_tol}};
    o.plain = scalar(b.value);
    return o;
}

Json query_inputs(const RunConfig& c)
{
    return {{"N", c.N}, {"k", c.k}, {"s", c.s}, {"x", c.x}, {"y", c.y}};
}

Output run_predict(const RunConfig& c)
{
    Output o;
    o.inputs = query_inputs(c);
    o.inputs["prime_cutoff"] = c.prime_cutoff;
    o.inputs["tail_tol"] = c.tail_tol;
    const auto q = make_query(c.N, c.k, c.s, c.y, c.x);
    const auto r = predict(q, c.prime_cutoff, c.tail_tol, !c.no_exact);
    Json factors = Json::array();
    Json tails = Json::object();
    for (const auto& f : r.local_factors) {
        factors.push_back({{"p", f.p}, {"beta_p", f.value}, {"tail", f.tail}, {"exact", f.exact}});
        tails[std::to_string(f.p)] = f.tail;
    }
    o.result = {{"alpha", r.alpha},
                {"psi", r.psi},
                {"s_alpha_over_k", r.s_alpha_over_k},
                {"asymptotic_regime", r.asymptotic_regime},
                {"beta_infty", r.beta_infty},
                {"beta_p_partial", factors},
                {"beta_product", r.beta_product},
                {"scale", r.scale},
                {"predicted", r.predicted},
                {"exact", r.exact ? Json(r.exact->str()) : Json(nullptr)},
                {"ratio", r.ratio ? Json(*r.ratio) : Json(nullptr)}};
    o.tails = {{"beta_p", tails}, {"total", r.tail_total}};
    o.tolerances = {{"tail_tol", c.tail_tol}};
    o.plain = scalar(r.predicted) + (r.exact ? " " + r.exact->str() : std::string());
    return o;
}

Output run_count(const RunConfig& c)
{
    Output o;
    o.inputs = query_inputs(c);
    const auto v = count_exact(make_query(c.N, c.k, c.s, c.y, c.x));
    o.result = {{"count", v.str()}};
    o.plain = v.str();
    return o;
}

Output run_moment(const RunConfig& c)
{
    Output o;
    if (!c.has("xs")) {
        o.inputs = {{"x", c.x}, {"y", c.y}, {"k", c.k}, {"s", c.s}};
        const auto params = FriableParams::make(c.x, c.y);
        const auto v = moment_exact(params, c.k, c.s);
        o.result = {{"moment", v.str()}, {"psi", psi(params)}};
        o.plain = v.str();
        return o;
    }
    std::vector<FriableParams> grid;
    for (double x : c.xs)
        grid.push_back(FriableParams::make(x, c.y_equals_x ? x : c.y));
    o.inputs = {{"xs", c.xs}, {"y", c.y_equals_x ? Json("x") : Json(c.y)}, {"k", c.k}, {"s_list", c.s_list}};
    const auto rep = moment_scaling_report(grid, c.k, c.s_list);
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"x", r.x}, {"y", r.y}, {"k", r.k}, {"s", r.s}, {"moment", r.moment.str()},
                        {"psi", r.psi}, {"normalized_ratio", r.normalized_ratio}});
    o.result = {{"rows", rows}, {"spread", rep.spread}, {"bounded", rep.bounded}};
    o.tolerances = {{"band", rep.band}};
    std::ostringstream csv;
    write_moment_csv(csv, rep);
    o.csv = csv.str();
    std::ostringstream plain;
    for (std::size_t i = 0; i < rep.s_list.size(); ++i)
        plain << (i ? "\n" : "") << "s=" << rep.s_list[i] << " spread=" << scalar(rep.spread[i])
              << (rep.bounded[i] ? " bounded" : " unbounded");
    o.plain = plain.str();
    return o;
}

Output run_scan(const RunConfig& c)
{
    Output o;
    o.inputs = {{"x", c.x}, {"y", c.y}, {"k", c.k}, {"Q", c.Qs}, {"grid", c.grid}};
    const auto params = FriableParams::make(c.x, c.y);
    std::ostringstream csv, plain;
    if (c.Qs.size() == 1) {
        const auto rep = minor_arc_scan(params, c.k, c.Qs[0], c.grid, c.format == Format::Csv);
        o.result = {{"Q", rep.Q}, {"sup", rep.sup}, {"argmax_theta", rep.argmax_theta}, {"points", rep.points}};
        write_scan_csv(csv, rep);
        plain << scalar(rep.sup);
    } else {
        const auto dec = minor_arc_decay(params, c.k, c.Qs, c.grid);
        Json reps = Json::array();
        csv.precision(17);
        csv << "Q,sup,argmax_theta,points\n";
        for (const auto& r : dec.reports) {
            reps.push_back({{"Q", r.Q}, {"sup", r.sup}, {"argmax_theta", r.argmax_theta}, {"points", r.points}});
            csv << r.Q << ',' << r.sup << ',' << r.argmax_theta << ',' << r.points << '\n';
        }
        o.result = {{"reports", reps}, {"c_hat", dec.c_hat}, {"strictly_decreasing", dec.strictly_decreasing}};
        plain << scalar(dec.c_hat);
    }
    o.csv = csv.str();
    o.plain = plain.str();
    return o;
}

}  // namespace

ParseOutcome parse_and_validate(const std::vector<std::string>& args)
{
    RunConfig c;
    std::string format = "json";
    std::string y_text;
    CLI::App app{"Friable Waring toolkit: friable counts, Weyl sums, local factors and exact counts."};
    app.name("friable");
    app.require_subcommand(1);
    app.add_option("--format", format, "Output format: json, csv (sweeps only) or plain")
        ->check(CLI::IsMember({"json", "csv", "plain"}));
    app.add_option("--seed", c.seed, "Seed for randomized suites");
    app.add_option("--threads", c.threads, "Worker threads for sweeps");
    app.add_flag("--timings", c.timings, "Add wall-clock timings to the diagnostics");

    std::map<std::string, CLI::App*> subs;
    for (const auto& s : specs())
        subs[s.name] = app.add_subcommand(s.name, s.help);
    // Shared options carry over to the subcommands, so both "--threads 2 psi" and "psi --threads 2" work.
    for (auto& [name, sub] : subs) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "plain"}));
        sub->add_option("--seed", c.seed, "Seed for randomized suites");
        sub->add_option("--threads", c.threads, "Worker threads");
        sub->add_flag("--timings", c.timings, "Add timings to the diagnostics");
    }

    auto xy = [&](CLI::App* a, bool y_required = true) {
        a->add_option("--x", c.x, "Upper bound x")->required();
        auto* y = a->add_option("--y", y_text, "Friability bound y");
        if (y_required)
            y->required();
    };
    xy(subs["psi"]);
    subs["psi"]->add_option("--strategy", c.strategy, "auto, sieve or lattice");
    xy(subs["alpha"]);
    subs["alpha"]->add_option("--tol", c.tol, "Saddle residual tolerance");
    subs["rho"]->add_option("--u", c.u, "Argument u >= 0")->required();

    auto* weyl = subs["weyl"];
    xy(weyl);
    weyl->add_option("--k", c.k, "Power k")->required();
    weyl->add_option("--theta", c.theta, "Phase theta");
    weyl->add_option("--a", c.a, "Numerator a");
    weyl->add_option("--q", c.q, "Denominator q");
    weyl->add_option("--delta", c.delta, "Offset delta");

    auto* arcs = subs["arcs"];
    arcs->add_option("--Q", c.Q, "Height Q")->required();
    arcs->add_option("--x", c.x, "Length x")->required();
    arcs->add_option("--k", c.k, "Power k")->required();

    auto* gauss = subs["gauss"];
    gauss->add_option("--q", c.q, "Modulus q")->required();
    gauss->add_option("--k", c.k, "Power k")->required();

    auto* hq = subs["hq"];
    hq->add_option("--a", c.a, "Numerator a")->required();
    hq->add_option("--q", c.q, "Denominator q")->required();
    hq->add_option("--alpha", c.alpha, "Exponent alpha in (0, 1]")->required();
    hq->add_option("--y", y_text, "Friability bound y, or inf")->required();
    hq->add_option("--k", c.k, "Power k")->required();

    auto* sing = subs["singular"];
    sing->add_option("--N", c.N, "Target N")->required();
    sing->add_option("--Q", c.Q, "Truncation Q")->required();
    sing->add_option("--alpha", c.alpha, "Exponent alpha")->required();
    sing->add_option("--y", y_text, "Friability bound y, or inf")->required();
    sing->add_option("--k", c.k, "Power k")->required();
    sing->add_option("--s", c.s, "Number of summands s")->required();

    auto* beta = subs["beta"];
    beta->add_flag("--infty", c.infty, "Archimedean factor instead of beta_p");
    beta->add_option("--p", c.p, "Prime p");
    beta->add_option("--N", c.N, "Target N");
    beta->add_option("--alpha", c.alpha, "Exponent alpha")->required();
    beta->add_option("--y", y_text, "Friability bound y, or inf");
    beta->add_option("--k", c.k, "Power k")->required();
    beta->add_option("--s", c.s, "Number of summands s")->required();
    beta->add_option("--tail-tol", c.tail_tol, "Tail tolerance for beta_p");
    beta->add_option("--Delta", c.Delta, "Truncation of the Fourier integral");

    for (const char* name : {"predict", "count"}) {
        auto* sub = subs[name];
        sub->add_option("--N", c.N, "Target N")->required();
        sub->add_option("--k", c.k, "Power k")->required();
        sub->add_option("--s", c.s, "Number of summands s")->required();
        sub->add_option("--y", y_text, "Friability bound y")->required();
        sub->add_option("--x", c.x, "Bound on the summands, default ceil(N^(1/k))");
    }
    subs["predict"]->add_option("--prime-cutoff", c.prime_cutoff, "Primes p <= P in the local product");
    subs["predict"]->add_option("--tail-tol", c.tail_tol, "Tail tolerance per beta_p");
    subs["predict"]->add_flag("--no-exact", c.no_exact, "Skip the exact count");

    auto* mom = subs["moment"];
    mom->add_option("--x", c.x, "Upper bound x");
    mom->add_option("--y", y_text, "Friability bound y");
    mom->add_flag("--y-equals-x", c.y_equals_x, "Take y = x");
    mom->add_option("--k", c.k, "Power k")->required();
    mom->add_option("--s", c.s, "Half the moment order");
    mom->add_option("--xs", c.xs, "Sweep over these x")->delimiter(',');
    mom->add_option("--s-list", c.s_list, "Sweep over these s")->delimiter(',');

    auto* scan = subs["scan-minor"];
    xy(scan);
    scan->add_option("--k", c.k, "Power k")->required();
    scan->add_option("--Q", c.Qs, "Arc height(s) Q, comma separated")->required()->delimiter(',');
    scan->add_option("--grid", c.grid, "Number of grid points");

    subs["verify"]->add_option("--suite", c.suite, "appendix, moments, erdos-turan or all");

    ParseOutcome out;
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out.exit_code = 0;
        out.output = app.help();
        for (auto* sub : app.get_subcommands())
            out.output = sub->help();
        return out;
    } catch (const CLI::CallForAllHelp&) {
        out.exit_code = 0;
        out.output = app.help("", CLI::AppFormatMode::All);
        return out;
    } catch (const CLI::ParseError& e) {
        out.exit_code = 2;
        out.error = e.what();
        return out;
    }
    auto* chosen = app.get_subcommands().front();
    c.subcommand = chosen->get_name();
    for (auto* opt : chosen->get_options())
        if (opt->count() > 0 && !opt->get_lnames().empty())
            c.given.insert(opt->get_lnames().front());
    c.format = format == "csv" ? Format::Csv : format == "plain" ? Format::Plain : Format::Json;
    try {
        validate(c, y_text);
    } catch (const UsageError& e) {
        out.exit_code = 2;
        out.error = e.what();
        return out;
    }
    out.config = c;
    return out;
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    set_thread_count(c.threads);
    const auto start = std::chrono::steady_clock::now();
    try {
        if (c.subcommand == "verify") {
            const auto rows = run_verify(c.suite, c.seed);
            bool all = true;
            Json arr = Json::array();
            for (const auto& r : rows) {
                all = all && r.pass;
                arr.push_back({{"suite", r.suite}, {"check", r.check}, {"cases", r.cases}, {"pass", r.pass},
                               {"detail", r.detail}});
            }
            if (c.format == Format::Json) {
                Json diag = {{"tolerances", Json::object()}, {"tails", Json::object()}};
                if (c.timings)
                    diag["timings"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
                out << Json{{"inputs", {{"suite", c.suite}, {"seed", c.seed}}},
                            {"result", {{"rows", arr}, {"all_pass", all}}},
                            {"diagnostics", diag}}
                           .dump(2)
                    << '\n';
            } else {
                for (const auto& r : rows)
                    out << r.suite << '\t' << r.check << '\t' << r.cases << '\t' << (r.pass ? "PASS" : "FAIL")
                        << (r.detail.empty() ? "" : "\t" + r.detail) << '\n';
            }
            return all ? 0 : 1;
        }
        Output o;
        const auto& cmd = c.subcommand;
        if (cmd == "psi")
            o = run_psi(c);
        else if (cmd == "alpha")
            o = run_alpha(c);
        else if (cmd == "rho")
            o = run_rho(c);
        else if (cmd == "weyl")
            o = run_weyl(c);
        else if (cmd == "arcs")
            o = run_arcs(c);
        else if (cmd == "gauss")
            o = run_gauss(c);
        else if (cmd == "hq")
            o = run_hq(c);
        else if (cmd == "singular")
            o = run_singular(c);
        else if (cmd == "beta")
            o = run_beta(c);
        else if (cmd == "predict")
            o = run_predict(c);
        else if (cmd == "count")
            o = run_count(c);
        else if (cmd == "moment")
            o = run_moment(c);
        else if (cmd == "scan-minor")
            o = run_scan(c);
        else
            throw UsageError("unknown subcommand " + cmd);

        if (c.format == Format::Plain) {
            out << o.plain << '\n';
        } else if (c.format == Format::Csv) {
            out << o.csv;
        } else {
            Json diag = {{"tolerances", o.tolerances}, {"tails", o.tails}};
            if (c.timings)
                diag["timings"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
            out << Json{{"inputs", o.inputs}, {"result", o.result}, {"diagnostics", diag}}.dump(2) << '\n';
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::string type = "error";
        if (dynamic_cast<const DomainError*>(&e))
            type = "domain";
        else if (dynamic_cast<const ResourceError*>(&e))
            type = "resource";
        else if (dynamic_cast<const NumericError*>(&e))
            type = "numeric";
        err << type << " error: " << e.what() << '\n';
        if (c.format == Format::Json)
            out << Json{{"error", {{"type", type}, {"message", e.what()}}}}.dump(2) << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const auto parsed = parse_and_validate(args);
    if (!parsed.config) {
        if (parsed.exit_code == 0)
            out << parsed.output;
        else
            err << parsed.error << '\n';
        return parsed.exit_code;
    }
    return dispatch(*parsed.config, out, err);
}

}  // namespace friable::cli
