#include "shiftconv/experiments.hpp"
#include "shiftconv/detmat.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/mainterm.hpp"
#include "shiftconv/numeric.hpp"
#include "shiftconv/sl2.hpp"
#include "shiftconv/sums.hpp"
#include "shiftconv/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace shiftconv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    require(ec == std::errc() && p == end, Errc::invalid_argument, "config: bad value for " + key + ": " + v);
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    // from_chars for double is missing in older libstdc++, so go through strtod
    char* endp = nullptr;
    const double out = std::strtod(v.c_str(), &endp);
    require(!v.empty() && endp == v.c_str() + v.size() && std::isfinite(out), Errc::invalid_argument,
            "config: bad value for " + key + ": " + v);
    return out;
}

std::string fmt(double v) { return format_double(v); }

} // namespace

Q64 parse_rational(const std::string& text) {
    const std::string s = trim(text);
    require(!s.empty(), Errc::invalid_argument, "empty rational");
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const i64 p = parse_number<i64>("rational", trim(s.substr(0, slash)));
        const i64 q = parse_number<i64>("rational", trim(s.substr(slash + 1)));
        require(q != 0, Errc::invalid_argument, "rational with zero denominator");
        return Q64(p, q);
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Q64(parse_number<i64>("rational", s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t frac = s.size() - dot - 1;
    require(frac <= 15, Errc::invalid_argument, "too many decimal places: " + s);
    bool neg = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
        neg = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty()) digits = "0";
    i64 num = parse_number<i64>("rational", digits);
    i64 den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    return Q64(neg ? -num : num, den);
}

std::string format_rational(const Q64& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string v = unquote(trim(raw));
    if (key == "k")
        cfg.k = parse_number<int>(key, v);
    else if (key == "h")
        cfg.h = parse_number<i64>(key, v);
    else if (key == "xMin")
        cfg.x_min = parse_real(key, v);
    else if (key == "xMax")
        cfg.x_max = parse_real(key, v);
    else if (key == "gridPoints")
        cfg.grid_points = parse_number<int>(key, v);
    else if (key == "weight")
        cfg.weight = v;
    else if (key == "delta")
        cfg.delta = parse_rational(v);
    else if (key == "theta")
        cfg.theta = parse_rational(v);
    else if (key == "seed")
        cfg.seed = parse_number<u64>(key, v);
    else if (key == "threads")
        cfg.threads = parse_number<int>(key, v);
    else if (key == "tau")
        cfg.tau = parse_real(key, v);
    else if (key == "relTol")
        cfg.rel_tol = parse_real(key, v);
    else
        fail(Errc::invalid_argument, "config: unknown key " + key);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, Errc::invalid_argument,
                "config line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), Errc::io, "cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
    require(cfg.k >= 1 && cfg.k <= 4, Errc::invalid_argument, "config: k must be in [1, 4]");
    require(cfg.h != 0, Errc::invalid_argument, "config: h must be nonzero");
    require(cfg.x_min >= 1e3, Errc::invalid_argument, "config: xMin must be >= 1000");
    require(cfg.x_max <= 1e7, Errc::capacity, "config: xMax must be <= 10^7");
    require(cfg.grid_points >= 6, Errc::invalid_argument, "config: gridPoints must be >= 6");
    require(std::log10(cfg.x_max / cfg.x_min) >= 1.5 - 1e-12, Errc::invalid_argument,
            "config: grid must span at least 1.5 decades");
    const double ratio = std::pow(cfg.x_max / cfg.x_min, 1.0 / (cfg.grid_points - 1));
    require(ratio >= 1.3, Errc::invalid_argument, "config: grid ratio must be >= 1.3");
    require(cfg.delta > Q64(0) && cfg.delta <= Q64(1, 16), Errc::invalid_argument, "config: delta must be in (0, 1/16]");
    require(cfg.theta >= Q64(0) && cfg.theta <= Q64(7, 64), Errc::invalid_argument, "config: theta must be in [0, 7/64]");
    require(cfg.threads >= 1 && cfg.threads <= 256, Errc::invalid_argument, "config: threads must be in [1, 256]");
    require(cfg.tau > 0 && cfg.tau <= 4, Errc::invalid_argument, "config: tau must be in (0, 4]");
    require(cfg.rel_tol >= 1e-14 && cfg.rel_tol <= 1e-6, Errc::invalid_argument, "config: relTol must be in [1e-14, 1e-6]");
    const SmoothWeight w(parse_shape(cfg.weight));
    require(std::floor(w.lo() * cfg.x_min) + 1 + static_cast<double>(cfg.h) >= 1, Errc::domain,
            "config: grid reaches n + h <= 0");
}

std::vector<double> experiment_grid(const ExperimentConfig& cfg) {
    std::vector<double> xs;
    const double span = std::log(cfg.x_max / cfg.x_min);
    for (int i = 0; i < cfg.grid_points; ++i)
        xs.push_back(std::round(cfg.x_min * std::exp(span * i / (cfg.grid_points - 1))));
    xs.back() = std::round(cfg.x_max);
    return xs;
}

ErrorReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const SmoothWeight w(parse_shape(cfg.weight));
    const auto xs = experiment_grid(cfg);
    const ConvolutionSummer summer(cfg.k, cfg.h, xs.back(), w.hi());
    MainTermOptions opt;
    opt.tau = cfg.tau;
    opt.rel_tol = cfg.rel_tol;

    ErrorReport rep;
    rep.rows.resize(xs.size());
    std::vector<double> floors(xs.size(), 0.0);
    std::vector<std::exception_ptr> errors(xs.size());
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < xs.size(); i += stride) {
            try {
                const double x = xs[i];
                const double S = summer.sum(x, w);
                const double M = main_term(cfg.k, cfg.h, x, w, opt).value;
                rep.rows[i] = {x, S, M, S - M, std::fabs(S - M)};
                floors[i] = cfg.rel_tol * std::fabs(M) + 64 * std::numeric_limits<double>::epsilon() * std::fabs(S);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), xs.size());
    if (nt <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (rep.rows[i].absR <= floors[i]) {
            rep.dropped.push_back(xs[i]);
            continue;
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(rep.rows[i].absR));
    }
    if (lx.size() >= 2) {
        const auto fit = fit_line(lx, ly);
        rep.has_slope = true;
        rep.slope = fit.slope;
        rep.intercept = fit.intercept;
    }
    const double ah = std::fabs(static_cast<double>(cfg.h));
    rep.h_exp = std::log(ah) / std::log(xs.back());
    const Q64 hq(std::llround(rep.h_exp * 1e6), 1'000'000);
    rep.predicted_exponent = exponent_row(exponent_calculator(cfg.delta, cfg.theta, hq), "two_term").exponent;
    return rep;
}

void write_csv(const ErrorReport& report, std::ostream& out) {
    out << "x,S,M,R,absR\n";
    for (const auto& r : report.rows)
        out << fmt(r.x) << ',' << fmt(r.S) << ',' << fmt(r.M) << ',' << fmt(r.R) << ',' << fmt(r.absR) << '\n';
}

ExponentTable exponent_calculator(Q64 delta, Q64 theta, Q64 h_exp) {
    require(delta >= Q64(0) && delta <= Q64(1, 16), Errc::invalid_argument, "delta must be in [0, 1/16]");
    require(theta >= Q64(0) && theta < Q64(1, 2), Errc::invalid_argument, "theta must be in [0, 1/2)");
    require(h_exp >= Q64(0) && h_exp < Q64(1), Errc::invalid_argument, "h exponent must be in [0, 1)");
    const Q64 one(1), zero(0);
    auto pos = [&](Q64 v) { return v > zero ? v : zero; };
    ExponentTable t;
    t.delta = delta;
    t.theta = theta;
    t.h_exp = h_exp;
    auto add = [&](std::string name, std::string range, Q64 e, bool applies) {
        t.rows.push_back({std::move(name), std::move(range), e, applies, e < one});
    };

    const Q64 first = one - delta + 2 * delta * theta + pos(h_exp / 4 - Q64(1, 4) + delta / 2);
    const Q64 second =
        one - delta + theta / 3 + 2 * delta * theta / 3 + pos(theta * h_exp / 2 - theta / 6 - 4 * delta * theta / 3);
    add("two_term", "h_exp < 1", std::max(first, second), true);

    const Q64 t1 = Q64(1, 3) + 8 * delta * theta / 3;
    const Q64 t2 = (one - 2 * delta + 2 * (one - 16 * delta) * theta / 3) / (one - 2 * theta);
    add("general_a", "h_exp <= " + format_rational(t1), one - delta + (one + 2 * delta) * theta / 3, h_exp <= t1);
    add("general_b", format_rational(t1) + " <= h_exp <= " + format_rational(t2),
        theta * h_exp / 2 + one - delta + (one - 4 * delta) * theta / 6, h_exp >= t1 && h_exp <= t2);
    add("general_c", format_rational(t2) + " <= h_exp < 1", h_exp / 4 + Q64(3, 4) - delta / 2 + 2 * delta * theta,
        h_exp >= t2);

    const Q64 small_cut(45, 128);
    add("small_a", "h_exp <= 45/128", Q64(15, 16) + 3 * theta / 8, h_exp <= small_cut);
    add("small_b", "45/128 <= h_exp < 1", theta * h_exp / 2 + Q64(15, 16) + theta / 8, h_exp >= small_cut);
    if (theta > zero) {
        // theta h / 2 + 15/16 + theta / 8 < 1
        t.small_threshold_finite = true;
        t.small_threshold = one / (8 * theta) - Q64(1, 4);
    }

    // unconditional headline bound, stated with theta = 7/64
    const Q64 eta = Q64(25, 28) - h_exp;
    add("headline", "h_exp < 25/28", one - 7 * eta / 128, eta > zero);
    return t;
}

const ExponentRow& exponent_row(const ExponentTable& t, const std::string& name) {
    for (const auto& r : t.rows)
        if (r.name == name) return r;
    fail(Errc::invalid_argument, "no exponent row named " + name);
}

bool VerifyReport::all_passed() const {
    return std::all_of(items.begin(), items.end(), [](const VerifyItem& i) { return i.passed; });
}

namespace {

// number of ordered k-tuples with product n, by recursion over divisors found by trial division
u64 count_factorizations(u64 n, int k) {
    if (k == 1) return 1;
    u64 total = 0;
    for (u64 d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        total += count_factorizations(n / d, k - 1);
        if (d * d != n) total += count_factorizations(d, k - 1);
    }
    return total;
}

double ramanujan_exp_sum(u64 d, i64 h, double* imag) {
    std::complex<double> s = 0;
    for (u64 a = 1; a <= d; ++a) {
        if (std::gcd(a, d) != 1) continue;
        const double ang = 2 * M_PI * static_cast<double>(mod(static_cast<i64>(a) * h, static_cast<i64>(d))) / static_cast<double>(d);
        s += std::polar(1.0, ang);
    }
    *imag = std::fabs(s.imag());
    return s.real();
}

std::vector<u64> squarefree_upto(u64 n) {
    std::vector<u64> out;
    for (u64 r = 1; r <= n; ++r)
        if (is_squarefree(r)) out.push_back(r);
    return out;
}

} // namespace

VerifyReport verify_all(u64 seed) {
    VerifyReport rep;
    auto item = [&](std::string name, bool ok, std::string detail) {
        rep.items.push_back({std::move(name), ok, std::move(detail)});
    };

    {
        const u64 N = 20000;
        bool ok = true;
        for (int k = 1; k <= 5 && ok; ++k) {
            const auto t = sieve_dk(k, N);
            for (u64 n = 1; n <= N; n += (n < 2000 ? 1 : 7))
                if (t[n] != count_factorizations(n, k)) ok = false;
        }
        item("sieve_dk", ok, "n <= 20000, k <= 5 against recursive factorization count");
    }
    {
        bool ok = true;
        double worst_imag = 0;
        for (u64 d = 1; d <= 200; ++d)
            for (i64 h = -50; h <= 50; ++h) {
                double im = 0;
                const double re = ramanujan_exp_sum(d, h, &im);
                worst_imag = std::max(worst_imag, im);
                if (std::llround(re) != ramanujan_sum(d, h)) ok = false;
            }
        item("ramanujan_sum", ok && worst_imag < 1e-9, "d <= 200, |h| <= 50, max imaginary part " + fmt(worst_imag));
    }
    {
        bool ok = true;
        u64 checked = 0;
        for (u64 q1 = 1; q1 <= 6; ++q1)
            for (u64 q2 = 1; q2 <= 6; ++q2) {
                const CosetSpace cs(q1, q2);
                const u64 q0 = std::gcd(q1, q2);
                u64 pairs = 0;
                for (const auto& p1 : proj_line(q1))
                    for (const auto& p2 : proj_line(q2)) {
                        // the determinant condition is scaling-invariant modulo q0
                        const i64 det = p1.x * p2.y - p1.y * p2.x;
                        if (std::gcd(static_cast<u64>(mod(det, static_cast<i64>(q0))), q0) == 1) ++pairs;
                    }
                if (cs.labels().size() != pairs) ok = false;
                if (q0 == 1 && cs.labels().size() != dedekind_psi(q1) * dedekind_psi(q2)) ok = false;
                for (const auto& l : cs.labels())
                    if (cs.coset_of(cs.lift(l)) != l) ok = false;
                ++checked;
            }
        item("coset_bijection", ok, std::to_string(checked) + " pairs q1, q2 <= 6; lift and relabel round trip");
    }
    {
        bool ok = true;
        for (auto [r1, r2] : {std::pair<u64, u64>{2, 3}, {6, 10}, {5, 5}, {1, 7}}) {
            for (auto mode : {WeightMode::alpha0, WeightMode::alpha})
                if (!check_automorphy(AutoWeight(r1, r2, 1, mode), 200, seed)) ok = false;
        }
        // divisibility of c by rt2 is not invariant under the group, so this must be detected
        const AutoWeight ref(2, 3);
        const u64 rt2 = ref.rt2();
        const bool control = check_automorphy(
            [rt2](const Mat2& m) { return m.c % static_cast<i64>(rt2) == 0 ? 1 : 0; }, 3, 2, 200, seed);
        item("automorphy", ok && !control, std::string("negative control detected: ") + (control ? "no" : "yes"));
    }
    {
        double rb = 0, rc = 0, rs = 0;
        const auto sf = squarefree_upto(6);
        for (u64 r1 : sf)
            for (u64 r2 : sf) {
                const AutoWeight w(r1, r2);
                const KSumContext ctx(w);
                const double r0sq = static_cast<double>(w.r0() * w.r0());
                for (double B : {1.0, 4.0, 16.0}) {
                    rb = std::max(rb, ksum_b(ctx, B) / (8 * r0sq * (B + 1)));
                    rc = std::max(rc, ksum_c(ctx, B) / (8 * (r0sq * B / static_cast<double>(w.rt1() * w.rt2()) + r0sq)));
                }
                rs = std::max(rs, ksum_sigma_sup(w, 200, seed) / r0sq);
            }
        item("ksum_b_envelope", rb <= 1, "max ratio to 8 r0^2 (B+1): " + fmt(rb));
        item("ksum_c_envelope", rc <= 1, "max ratio to 8 (r0^2 C/(rt1 rt2) + r0^2): " + fmt(rc));
        item("ksum_sigma_envelope", rs <= 1, "max ratio to r0^2: " + fmt(rs));
    }
    {
        double worst = 0;
        for (auto [r1, r2] : {std::pair<u64, u64>{1, 1}, {2, 3}, {2, 2}})
            for (int k = 1; k <= 2; ++k) {
                const AutoWeight w(r1, r2, 1, WeightMode::alpha);
                const u64 r = w.r0() / std::gcd(w.r0(), static_cast<u64>(k));
                if (std::gcd(r, static_cast<u64>(k)) != 1) continue;
                const double r0sq = static_cast<double>(w.r0() * w.r0());
                for (double L : {0.5, 1.0, 2.0, 4.0}) {
                    const double env = 16 * (k * r0sq / L + k * k * r0sq * L / static_cast<double>(w.rt1() * w.rt2()) +
                                             k * k * r0sq);
                    worst = std::max(worst, twisted_ksum(w, k, r, L) / env);
                }
            }
        item("twisted_ksum_envelope", worst <= 1, "max ratio to the twisted envelope: " + fmt(worst));
    }
    {
        std::mt19937_64 rng(seed);
        const auto sf = squarefree_upto(30);
        bool ok = true;
        int done = 0, tries = 0;
        u64 total = 0;
        while (done < 10 && tries < 10000) {
            ++tries;
            const u64 r1 = sf[rng() % sf.size()], r2 = sf[rng() % sf.size()];
            const i64 h = static_cast<i64>(rng() % 41) - 20;
            if (r1 == r2 || h == 0 || std::gcd(static_cast<u64>(std::llabs(h)), r1 * r2) != 1) continue;
            const auto c = correspondence_check(make_instance(r1, r2, h), 10000);
            ok = ok && c.equal;
            total += c.count_direct;
            ++done;
        }
        int splits = 0;
        for (auto [r1, r2, h] : {std::tuple<u64, u64, i64>{2, 3, 6}, {6, 10, 2}, {5, 15, 5}}) {
            const auto s = split_check(make_instance(r1, r2, h), 10000);
            ok = ok && s.equal && s.reduced_det_ok;
            ++splits;
        }
        const auto g = gamma_decomposition_check(make_instance(2, 6, 1), 10000);
        ok = ok && g.ok && g.coprime;
        item("determinant_correspondence", ok,
             std::to_string(done) + " coprime instances (" + std::to_string(total) + " solutions), " +
                 std::to_string(splits) + " gcd splits, gamma cells " + std::to_string(g.cells));
    }
    {
        bool ok = true;
        std::string detail;
        for (Q64 d : {Q64(1, 32), Q64(1, 16)}) {
            const auto r = verify_partition_grid(48, 5, d);
            ok = ok && r.violations == 0 && r.reverify_failures == 0;
            detail += "delta " + format_rational(d) + ": " + std::to_string(r.points) + " points, " +
                      std::to_string(r.violations) + " violations; ";
        }
        item("partition_lemma", ok, detail);
    }
    {
        double worst = 0;
        for (int k : {2, 3}) {
            DirichletApprox a;
            a.k = k;
            a.h = 1;
            worst = std::max(worst, std::fabs(dirichlet_direct(a).value - euler_product(a).value));
        }
        double fd = 0;
        const double eps = 1e-5;
        for (u64 m = 1; m <= 2000; ++m) {
            const double num = (g_beta_eval(m, 1, 1 - eps) - g_beta_eval(m, 1, 1 + eps)) / (2 * eps);
            fd = std::max(fd, std::fabs(num - gprime_eval(m, 1)));
        }
        item("euler_product", worst < 1e-6 && fd < 1e-6,
             "max |direct - euler| " + fmt(worst) + ", max finite-difference error " + fmt(fd));
    }
    {
        const SmoothWeight w;
        bool ok = true;
        for (int k : {2, 3}) {
            double boxes = 0;
            for (const auto& b : dyadic_cover(2000, k)) boxes += box_sum(b, 2000, 1, w);
            const double direct = direct_sum({k, 1, 2000, w});
            const double expanded = factor_expansion_sum(k, 2000, 1, w);
            ok = ok && std::fabs(boxes - direct) <= 1e-9 * direct && std::fabs(expanded - direct) <= 1e-9 * direct;
        }
        item("dyadic_cover", ok, "box sums and factor expansion match the direct sum for k = 2, 3 at x = 2000");
    }
    {
        const SmoothWeight w;
        const double x = 1e5;
        const double S = direct_sum({2, 1, x, w});
        const double M = main_term(2, 1, x, w).value;
        const double rel = std::fabs(S - M) / S;
        item("main_term", rel < 1e-3, "k = 2, x = 10^5: |S - M| / S = " + fmt(rel));
    }
    {
        const auto t = exponent_calculator(Q64(1, 16), Q64(7, 64), Q64(0));
        const auto th = exponent_calculator(Q64(1, 16), Q64(7, 64), Q64(1, 2));
        const bool ok = exponent_row(t, "small_a").exponent == Q64(501, 512) &&
                        exponent_row(t, "two_term").exponent == Q64(501, 512) && t.small_threshold == Q64(25, 28) &&
                        exponent_row(th, "headline").exponent == exponent_row(th, "small_b").exponent;
        item("exponent_table", ok,
             "small_a " + format_rational(exponent_row(t, "small_a").exponent) + ", threshold " +
                 format_rational(t.small_threshold));
    }
    return rep;
}

} // namespace shiftconv
