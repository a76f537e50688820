#include "shiftconv/mainterm.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace shiftconv {

namespace {

int nu_p(i64 h, u64 p) {
    if (h == 0) return std::numeric_limits<int>::max();
    u64 a = static_cast<u64>(h < 0 ? -h : h);
    int e = 0;
    while (a % p == 0) {
        a /= p;
        ++e;
    }
    return e;
}

// local factors of g and g' at p^alpha, with nu = v_p(h)
double g_local(u64 p, int alpha, int nu) {
    const double ip = 1.0 / static_cast<double>(p);
    return 1.0 + std::min(alpha, nu) * (1.0 - ip) - (alpha > nu ? ip : 0.0);
}

double gp_local(u64 p, int alpha, int nu) {
    const double ip = 1.0 / static_cast<double>(p);
    const int t = std::min(alpha, nu);
    double s = 0.5 * t * (t + 1) * (1.0 - ip);
    if (alpha > nu) s -= (nu + 1) * ip;
    return s * std::log(static_cast<double>(p));
}

// integral_0^inf e^{-a v} (L + v)^j dv
double exp_poly_integral(double a, double L, int j) {
    double s = 0, fact = 1;
    for (int i = 0; i <= j; ++i) {
        if (i > 0) fact *= i;
        s += static_cast<double>(binomial(j, i)) * std::pow(L, j - i) * fact / std::pow(a, i + 1);
    }
    return s;
}

// s * integral_N^inf t^{-s} q(log t) dt for a polynomial q
double tail_integral(const std::vector<double>& q, double s, double N) {
    const double L = std::log(N), a = s - 1.0;
    double v = 0;
    for (std::size_t j = 0; j < q.size(); ++j) v += q[j] * exp_poly_integral(a, L, static_cast<int>(j));
    return s * std::pow(N, 1.0 - s) * v;
}

u64 local_dk(int k, int alpha) {
    // d_k(p^alpha)
    if (k == 0) return alpha == 0 ? 1 : 0;
    return binomial(static_cast<u64>(alpha + k - 1), static_cast<u64>(k - 1));
}

// sum_alpha d_{k-1}(p^alpha) g(p^alpha, h) p^{-alpha s}
double e_factor(int k, i64 h, u64 p, double s) {
    const int nu = nu_p(h, p);
    const double x = std::pow(static_cast<double>(p), -s);
    double total = 1.0, xa = 1.0;
    for (int alpha = 1; alpha <= 60; ++alpha) {
        xa *= x;
        const double term = static_cast<double>(local_dk(k - 1, alpha)) * g_local(p, alpha, nu) * xa;
        total += term;
        if (std::fabs(term) < 1e-12 * std::fabs(total) * (1.0 - x) && alpha > nu + 1) break;
    }
    return total;
}

double generic_factor(int k, u64 p, double s) {
    const double ip = 1.0 / static_cast<double>(p);
    return ip + (1.0 - ip) * std::pow(1.0 - std::pow(static_cast<double>(p), -s), -(k - 1));
}

std::vector<u64> prime_divisors_of(i64 h) {
    std::vector<u64> ps;
    if (h == 0) return ps;
    for (auto [p, e] : factorize(static_cast<u64>(h < 0 ? -h : h)).factors) ps.push_back(p);
    return ps;
}

void check_dirichlet(const DirichletApprox& a) {
    require(a.k >= 1 && a.k <= 8, Errc::invalid_argument, "k must be in [1, 8]");
    require(a.s >= 1.5, Errc::domain, "Dirichlet series evaluated only for s >= 1.5");
    require(a.h != 0, Errc::invalid_argument, "h must be nonzero");
}

} // namespace

double lambda_eval(i64 h, u64 d, double xi) {
    require(xi > 0, Errc::domain, "lambda: xi must be positive");
    const double c = static_cast<double>(ramanujan_sum(d, h));
    const double ld = std::log(static_cast<double>(d));
    return c / static_cast<double>(d) * (std::log(xi) + 2 * kEulerGamma - 2 * ld);
}

Rational g_eval(u64 m, i64 h) {
    require(m >= 1, Errc::invalid_argument, "g: m must be >= 1");
    Rational s(0);
    for (u64 d : divisors(m)) s += Rational(ramanujan_sum(d, h), static_cast<i64>(d));
    return s;
}

double gprime_eval(u64 m, i64 h) {
    require(m >= 1, Errc::invalid_argument, "g': m must be >= 1");
    double s = 0;
    for (u64 d : divisors(m)) {
        const double dd = static_cast<double>(d);
        s += static_cast<double>(ramanujan_sum(d, h)) * std::log(dd) / dd;
    }
    return s;
}

double g_beta_eval(u64 m, i64 h, double beta) {
    require(m >= 1, Errc::invalid_argument, "g_beta: m must be >= 1");
    double s = 0;
    for (u64 d : divisors(m)) s += static_cast<double>(ramanujan_sum(d, h)) * std::pow(static_cast<double>(d), -beta);
    return s;
}

SingularTables singular_tables(u64 M, i64 h) {
    const auto spf = spf_sieve(M);
    SingularTables t;
    t.g.assign(M + 1, 0.0);
    t.gp.assign(M + 1, 0.0);
    if (M >= 1) t.g[1] = 1.0;
    for (u64 m = 2; m <= M; ++m) {
        const u64 p = spf[m];
        u64 rest = m;
        int alpha = 0;
        while (rest % p == 0) {
            rest /= p;
            ++alpha;
        }
        const int nu = nu_p(h, p);
        const double gl = g_local(p, alpha, nu), gpl = gp_local(p, alpha, nu);
        t.g[m] = t.g[rest] * gl;
        t.gp[m] = t.gp[rest] * gl + t.g[rest] * gpl;
    }
    return t;
}

DirichletValue dirichlet_direct(const DirichletApprox& a) {
    check_dirichlet(a);
    require(a.N >= 64 && a.N <= 10'000'000, Errc::capacity, "dirichlet_direct: N must be in [64, 10^7]");
    DirichletValue out;
    if (a.k == 1) {
        out.value = out.partial = 1.0;
        return out;
    }
    const auto dk = sieve_dk(a.k - 1, a.N);
    const auto tab = singular_tables(a.N, a.h);
    std::vector<double> coef(a.N + 1, 0.0);
    for (u64 m = 1; m <= a.N; ++m) coef[m] = static_cast<double>(dk[m]) * tab.g[m];

    out.partial = chunked_sum(1, a.N + 1, [&](u64 m) { return coef[m] * std::pow(static_cast<double>(m), -a.s); });

    // mean value A(t) = sum_{m<=t} coef[m] ~ t Q(log t), deg Q = k - 2, fitted on [N/64, N]
    const int deg = a.k - 2;
    const int samples = 256;
    std::vector<u64> ts;
    for (int i = 0; i < samples; ++i)
        ts.push_back(static_cast<u64>(std::llround(std::exp(std::log(a.N / 64.0) + std::log(64.0) * i / (samples - 1)))));
    ts.back() = a.N;
    std::vector<double> design, rhs;
    double running = 0;
    u64 m = 0;
    double A_N = 0;
    for (u64 t : ts) {
        while (m < t) {
            ++m;
            running += coef[m];
        }
        for (int j = 0; j <= deg; ++j) design.push_back(std::pow(std::log(static_cast<double>(t)), j));
        rhs.push_back(running / static_cast<double>(t));
        A_N = running;
    }
    const auto q = least_squares(design, ts.size(), static_cast<std::size_t>(deg + 1), rhs);
    const double N = static_cast<double>(a.N);
    out.tail_estimate = -A_N * std::pow(N, -a.s) + tail_integral(q, a.s, N);

    // |g(m,h)| <= d(h) and sum_{m<=t} d_j(m) <= t (log t + 1)^{j-1} / (j-1)!
    const int j = a.k - 1;
    std::vector<double> qb(static_cast<std::size_t>(j), 0.0);
    double fact = 1;
    for (int i = 2; i < j; ++i) fact *= i;
    // (log t + 1)^{j-1} expanded in powers of log t
    for (int i = 0; i < j; ++i) qb[static_cast<std::size_t>(i)] = static_cast<double>(binomial(j - 1, i)) / fact;
    const u64 ah = static_cast<u64>(a.h < 0 ? -a.h : a.h);
    out.tail_bound = static_cast<double>(divisors(ah).size()) * tail_integral(qb, a.s, N);
    out.value = out.partial + out.tail_estimate;
    return out;
}

double prime_zeta(double s) {
    require(s > 1, Errc::domain, "prime zeta needs s > 1");
    double total = 0;
    for (int n = 1; n <= 200; ++n) {
        const double z = n * s;
        if (z * std::log(2.0) > 45 && n > 1) break;
        const int mu = mobius(static_cast<u64>(n));
        if (mu == 0) continue;
        const double lz = z > 30 ? std::log1p(boost::math::zeta(z) - 1.0) : std::log(boost::math::zeta(z));
        total += mu * lz / n;
    }
    return total;
}

EulerValue euler_product(const DirichletApprox& a) {
    check_dirichlet(a);
    require(a.P >= 2 && a.P <= 100'000, Errc::capacity, "euler_product: P must be in [2, 10^5]");
    EulerValue out;
    const auto hp = prime_divisors_of(a.h);
    auto divides_h = [&](u64 p) { return std::find(hp.begin(), hp.end(), p) != hp.end(); };
    std::vector<double> logs;
    for (u64 p : primes_up_to(a.P))
        if (!divides_h(p)) logs.push_back(std::log(generic_factor(a.k, p, a.s)));
    for (u64 p : hp) logs.push_back(std::log(e_factor(a.k, a.h, p, a.s)));
    out.truncated = std::exp(pairwise_sum(logs));

    // primes above P: log F_p = j u - j u v + (j/2) u^2 + ..., u = p^-s, v = 1/p
    const double j = a.k - 1;
    auto above = [&](double sigma) {
        double s = 0;
        std::vector<double> terms;
        for (u64 p : primes_up_to(a.P)) terms.push_back(std::pow(static_cast<double>(p), -sigma));
        s = prime_zeta(sigma) - pairwise_sum(terms);
        for (u64 p : hp)
            if (p > a.P) s -= std::pow(static_cast<double>(p), -sigma);
        return s;
    };
    const double log_tail = j * (above(a.s) - above(a.s + 1) + 0.5 * above(2 * a.s));
    out.tail_correction = std::exp(log_tail);
    out.value = out.truncated * out.tail_correction;
    return out;
}

double regularized_product(const DirichletApprox& a) {
    check_dirichlet(a);
    const auto hp = prime_divisors_of(a.h);
    std::vector<double> logs;
    auto reg = [&](u64 p) { return (a.k - 1) * std::log1p(-std::pow(static_cast<double>(p), -a.s)); };
    for (u64 p : primes_up_to(a.P)) {
        if (std::find(hp.begin(), hp.end(), p) != hp.end()) continue;
        logs.push_back(std::log(generic_factor(a.k, p, a.s)) + reg(p));
    }
    for (u64 p : hp) logs.push_back(std::log(e_factor(a.k, a.h, p, a.s)) + reg(p));
    return std::exp(pairwise_sum(logs));
}

namespace {

struct Tuple {
    std::vector<u64> a; // non-increasing
    u64 m;
    double mult;
};

void enumerate_tuples(int slots, u64 cap, double limit, double etau, std::vector<u64>& cur, u64 prod,
                      std::vector<Tuple>& out) {
    if (slots == 0) {
        // multiplicity of the sorted tuple among ordered ones
        double mult = 1;
        int n = static_cast<int>(cur.size());
        for (int i = 2; i <= n; ++i) mult *= i;
        for (std::size_t i = 0; i < cur.size();) {
            std::size_t j = i;
            while (j < cur.size() && cur[j] == cur[i]) ++j;
            for (std::size_t r = 2; r <= j - i; ++r) mult /= static_cast<double>(r);
            i = j;
        }
        out.push_back({cur, prod, mult});
        return;
    }
    const double amax = cur.empty() ? 0 : static_cast<double>(cur.front());
    for (u64 v = 1; v <= cap; ++v) {
        const double top = cur.empty() ? static_cast<double>(v) : amax;
        // need e^{-tau} max(a) * m < limit, and later entries only grow m
        if (top / etau * static_cast<double>(prod * v) >= limit) break;
        cur.push_back(v);
        enumerate_tuples(slots - 1, v, limit, etau, cur, prod * v, out);
        cur.pop_back();
    }
}

} // namespace

MainTermResult main_term(int k, i64 h, double x, const SmoothWeight& w, const MainTermOptions& opt) {
    require(k >= 1 && k <= 4, Errc::invalid_argument, "main_term: k must be in [1, 4]");
    require(x >= 1 && x <= 1e7, Errc::capacity, "main_term: x must be in [1, 10^7]");
    require(h != 0, Errc::invalid_argument, "main_term: h must be nonzero");
    require(w.lo() * x + h > 0, Errc::domain, "main_term: log argument um + h must stay positive");
    require(opt.tau > 0 && opt.tau <= 4, Errc::invalid_argument, "main_term: tau must be in (0, 4]");
    MainTermResult res;
    const double hd = static_cast<double>(h);
    const double I1 = integrate(
        w, x, [&](double xi) { return std::log(xi + hd) + 2 * kEulerGamma; }, opt.rel_tol);
    if (k == 1) {
        res.value = I1;
        res.tuples = 1;
        res.closed_form = 1;
        res.m_max = 1;
        return res;
    }
    const double I0 = integrate(w, x, [](double) { return 1.0; }, opt.rel_tol);
    const double etau = std::exp(opt.tau);
    const double limit = w.hi() * x;

    std::vector<Tuple> tuples;
    std::vector<u64> cur;
    enumerate_tuples(k - 1, static_cast<u64>(std::ceil(etau * limit)) + 1, limit, etau, cur, 1, tuples);
    for (const auto& t : tuples) res.m_max = std::max(res.m_max, t.m);
    const auto tab = singular_tables(res.m_max, h);
    res.tuples = tuples.size();

    // step in t = log a_i - log a_j: 0 below -tau, 1 above 0
    auto S = [&](double t) { return smooth_step(t / opt.tau + 1.0); };

    std::vector<double> contrib(tuples.size(), 0.0);
    std::vector<unsigned char> closed(tuples.size(), 0);
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < tuples.size(); i += stride) {
            const Tuple& t = tuples[i];
            const double m = static_cast<double>(t.m);
            const double g = tab.g[t.m], gp = tab.gp[t.m];
            const double amax = static_cast<double>(t.a.front());
            const double ulo = std::max(w.lo() * x / m, amax / etau), uhi = w.hi() * x / m;
            if (!(uhi > ulo)) continue;
            if (w.lo() * x / m >= etau * amax) {
                contrib[i] = t.mult * (g * I1 - 2 * gp * I0) / m;
                closed[i] = 1;
                continue;
            }
            const std::size_t n = t.a.size();
            std::vector<double> la(n), stat(n, 1.0);
            for (std::size_t j = 0; j < n; ++j) la[j] = std::log(static_cast<double>(t.a[j]));
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = 0; l < n; ++l)
                    if (l != j) stat[j] *= S(la[j] - la[l]);
            auto rho1 = [&](double u) {
                const double lu = std::log(u);
                double psi1 = 1.0, total = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    psi1 *= S(lu - la[j]);
                    total += stat[j] * S(la[j] - lu);
                }
                return psi1 / (psi1 + total);
            };
            auto f = [&](double u) {
                const double um = u * m;
                const double wv = w(um / x);
                if (wv == 0.0) return 0.0;
                return rho1(u) * wv * (g * (std::log(um + hd) + 2 * kEulerGamma) - 2 * gp);
            };
            // panel breaks at the edges of the transition zone
            std::vector<double> cuts{ulo};
            for (double c : {amax / etau, amax, amax * etau})
                if (c > ulo && c < uhi) cuts.push_back(c);
            cuts.push_back(uhi);
            // tolerance relative to the tuple's size with rho_1 = 1, so near-empty ranges terminate
            const double scale = (std::fabs(g) * std::fabs(I1) + 2 * std::fabs(gp) * I0) / m;
            contrib[i] = t.mult * adaptive_integrate(f, cuts, opt.rel_tol, opt.rel_tol * scale).value;
        }
    };
    const std::size_t nt = static_cast<std::size_t>(std::max(1, opt.threads));
    if (nt == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nt; ++i) pool.emplace_back(work, i, nt);
        for (auto& th : pool) th.join();
    }
    for (auto c : closed) res.closed_form += c;
    res.value = k * pairwise_sum(contrib);
    return res;
}

CertainFit certain_main_fit(u64 r1, u64 r2, i64 h, const std::vector<double>& xs, const std::vector<double>& values) {
    (void)h;
    require(xs.size() == values.size(), Errc::invalid_argument, "certain_main_fit: size mismatch");
    require(xs.size() >= 6, Errc::domain, "certain_main_fit: need at least 6 grid points");
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    require(std::log10(*hi / *lo) >= 1.5 - 1e-12, Errc::domain, "certain_main_fit: grid must span 1.5 decades");
    CertainFit fit;
    fit.rbar = static_cast<double>(std::max(r1, r2));
    // fit values / (x / rbar) so every grid point carries equal relative weight
    std::vector<double> design, scaled;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double L = std::log(xs[i]);
        design.insert(design.end(), {1.0, L, L * L});
        scaled.push_back(values[i] / (xs[i] / fit.rbar));
    }
    const auto c = least_squares(design, xs.size(), 3, scaled);
    fit.coeffs = {c[0], c[1], c[2]};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double L = std::log(xs[i]);
        fit.residuals.push_back(values[i] - xs[i] / fit.rbar * (c[0] + c[1] * L + c[2] * L * L));
    }
    return fit;
}

} // namespace shiftconv
