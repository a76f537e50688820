#include "shiftconv/sl2.hpp"
#include "shiftconv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace shiftconv {

namespace {

using i128 = __int128;

i64 mod128(i128 a, i64 m) {
    i128 r = a % m;
    if (r < 0) r += m;
    return static_cast<i64>(r);
}

i64 narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) fail(Errc::capacity, "matrix entry exceeds 64 bits");
    return static_cast<i64>(v);
}

int valuation(u64 n, u64 p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

i64 ipow(i64 p, int e) {
    i64 r = 1;
    while (e-- > 0) r *= p;
    return r;
}

// CRT idempotent: 1 mod pe, 0 mod q / pe
i64 idempotent(i64 pe, i64 q) {
    const i64 rest = q / pe;
    return mod128(static_cast<i128>(rest) * inv_mod(rest % pe, pe), q);
}

} // namespace

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 mat_mul_checked(const Mat2& x, const Mat2& y) {
    auto dot = [](i64 p, i64 q, i64 r, i64 s) { return narrow(static_cast<i128>(p) * q + static_cast<i128>(r) * s); };
    return {dot(x.a, y.a, x.b, y.c), dot(x.a, y.b, x.b, y.d), dot(x.c, y.a, x.d, y.c), dot(x.c, y.b, x.d, y.d)};
}

ProjLine::ProjLine(u64 q) : q_(q) {
    require(q >= 1, Errc::invalid_argument, "projective line modulus must be >= 1");
    require(q <= 1'000'000, Errc::capacity, "projective line modulus exceeds 10^6");
    for (auto [p, e] : factorize(q).factors) {
        const i64 pe = ipow(static_cast<i64>(p), e);
        parts_.push_back({static_cast<i64>(p), pe, idempotent(pe, static_cast<i64>(q))});
    }
}

bool ProjLine::is_primitive(i64 x, i64 y) const {
    return std::gcd(std::gcd(mod(x, q_), mod(y, q_)), static_cast<i64>(q_)) == 1 || q_ == 1;
}

ProjPoint ProjLine::normalize(i64 x, i64 y) const {
    require(is_primitive(x, y), Errc::invalid_argument, "point is not primitive modulo q");
    const i64 q = static_cast<i64>(q_);
    i128 X = 0, Y = 0;
    for (const auto& L : parts_) {
        i64 xl = mod(x, L.pe), yl = mod(y, L.pe);
        if (yl % L.p != 0) {
            xl = mod128(static_cast<i128>(xl) * inv_mod(yl, L.pe), L.pe);
            yl = 1;
        } else {
            yl = mod128(static_cast<i128>(yl) * inv_mod(xl, L.pe), L.pe);
            xl = 1;
        }
        X += static_cast<i128>(L.crt) * xl;
        Y += static_cast<i128>(L.crt) * yl;
    }
    return {mod128(X, q), mod128(Y, q)};
}

u64 ProjLine::size() const { return dedekind_psi(q_); }

std::vector<ProjPoint> ProjLine::points() const {
    const i64 q = static_cast<i64>(q_);
    std::vector<ProjPoint> pts{{0, 0}};
    for (const auto& L : parts_) {
        std::vector<std::pair<i64, i64>> local;
        for (i64 t = 0; t < L.pe; ++t) local.emplace_back(t, 1);
        for (i64 s = 0; s < L.pe / L.p; ++s) local.emplace_back(1, L.p * s);
        std::vector<ProjPoint> next;
        next.reserve(pts.size() * local.size());
        for (const auto& P : pts)
            for (auto [lx, ly] : local)
                next.push_back({mod128(P.x + static_cast<i128>(L.crt) * lx, q),
                                mod128(P.y + static_cast<i128>(L.crt) * ly, q)});
        pts.swap(next);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

std::vector<ProjPoint> proj_line(u64 q) { return ProjLine(q).points(); }

CosetSpace::CosetSpace(u64 q1, u64 q2)
    : q1_(q1), q2_(q2), q0_(std::gcd(q1, q2)), line1_(q1), line2_(q2) {
    const auto p1 = line1_.points();
    const auto p2 = line2_.points();
    require(p1.size() * p2.size() <= kMaxEnumeration, Errc::capacity, "coset enumeration too large");
    for (const auto& a : p1)
        for (const auto& b : p2) {
            CosetLabel l{a, b};
            if (valid(l)) labels_.push_back(l);
        }
}

bool CosetSpace::valid(const CosetLabel& l) const {
    const i128 det = static_cast<i128>(l.top.x) * l.bottom.y - static_cast<i128>(l.top.y) * l.bottom.x;
    return std::gcd(mod128(det, static_cast<i64>(q0_)), static_cast<i64>(q0_)) == 1 || q0_ == 1;
}

CosetLabel CosetSpace::coset_of(const Mat2& m) const {
    require(m.det() == 1, Errc::invalid_argument, "coset_of: matrix must have determinant 1");
    return {line1_.normalize(m.a, m.b), line2_.normalize(m.c, m.d)};
}

Mat2 CosetSpace::lift(const CosetLabel& l) const {
    require(valid(l), Errc::invalid_argument, "lift: invalid coset label");
    const i64 N = static_cast<i64>(std::lcm(q1_, q2_));
    if (N == 1) return {};
    i128 A = 0, B = 0, C = 0, D = 0;
    for (auto [p64, e] : factorize(static_cast<u64>(N)).factors) {
        const i64 p = static_cast<i64>(p64);
        const int e1 = valuation(q1_, p64), e2 = valuation(q2_, p64);
        const i64 pe = ipow(p, e);
        auto m = [pe](i128 v) { return mod128(v, pe); };
        i64 a, b, c, d;
        const i64 x1 = m(l.top.x), y1 = m(l.top.y), x2 = m(l.bottom.x), y2 = m(l.bottom.y);
        const i64 det = m(static_cast<i128>(x1) * y2 - static_cast<i128>(y1) * x2);
        if (e1 >= e2) {
            a = x1;
            b = y1;
            if (e2 == 0) {
                // complete the top row
                if (a % p != 0) {
                    c = 0;
                    d = inv_mod(a, pe);
                } else {
                    c = m(-static_cast<i128>(inv_mod(b, pe)));
                    d = 0;
                }
            } else {
                const i64 di = inv_mod(det, pe);
                c = m(static_cast<i128>(di) * x2);
                d = m(static_cast<i128>(di) * y2);
            }
        } else {
            c = x2;
            d = y2;
            if (e1 == 0) {
                if (d % p != 0) {
                    a = inv_mod(d, pe);
                    b = 0;
                } else {
                    a = 0;
                    b = m(-static_cast<i128>(inv_mod(c, pe)));
                }
            } else {
                const i64 di = inv_mod(det, pe);
                a = m(static_cast<i128>(di) * x1);
                b = m(static_cast<i128>(di) * y1);
            }
        }
        const i128 t = idempotent(pe, N);
        A += t * a;
        B += t * b;
        C += t * c;
        D += t * d;
    }
    Mat2 g = lift_sl2(mod128(A, N), mod128(B, N), mod128(C, N), mod128(D, N), N);
    if (g.det() != 1 || coset_of(g) != l) fail(Errc::internal, "lift: failed to realize coset label");
    return g;
}

Mat2 lift_sl2(i64 a, i64 b, i64 c, i64 d, i64 N) {
    require(N >= 1, Errc::invalid_argument, "lift_sl2: modulus must be >= 1");
    if (N == 1) return {};
    a = mod(a, N);
    b = mod(b, N);
    c = mod(c, N);
    d = mod(d, N);
    require(mod128(static_cast<i128>(a) * d - static_cast<i128>(b) * c, N) == 1 % N, Errc::invalid_argument,
            "lift_sl2: determinant is not 1 modulo N");
    if (c == 0) c = N;
    i64 dd = d;
    while (std::gcd(c, dd) != 1) dd += N;
    i64 x, y;
    // x dd + (-y) c = 1
    i64 u, v;
    ext_gcd(dd, c, x, y);
    y = -y;
    ext_gcd(c, dd, u, v);
    const i64 mm = mod128(static_cast<i128>(u) * (a - x) + static_cast<i128>(v) * (b - y), N);
    Mat2 g{narrow(x + static_cast<i128>(mm) * c), narrow(y + static_cast<i128>(mm) * dd), c, dd};
    if (g.det() != 1) fail(Errc::internal, "lift_sl2: determinant check failed");
    return g;
}

std::vector<CosetLabel> coset_list(u64 q1, u64 q2) { return CosetSpace(q1, q2).labels(); }
CosetLabel coset_of(const Mat2& m, u64 q1, u64 q2) { return CosetSpace(q1, q2).coset_of(m); }
Mat2 lift_coset(const CosetLabel& label, u64 q1, u64 q2) { return CosetSpace(q1, q2).lift(label); }

AutoWeight::AutoWeight(u64 r1, u64 r2, i64 h, WeightMode mode) : r1_(r1), r2_(r2), h_(h), mode_(mode) {
    require(r1 >= 1 && r2 >= 1 && is_squarefree(r1) && is_squarefree(r2), Errc::invalid_argument,
            "r1 and r2 must be squarefree positive integers");
    r0_ = std::gcd(r1, r2);
    rt1_ = r1 / r0_;
    rt2_ = r2 / r0_;
}

int AutoWeight::operator()(const Mat2& m) const {
    if (m.a % static_cast<i64>(rt2_) != 0 || m.c % static_cast<i64>(rt1_) != 0) return 0;
    if (mode_ == WeightMode::alpha0) return 1;
    const i128 v = static_cast<i128>(m.a) * m.d - static_cast<i128>(h_) * static_cast<i64>(rt2_);
    return v % static_cast<i128>(r2_) == 0 ? 1 : 0;
}

Mat2 random_sl2(std::mt19937_64& rng, int max_len) {
    static const Mat2 gens[3] = {{0, -1, 1, 0}, {1, 1, 0, 1}, {1, -1, 0, 1}};
    const int len = static_cast<int>(rng() % (max_len + 1));
    Mat2 g;
    for (int i = 0; i < len; ++i) g = mat_mul_checked(g, gens[rng() % 3]);
    return g;
}

bool check_automorphy(const MatrixWeight& weight, u64 q1, u64 q2, int trials, u64 seed) {
    require(trials >= 1, Errc::invalid_argument, "trials must be >= 1");
    const i64 a = static_cast<i64>(q1), b = static_cast<i64>(q2);
    const Mat2 gens[5] = {{1, a, 0, 1}, {1, -a, 0, 1}, {1, 0, b, 1}, {1, 0, -b, 1}, {-1, 0, 0, -1}};
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        Mat2 gamma;
        const int len = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) gamma = mat_mul_checked(gamma, gens[rng() % 5]);
        const Mat2 g = random_sl2(rng);
        if (weight(mat_mul_checked(gamma, g)) != weight(g)) return false;
    }
    return true;
}

bool check_automorphy(const AutoWeight& w, int trials, u64 seed) {
    return check_automorphy([&w](const Mat2& m) { return w(m); }, w.r2(), w.r1(), trials, seed);
}

KSumContext::KSumContext(const AutoWeight& weight) : w(weight) {
    CosetSpace cs(weight.r2(), weight.r1());
    for (const auto& l : cs.labels()) reps.push_back(cs.lift(l));
}

KSumContext::KSumContext(const AutoWeight& weight, std::vector<Mat2> representatives)
    : w(weight), reps(std::move(representatives)) {}

i64 KSumContext::correlation(const Mat2& sigma) const {
    i64 s = 0;
    for (const auto& t : reps) {
        if (!w(t)) continue;
        s += w(mat_mul_checked(t, sigma));
    }
    return s;
}

double ksum_b(const KSumContext& ctx, double B) {
    require(B >= 0 && B <= 1000, Errc::invalid_argument, "ksum_b: B must be in [0, 1000]");
    const i64 n = static_cast<i64>(std::floor(B));
    double s = 0;
    for (i64 b = -n; b <= n; ++b) s += std::fabs(static_cast<double>(ctx.correlation({1, b, 0, 1})));
    return s;
}

double ksum_c(const KSumContext& ctx, double C) {
    require(C >= 0 && C <= 1000, Errc::invalid_argument, "ksum_c: C must be in [0, 1000]");
    const i64 n = static_cast<i64>(std::floor(C));
    double s = 0;
    for (i64 c = -n; c <= n; ++c)
        if (c != 0) s += std::fabs(static_cast<double>(ctx.correlation({1, 0, c, 1})));
    return s;
}

namespace {
void check_ksum_weight(const AutoWeight& w) {
    require(w.mode() == WeightMode::alpha0, Errc::invalid_argument, "K-sum requires an alpha0 weight");
    require(w.r1() * w.r2() <= 10'000, Errc::capacity, "K-sum requires r1 r2 <= 10^4");
}
} // namespace

double ksum_b(const AutoWeight& w, double B) {
    check_ksum_weight(w);
    return ksum_b(KSumContext(w), B);
}

double ksum_c(const AutoWeight& w, double C) {
    check_ksum_weight(w);
    return ksum_c(KSumContext(w), C);
}

double ksum_sigma_sup(const AutoWeight& w, int samples, u64 seed) {
    check_ksum_weight(w);
    require(samples >= 1, Errc::invalid_argument, "samples must be >= 1");
    KSumContext ctx(w);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<i64> entry(-60, 60);
    double best = std::fabs(static_cast<double>(ctx.correlation({})));
    for (int i = 1; i < samples; ++i) {
        Mat2 s{entry(rng), entry(rng), entry(rng), entry(rng)};
        best = std::max(best, std::fabs(static_cast<double>(ctx.correlation(s))));
    }
    return best;
}

double twisted_ksum(const AutoWeight& w, int k, u64 r, double L) {
    require(k >= 1 && k <= 4, Errc::invalid_argument, "twisted_ksum: k must be in [1, 4]");
    require(std::gcd(static_cast<u64>(k), r) == 1, Errc::invalid_argument, "twisted_ksum: gcd(k, r) must be 1");
    require(L > 0, Errc::invalid_argument, "twisted_ksum: L must be positive");
    require(w.r1() * w.r2() <= 200, Errc::capacity, "twisted_ksum: r1 r2 must be <= 200");
    KSumContext ctx(w);
    std::vector<i64> fs;
    for (int f = 0; f < k; ++f)
        if (std::gcd(f, k) == 1) fs.push_back(f);
    const i64 K = k, K2 = K * K, R = static_cast<i64>(r);
    // box for G = k g
    const double bound = 10.0 * K + 1e-9;
    const i64 amax = static_cast<i64>(std::floor(bound));
    u64 candidates = 0;
    double total = 0;
    auto visit = [&](const Mat2& G) {
        i64 inner = 0;
        for (i64 f1 : fs)
            for (i64 f2 : fs) {
                // k^2 sigma = (k, -f1 r; 0, 1) G (1, f2 r; 0, k)
                const Mat2 M = mat_mul_checked(mat_mul_checked({K, -f1 * R, 0, 1}, G), {1, f2 * R, 0, K});
                if (M.a % K2 || M.b % K2 || M.c % K2 || M.d % K2) continue;
                const Mat2 sigma{M.a / K2, M.b / K2, M.c / K2, M.d / K2};
                for (const auto& t : ctx.reps) {
                    const Mat2 ts = mat_mul_checked(t, sigma);
                    if (!w(ts)) continue;
                    const Mat2 Y = mat_mul_checked(ts, G);
                    if (Y.a % K || Y.b % K || Y.c % K || Y.d % K) continue;
                    inner += w({Y.a / K, Y.b / K, Y.c / K, Y.d / K});
                }
            }
        total += std::fabs(static_cast<double>(inner));
    };
    for (i64 A = -amax; A <= amax; ++A) {
        const double ra = bound - std::fabs(static_cast<double>(A));
        const i64 bmax = static_cast<i64>(std::floor(ra / L));
        for (i64 B = -bmax; B <= bmax; ++B) {
            const double rb = ra - std::fabs(static_cast<double>(B)) * L;
            const i64 cmax = static_cast<i64>(std::floor(rb * L));
            for (i64 C = -cmax; C <= cmax; ++C) {
                if (++candidates > kMaxEnumeration) fail(Errc::capacity, "twisted_ksum: enumeration exceeds 10^7");
                const double rc = rb - std::fabs(static_cast<double>(C)) / L;
                if (A != 0) {
                    const i64 num = K2 + B * C;
                    if (num % A) continue;
                    const i64 D = num / A;
                    if (std::fabs(static_cast<double>(D)) <= rc) visit({A, B, C, D});
                } else {
                    if (-B * C != K2) continue;
                    const i64 dmax = static_cast<i64>(std::floor(rc));
                    for (i64 D = -dmax; D <= dmax; ++D) visit({A, B, C, D});
                }
            }
        }
    }
    return total;
}

} // namespace shiftconv
