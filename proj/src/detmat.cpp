#include "shiftconv/detmat.hpp"
#include "shiftconv/error.hpp"

#include <numeric>

namespace shiftconv {

namespace {

constexpr u64 kMaxX = 1'000'000;

using i128 = __int128;

// open window (value / (scale x)) in (1/2, 1)
bool in_window(i128 value, i128 scale, i128 x) { return scale * x < 2 * value && value < scale * x; }

void check_x(u64 x) { require(x >= 1 && x <= kMaxX, Errc::capacity, "detmat: x must be in [1, 10^6]"); }

std::vector<u64> prime_list(u64 n) {
    std::vector<u64> ps;
    for (auto [p, e] : factorize(n).factors) ps.push_back(p);
    return ps;
}

} // namespace

DetInstance make_instance(u64 r1, u64 r2, i64 h) {
    require(r1 >= 1 && r2 >= 1 && is_squarefree(r1) && is_squarefree(r2), Errc::invalid_argument,
            "r1 and r2 must be squarefree positive integers");
    require(h != 0, Errc::invalid_argument, "h must be nonzero");
    DetInstance in;
    in.r1 = r1;
    in.r2 = r2;
    in.h = h;
    in.r0 = std::gcd(r1, r2);
    in.rt1 = r1 / in.r0;
    in.rt2 = r2 / in.r0;
    const i64 diff = static_cast<i64>(in.rt2) - static_cast<i64>(in.rt1);
    in.k = diff == 0 ? 1 : gcd_infty(static_cast<u64>(diff < 0 ? -diff : diff), r1 * r2);
    in.target = h * diff;
    return in;
}

std::vector<DirectSolution> direct_solutions(const DetInstance& in, u64 x) {
    check_x(x);
    std::vector<DirectSolution> out;
    const u64 rmax = std::max(in.r1, in.r2);
    for (u64 n = x / (2 * rmax); n <= x; ++n) {
        if (!in_window(in.r1 * n, 1, x) || !in_window(in.r2 * n, 1, x)) continue;
        const i64 m1 = static_cast<i64>(in.r1 * n) + in.h, m2 = static_cast<i64>(in.r2 * n) + in.h;
        if (m1 <= 0 || m2 <= 0) continue;
        const auto d1 = divisors(static_cast<u64>(m1));
        const auto d2 = divisors(static_cast<u64>(m2));
        for (u64 a : d1)
            for (u64 b : d2) out.push_back({n, a, static_cast<u64>(m1) / a, b, static_cast<u64>(m2) / b});
    }
    return out;
}

u64 count_direct(const DetInstance& in, u64 x) {
    check_x(x);
    u64 total = 0;
    const u64 rmax = std::max(in.r1, in.r2);
    for (u64 n = x / (2 * rmax); n <= x; ++n) {
        if (!in_window(in.r1 * n, 1, x) || !in_window(in.r2 * n, 1, x)) continue;
        const i64 m1 = static_cast<i64>(in.r1 * n) + in.h, m2 = static_cast<i64>(in.r2 * n) + in.h;
        if (m1 <= 0 || m2 <= 0) continue;
        total += divisors(static_cast<u64>(m1)).size() * divisors(static_cast<u64>(m2)).size();
    }
    return total;
}

void enumerate_scaled(const DetInstance& in, u64 x, const Scaling& s,
                      const std::function<void(const MatrixSolution&, const MatrixSolution&)>& visit) {
    check_x(x);
    require(in.rt1 != in.rt2, Errc::invalid_argument, "matrix path requires r1 != r2");
    const i64 rt1 = static_cast<i64>(in.rt1), rt2 = static_cast<i64>(in.rt2), r2 = static_cast<i64>(in.r2);
    const i64 X = static_cast<i64>(x);
    const i64 sad = static_cast<i64>(s.sa * s.sd), sbc = static_cast<i64>(s.sb * s.sc);
    // P = a d with (P - h rt2) / (rt2 x) in (1/2, 1)
    const i64 plo = in.h * rt2 + (rt2 * X) / 2;
    const i64 phi = in.h * rt2 + rt2 * X;
    i64 P = std::max<i64>(1, plo);
    // first P >= plo with P == h rt2 mod r2
    P += mod(in.h * rt2 - P, r2);
    for (; P <= phi; P += r2) {
        if (!in_window(P - in.h * rt2, rt2, X)) continue;
        if (P % sad) continue;
        const i64 Q = P - in.target; // b c
        if (Q <= 0 || Q % sbc) continue;
        if (!in_window(Q - in.h * rt1, rt1, X)) continue;
        const auto da = divisors(static_cast<u64>(P / sad));
        const auto dc = divisors(static_cast<u64>(Q / sbc));
        for (u64 a1 : da) {
            const i64 ar = static_cast<i64>(a1), dr = P / sad / ar;
            const i64 a = ar * static_cast<i64>(s.sa), d = dr * static_cast<i64>(s.sd);
            if (a % rt2) continue;
            for (u64 c1 : dc) {
                const i64 cr = static_cast<i64>(c1), br = Q / sbc / cr;
                const i64 c = cr * static_cast<i64>(s.sc), b = br * static_cast<i64>(s.sb);
                if (c % rt1) continue;
                visit({a, b, c, d}, {ar, br, cr, dr});
            }
        }
    }
}

std::vector<MatrixSolution> matrix_solutions(const DetInstance& in, u64 x) {
    std::vector<MatrixSolution> out;
    enumerate_scaled(in, x, {}, [&](const MatrixSolution& m, const MatrixSolution&) {
        const i64 rt1 = static_cast<i64>(in.rt1), rt2 = static_cast<i64>(in.rt2);
        if (m.a * m.d - m.b * m.c != in.target || m.a % rt2 || m.c % rt1 ||
            mod(m.a * m.d - in.h * rt2, static_cast<i64>(in.r2)) != 0)
            fail(Errc::internal, "matrix_solutions: emitted matrix violates its conditions");
        out.push_back(m);
    });
    return out;
}

u64 count_matrix(const DetInstance& in, u64 x) {
    u64 n = 0;
    enumerate_scaled(in, x, {}, [&](const MatrixSolution&, const MatrixSolution&) { ++n; });
    return n;
}

Correspondence correspondence_check(const DetInstance& in, u64 x) {
    Correspondence c;
    c.count_direct = count_direct(in, x);
    c.count_matrix = count_matrix(in, x);
    c.equal = c.count_direct == c.count_matrix;
    return c;
}

SplitFamily split_by_gcd(const DetInstance& in) {
    SplitFamily fam;
    const u64 ah = static_cast<u64>(in.h < 0 ? -in.h : in.h);
    fam.s0 = std::gcd(ah, in.r0);
    fam.s1 = std::gcd(ah, in.rt1);
    fam.s2 = std::gcd(ah, in.rt2);
    const auto p0 = prime_list(fam.s0), p1 = prime_list(fam.s1), p2 = prime_list(fam.s2);
    // subsets of a squarefree number are indexed by bitmasks over its primes
    auto part = [](const std::vector<u64>& ps, u64 mask) {
        u64 u = 1;
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (mask >> i & 1) u *= ps[i];
        return u;
    };
    for (u64 m0 = 0; m0 < (u64{1} << p0.size()); ++m0)
        for (u64 m0p = 0; m0p < (u64{1} << p0.size()); ++m0p)
            for (u64 m1 = 0; m1 < (u64{1} << p1.size()); ++m1)
                for (u64 m2 = 0; m2 < (u64{1} << p2.size()); ++m2) {
                    SplitCell c;
                    c.u0 = part(p0, m0);
                    c.v0 = fam.s0 / c.u0;
                    c.u0p = part(p0, m0p);
                    c.v0p = fam.s0 / c.u0p;
                    c.u1 = part(p1, m1);
                    c.v1 = fam.s1 / c.u1;
                    c.u2 = part(p2, m2);
                    c.v2 = fam.s2 / c.u2;
                    c.h_reduced = in.h / static_cast<i64>(fam.s0 * fam.s1 * fam.s2);
                    c.r0_reduced = in.r0 / fam.s0;
                    c.rt1_reduced = in.rt1 / fam.s1;
                    c.rt2_reduced = in.rt2 / fam.s2;
                    c.scaling = {fam.s2 * c.u1 * c.u0, c.u2 * c.u0p, fam.s1 * c.v2 * c.v0p, c.v1 * c.v0};
                    fam.cells.push_back(c);
                }
    return fam;
}

SplitCheck split_check(const DetInstance& in, u64 x) {
    SplitCheck r;
    r.count_direct = count_direct(in, x);
    const SplitFamily fam = split_by_gcd(in);
    r.cells = fam.cells.size();
    const auto p0 = prime_list(fam.s0), p1 = prime_list(fam.s1), p2 = prime_list(fam.s2);
    const i64 diff = static_cast<i64>(in.rt2) - static_cast<i64>(in.rt1);
    for (const auto& cell : fam.cells) {
        enumerate_scaled(in, x, cell.scaling, [&](const MatrixSolution& m, const MatrixSolution& red) {
            // canonical assignment: a prime goes to the first entry of its pair whenever it divides it
            for (u64 p : p1)
                if ((cell.u1 % p == 0) != (m.a % static_cast<i64>(p) == 0)) return;
            for (u64 p : p2)
                if ((cell.u2 % p == 0) != (m.b % static_cast<i64>(p) == 0)) return;
            for (u64 p : p0) {
                if ((cell.u0 % p == 0) != (m.a % static_cast<i64>(p) == 0)) return;
                if ((cell.u0p % p == 0) != (m.b % static_cast<i64>(p) == 0)) return;
            }
            if (red.a * red.d - red.b * red.c != cell.h_reduced * diff) r.reduced_det_ok = false;
            ++r.count_cells;
        });
    }
    r.equal = r.count_cells == r.count_direct && r.reduced_det_ok;
    return r;
}

GammaCheck gamma_decomposition_check(const DetInstance& in, u64 x) {
    require(in.rt1 != in.rt2, Errc::invalid_argument, "gamma check requires r1 != r2");
    const u64 ah = static_cast<u64>(in.h < 0 ? -in.h : in.h);
    require(std::gcd(ah, in.r1 * in.r2) == 1, Errc::invalid_argument, "gamma check requires gcd(h, r1 r2) = 1");
    GammaCheck g;
    g.total = count_matrix(in, x);
    const i64 k = static_cast<i64>(in.k);
    for (u64 g1 : divisors(in.k))
        for (u64 g2 : divisors(in.k)) {
            ++g.cells;
            if (in.target % static_cast<i64>(g1 * g2)) continue;
            enumerate_scaled(in, x, {g1, g2, g1, g2}, [&](const MatrixSolution& m, const MatrixSolution& red) {
                if (std::gcd(std::gcd(m.a, m.c), k) != static_cast<i64>(g1)) return;
                if (std::gcd(std::gcd(m.b, m.d), k) != static_cast<i64>(g2)) return;
                ++g.cell_sum;
                if (std::gcd(std::gcd(red.a, red.c), k) != 1 || std::gcd(std::gcd(red.b, red.d), k) != 1)
                    g.coprime = false;
            });
        }
    g.ok = g.total == g.cell_sum && g.coprime;
    return g;
}

} // namespace shiftconv
