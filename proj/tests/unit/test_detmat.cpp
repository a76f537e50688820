#include "shiftconv/arith.hpp"
#include "shiftconv/detmat.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"
#include "shiftconv/sums.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace shiftconv;

namespace {

// sum over n of d(r1 n + h) d(r2 n + h) with r_i n / x in (1/2, 1), by naive divisor counting
u64 pair_count_oracle(u64 r1, u64 r2, i64 h, u64 x) {
    auto dcount = [](i64 m) {
        u64 c = 0;
        for (i64 d = 1; d * d <= m; ++d)
            if (m % d == 0) c += (d * d == m) ? 1 : 2;
        return c;
    };
    u64 total = 0;
    for (u64 n = 1; n <= x; ++n) {
        if (!(2 * r1 * n > x && r1 * n < x && 2 * r2 * n > x && r2 * n < x)) continue;
        total += dcount(static_cast<i64>(r1 * n) + h) * dcount(static_cast<i64>(r2 * n) + h);
    }
    return total;
}

} // namespace

TEST_CASE("instance construction") {
    const auto inst = make_instance(2, 3, 1);
    CHECK(inst.r0 == 1);
    CHECK(inst.rt1 == 2);
    CHECK(inst.rt2 == 3);
    CHECK(inst.target == 1);
    CHECK(inst.k == 1);
    const auto i2 = make_instance(2, 6, 1);
    CHECK(i2.r0 == 2);
    CHECK(i2.rt1 == 1);
    CHECK(i2.rt2 == 3);
    CHECK(i2.k == 2);
    CHECK(std::gcd(i2.rt1, i2.rt2) == 1);
    CHECK((i2.rt2 - i2.rt1) % i2.k == 0);
    CHECK_THROWS_AS(make_instance(4, 3, 1), Error);
    CHECK_THROWS_AS(make_instance(2, 3, 0), Error);
}

TEST_CASE("direct solutions") {
    const auto inst = make_instance(2, 3, 1);
    CHECK(direct_solutions(inst, 1).empty());
    for (u64 x : {10, 100, 1000, 5000}) CHECK(count_direct(inst, x) == pair_count_oracle(2, 3, 1, x));
    // each n contributes d(2n + 1) d(3n + 1) tuples, e.g. 2 * 3 = 6 at n = 1
    CHECK(divisors(3).size() * divisors(4).size() == 6);
    std::map<u64, u64> per_n;
    for (const auto& s : direct_solutions(inst, 1000)) {
        CHECK(s.a * s.d == 2 * s.n + 1);
        CHECK(s.b * s.c == 3 * s.n + 1);
        ++per_n[s.n];
    }
    for (auto [n, c] : per_n) CHECK(c == divisors(2 * n + 1).size() * divisors(3 * n + 1).size());
}

TEST_CASE("weighted direct solutions reproduce the certain sum") {
    const auto inst = make_instance(2, 3, 1);
    const SmoothWeight w;
    const double x = 10000;
    std::vector<double> weighted;
    for (const auto& s : direct_solutions(inst, 10000))
        weighted.push_back(w(2.0 * static_cast<double>(s.n) / x) * w(3.0 * static_cast<double>(s.n) / x));
    const double a = pairwise_sum(weighted);
    const double b = certain_sum({2, 3, 1, x, w, w});
    CHECK(std::fabs(a - b) <= 1e-12 * b);
}

TEST_CASE("matrix solutions satisfy the defining conditions") {
    const auto inst = make_instance(2, 3, 1);
    const auto sols = matrix_solutions(inst, 1000);
    CHECK(!sols.empty());
    for (const auto& m : sols) {
        CHECK(m.a * m.d - m.b * m.c == inst.target);
        CHECK(m.a % static_cast<i64>(inst.rt2) == 0);
        CHECK(m.c % static_cast<i64>(inst.rt1) == 0);
        const i64 P = m.a * m.d - inst.h * static_cast<i64>(inst.rt2);
        CHECK(P % static_cast<i64>(inst.r2) == 0);
        // recovery of n: a d = rt2 (r1 n + h) after removing the scaling
        CHECK((m.a / static_cast<i64>(inst.rt2) * m.d - inst.h) % static_cast<i64>(inst.r1) == 0);
    }
    CHECK_THROWS_AS(matrix_solutions(make_instance(3, 3, 1), 100), Error);
}

TEST_CASE("correspondence on small instances") {
    CHECK(correspondence_check(make_instance(2, 3, 1), 100).equal);
    std::mt19937_64 rng(31);
    int done = 0;
    while (done < 15) {
        const u64 r1 = 1 + rng() % 30, r2 = 1 + rng() % 30;
        const i64 h = static_cast<i64>(rng() % 41) - 20;
        if (!is_squarefree(r1) || !is_squarefree(r2) || r1 == r2 || h == 0) continue;
        if (std::gcd(static_cast<u64>(std::llabs(h)), r1 * r2) != 1) continue;
        const auto c = correspondence_check(make_instance(r1, r2, h), 3000);
        CHECK(c.equal);
        CHECK(c.count_direct == pair_count_oracle(r1, r2, h, 3000));
        ++done;
    }
}

TEST_CASE("gcd splitting") {
    const auto trivial = split_by_gcd(make_instance(2, 3, 1));
    CHECK(trivial.cells.size() == 1);
    CHECK(trivial.cells[0].h_reduced == 1);
    const auto fam = split_by_gcd(make_instance(2, 3, 6));
    CHECK(fam.s1 == 2);
    CHECK(fam.s2 == 3);
    CHECK(fam.cells.size() == 4);
    for (const auto& c : fam.cells) {
        const u64 hr = static_cast<u64>(std::llabs(c.h_reduced));
        CHECK(std::gcd(hr, c.r0_reduced * c.rt1_reduced * c.rt2_reduced) == 1);
    }
    for (auto [r1, r2, h] : {std::tuple<u64, u64, i64>{2, 3, 6}, {6, 10, 2}, {5, 15, -5}, {6, 35, 30}}) {
        const auto s = split_check(make_instance(r1, r2, h), 1000);
        CHECK(s.equal);
        CHECK(s.reduced_det_ok);
        CHECK(s.count_direct == pair_count_oracle(r1, r2, h, 1000));
    }
}

TEST_CASE("gamma decomposition") {
    const auto one = gamma_decomposition_check(make_instance(2, 3, 1), 2000);
    CHECK(one.cells == 1);
    CHECK(one.ok);
    const auto two = gamma_decomposition_check(make_instance(2, 6, 1), 2000);
    CHECK(two.cells == 4);
    CHECK(two.ok);
    CHECK(two.coprime);
    CHECK(two.total == two.cell_sum);
    CHECK_THROWS_AS(gamma_decomposition_check(make_instance(2, 6, 2), 100), Error);
}
