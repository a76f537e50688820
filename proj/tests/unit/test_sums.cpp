#include "shiftconv/arith.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"
#include "shiftconv/sums.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace shiftconv;

namespace {

using Q = boost::rational<i64>;

u64 dcount(u64 m) {
    u64 c = 0;
    for (u64 d = 1; d * d <= m; ++d)
        if (m % d == 0) c += (d * d == m) ? 1 : 2;
    return c;
}

} // namespace

TEST_CASE("direct sum on tiny windows") {
    const SmoothWeight w;
    CHECK(direct_sum({2, 1, 1.0, w}) == 0.0);
    const double x = 50;
    std::vector<double> v;
    for (u64 n = 1; n <= 60; ++n) v.push_back(w(static_cast<double>(n) / x) * static_cast<double>(dcount(n + 3)));
    CHECK(std::fabs(direct_sum({1, 3, x, w}) - pairwise_sum(v)) <= 1e-13 * pairwise_sum(v));
    CHECK_THROWS_AS(direct_sum({2, 0, x, w}), Error);
    CHECK_THROWS_AS(direct_sum({2, -30, x, w}), Error);
}

TEST_CASE("direct sum against a brute force oracle") {
    for (auto shape : {WeightShape::mollifier, WeightShape::cos2}) {
        const SmoothWeight w(shape);
        for (int k : {1, 2, 3}) {
            const auto dk = sieve_dk(k, 3000);
            for (i64 h : {1, -2, 7}) {
                const double x = 3000;
                std::vector<double> v;
                for (u64 n = 1; n <= 3000; ++n) {
                    const double wv = w(static_cast<double>(n) / x);
                    if (wv == 0.0) continue;
                    v.push_back(wv * static_cast<double>(dk[n] * dcount(static_cast<u64>(static_cast<i64>(n) + h))));
                }
                const double ref = pairwise_sum(v);
                CHECK(std::fabs(direct_sum({k, h, x, w}) - ref) <= 1e-12 * ref);
            }
        }
    }
}

TEST_CASE("summer is reusable and thread independent") {
    const SmoothWeight w;
    const ConvolutionSummer s(3, 2, 1e5);
    CHECK(s.sum(1e5, w, 1) == s.sum(1e5, w, 4));
    CHECK(s.sum(3e4, w) == direct_sum({3, 2, 3e4, w}));
    CHECK_THROWS_AS(s.sum(2e5, w), Error);
}

TEST_CASE("factor expansion equals the direct sum") {
    const SmoothWeight w;
    for (int k : {1, 2, 3})
        for (double x : {100.0, 1000.0, 10000.0}) {
            const double a = factor_expansion_sum(k, x, 1, w);
            const double b = direct_sum({k, 1, x, w});
            CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, b));
        }
}

TEST_CASE("certain sums") {
    const SmoothWeight w;
    // windows (x/2, x) for r n and (x/2, x) for 3 r n cannot meet
    CHECK(certain_sum({1, 3, 1, 1e4, w, w}) == 0.0);
    const double x = 2000;
    std::vector<double> v;
    for (u64 n = 1; n <= 2000; ++n) {
        const double wv = w(static_cast<double>(n) / x);
        const double dn = static_cast<double>(dcount(n + 5));
        v.push_back(wv * wv * dn * dn);
    }
    const double ref = pairwise_sum(v);
    CHECK(std::fabs(certain_sum({1, 1, 5, x, w, w}) - ref) <= 1e-12 * ref);
    for (const auto& t : certain_terms({2, 3, 1, x, w, w})) {
        CHECK(t.weight > 0);
        CHECK(t.d1 == dcount(2 * t.n + 1));
        CHECK(t.d2 == dcount(3 * t.n + 1));
    }
    CHECK_THROWS_AS(certain_sum({0, 1, 1, x, w, w}), Error);
    CHECK_THROWS_AS(certain_sum({1, 1, 0, x, w, w}), Error);
}

TEST_CASE("partition case examples") {
    const double d = 1.0 / 16;
    CHECK(classify_partition(std::vector<double>{1.0}, d).tag == CaseTag::A);
    CHECK(classify_partition(std::vector<double>{0.5, 0.5}, d).tag == CaseTag::A);
    CHECK(classify_partition(std::vector<double>{0.3, 0.3, 0.3, 0.1}, d).tag == CaseTag::B);
    const auto c = classify_partition(std::vector<double>{0.25, 0.25, 0.25, 0.25}, d);
    CHECK(c.tag == CaseTag::C);
    CHECK(c.witness == std::vector<int>{0});
    const auto cq = classify_partition(std::vector<Q>{Q(1, 4), Q(1, 4), Q(1, 4), Q(1, 4)}, Q(1, 16));
    CHECK(cq.tag == CaseTag::C);
    CHECK(std::string(case_name(CaseTag::B)) == "B");
    CHECK_THROWS_AS(classify_partition(std::vector<double>{0.5, 0.5}, 0.1), Error);
    CHECK_THROWS_AS(classify_partition(std::vector<double>{0.2, 0.8}, d), Error);
    CHECK_THROWS_AS(classify_partition(std::vector<double>{0.5, 0.4}, d), Error);
    CHECK_FALSE(verify_case(std::vector<double>{0.3, 0.3, 0.3, 0.1}, d, PartitionCase{CaseTag::A, {}}));
}

TEST_CASE("random partitions always classify") {
    std::mt19937_64 rng(17);
    std::exponential_distribution<double> E(1.0);
    for (int it = 0; it < 3000; ++it) {
        const int k = 1 + static_cast<int>(rng() % 10);
        std::vector<double> a(static_cast<std::size_t>(k));
        double s = 0;
        for (double& v : a) s += v = E(rng);
        for (double& v : a) v /= s;
        std::sort(a.rbegin(), a.rend());
        s = 0;
        for (double v : a) s += v;
        a[0] += 1.0 - s;
        for (double delta : {1.0 / 32, 1.0 / 16}) {
            const auto pc = classify_partition(a, delta);
            REQUIRE(verify_case(a, delta, pc));
        }
    }
}

TEST_CASE("threshold ordering") {
    for (double x : {1e3, 1e6, 1e12})
        for (double delta : {1.0 / 64, 1.0 / 16}) {
            const auto t = thresholds(x, delta);
            CHECK(t.X4 < t.X3);
            CHECK(t.X3 < t.X1);
            CHECK(t.X1 < t.X2);
            CHECK(t.X2 < x);
        }
}

TEST_CASE("dyadic cover") {
    const auto one = dyadic_cover(100, 1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].A == std::vector<u64>{64});
    CHECK(one[1].A == std::vector<u64>{32});
    for (int k : {1, 2, 3, 4}) {
        const double x = 5000;
        const auto cover = dyadic_cover(x, k);
        for (const auto& b : cover) {
            CHECK(b.A.size() == static_cast<std::size_t>(k));
            CHECK(b.product() < x);
            CHECK(b.product() * std::ldexp(1.0, k) > x / 2);
        }
    }
    const SmoothWeight w;
    for (int k : {1, 2, 3}) {
        const double x = 3000;
        std::vector<double> parts;
        for (const auto& b : dyadic_cover(x, k)) parts.push_back(box_sum(b, x, 1, w));
        const double total = pairwise_sum(parts);
        const double ref = direct_sum({k, 1, x, w});
        CHECK(std::fabs(total - ref) <= 1e-12 * ref);
    }
    CHECK_THROWS_AS(dyadic_cover(100, 7), Error);
    CHECK_THROWS_AS(dyadic_cover(100, 0), Error);
}

TEST_CASE("remainder bounds") {
    const double x = 1e6, theta = 7.0 / 64;
    const auto full = remainder_bounds({{1u << 19}}, static_cast<double>(1u << 19), 1, theta);
    CHECK(full.rem1 == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(full.rem3.size() == 1);
    // A = 1: x / sqrt(A) plus x^{3/4} (1 + x^{theta/2})
    const auto unit = remainder_bounds({{1, 1}}, x, 1, theta);
    CHECK(unit.rem1 == doctest::Approx(std::pow(x, 1.5)).epsilon(1e-14));
    const double rem2 = std::pow(x, 1.5) * (1 + std::pow(x, -theta)) * 2 * (1 + 1 / std::sqrt(x));
    CHECK(unit.rem2 == doctest::Approx(rem2).epsilon(1e-14));
    CHECK(unit.rem3.size() == 3);
    const double A = std::pow(x, 1.0 / 8);
    const double r3 = rem3_bound(A, x, 1, theta);
    CHECK(r3 >= x / std::sqrt(A));
    CHECK(x / std::sqrt(A) == doctest::Approx(std::pow(x, 1 - 1.0 / 16)));
    // rem1 decreases as the largest block grows
    double last = 1e300;
    for (u64 a = 1; a <= (u64{1} << 19); a *= 2) {
        const double r = remainder_bounds({{a, 1}}, x, 1, theta).rem1;
        CHECK(r < last);
        last = r;
    }
    CHECK_THROWS_AS(remainder_bounds({{2}}, x, 1, 0.2), Error);
}

TEST_CASE("box classification") {
    const double x = 1 << 20;
    const auto top = classify_box({{u64{1} << 19, 1, 1}}, x, 1.0 / 16);
    CHECK(top.pc.tag == CaseTag::A);
    CHECK(top.bound == BoundKind::rem1);
    u64 seen = 0;
    for (const auto& b : dyadic_cover(1e6, 4)) {
        if (b.product() <= 1) continue;
        const auto bc = classify_box(b, 1e6, 1.0 / 16);
        CHECK(verify_case(bc.alpha, 1.0 / 16, bc.pc));
        if (bc.bound == BoundKind::rem3) CHECK(bc.A >= 1);
        ++seen;
    }
    CHECK(seen > 100);
}

TEST_CASE("partition grid") {
    const auto r = verify_partition_grid(24, 5, Q(1, 16));
    CHECK(r.points > 0);
    CHECK(r.violations == 0);
    CHECK(r.reverify_failures == 0);
    CHECK(r.count_a + r.count_b + r.count_c == r.points);
    CHECK(r.count_c > 0);
    CHECK_THROWS_AS(verify_partition_grid(1000, 5, Q(1, 16)), Error);
}
