#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"
#include "shiftconv/weights.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace shiftconv;

TEST_CASE("weight support and positivity") {
    for (auto shape : {WeightShape::mollifier, WeightShape::cos2}) {
        const SmoothWeight w(shape);
        CHECK(w(0.25) == 0.0);
        CHECK(w(0.5) == 0.0);
        CHECK(w(1.0) == 0.0);
        CHECK(w(1.5) == 0.0);
        CHECK(w(0.75) > 0.0);
        for (int i = 1; i < 100; ++i) CHECK(w(0.5 + 0.005 * i) >= 0.0);
    }
    CHECK(parse_shape("cos2") == WeightShape::cos2);
    CHECK(std::string(shape_name(WeightShape::mollifier)) == "mollifier");
    CHECK_THROWS_AS(parse_shape("box"), Error);
    CHECK_THROWS_AS(SmoothWeight(WeightShape::mollifier, 1.0, 0.5), Error);
}

TEST_CASE("weight derivatives match finite differences") {
    for (auto shape : {WeightShape::mollifier, WeightShape::cos2}) {
        const SmoothWeight w(shape);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(0.52, 0.98);
        for (int i = 0; i < 100; ++i) {
            const double t = U(rng), e = 1e-6;
            for (int j = 0; j < 3; ++j) {
                const double fd = (w.eval_deriv(t + e, j) - w.eval_deriv(t - e, j)) / (2 * e);
                const double d = w.eval_deriv(t, j + 1);
                CHECK(std::fabs(fd - d) <= 1e-6 * std::max(1.0, std::fabs(d)));
            }
            CHECK(w.eval_deriv(t, 0) == doctest::Approx(w(t)).epsilon(1e-14));
        }
    }
}

TEST_CASE("mollifier is flat at the endpoints") {
    const SmoothWeight w;
    for (int j = 0; j <= kMaxDeriv; ++j) {
        CHECK(std::fabs(w.eval_deriv(0.5 + 1e-4, j)) < 1e-100);
        CHECK(std::fabs(w.eval_deriv(1.0 - 1e-4, j)) < 1e-100);
    }
    const auto& b = w.deriv_bounds();
    for (int i = 1; i < 200; ++i) {
        const double t = 0.5 + 0.0025 * i;
        for (int j = 0; j <= kMaxDeriv; ++j) CHECK(std::fabs(w.eval_deriv(t, j)) <= b[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("smooth step") {
    CHECK(smooth_step(-1) == 0.0);
    CHECK(smooth_step(2) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    for (int i = 1; i < 100; ++i) {
        const double y = i / 100.0;
        CHECK(smooth_step(y) + smooth_step(1 - y) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(smooth_step(y) >= smooth_step(y - 0.01));
    }
}

TEST_CASE("dyadic partition of unity") {
    const auto part = make_partition();
    CHECK(std::fabs(part.total(3.7) - 1.0) < 1e-10);
    // at u = 2^m exactly two members are nonzero
    for (int m = -3; m <= 20; ++m) {
        const double u = std::ldexp(1.0, m);
        int nonzero = 0;
        double s = 0;
        for (int j = m - 5; j <= m + 5; ++j) {
            const double v = part.member(j, u);
            if (v != 0.0) ++nonzero;
            s += v;
        }
        CHECK(nonzero == 2);
        CHECK(std::fabs(s - 1.0) < 1e-12);
    }
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> L(0.0, std::log(1e6));
    for (int i = 0; i < 1000; ++i) {
        const double u = std::exp(L(rng));
        double s = 0;
        for (int j = -25; j <= 25; ++j) s += part.member(j, u);
        CHECK(std::fabs(s - 1.0) < 1e-10);
    }
    double worst = 0;
    for (int i = 0; i < 10000; ++i) worst = std::max(worst, std::fabs(part.total(std::pow(10.0, 8.0 * i / 9999)) - 1.0));
    CHECK(worst < 1e-10);
    CHECK(part.base(part.support_lo() * 0.999) == 0.0);
    CHECK(part.base(part.support_hi() * 1.001) == 0.0);
    CHECK(part.support_lo() == doctest::Approx(std::pow(2.0, -0.5)));
    CHECK(part.support_hi() == doctest::Approx(std::pow(2.0, 1.5)));
    CHECK_THROWS_AS(DyadicPartition(0.0), Error);
}

TEST_CASE("psi kernel normalization") {
    const double v = adaptive_integrate([](double y) { return psi_kernel(y) / y; }, 1.0, 2.0, 1e-12).value;
    CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(psi_kernel(0.9) == 0.0);
}

TEST_CASE("quadrature basics") {
    const SmoothWeight w;
    CHECK(integrate(w, 1e4, [](double) { return 0.0; }) == 0.0);
    const double one = integrate(w, 1.0, [](double) { return 1.0; }, 1e-13);
    for (double x : {10.0, 1e3, 1e6}) {
        const double ix = integrate(w, x, [](double) { return 1.0; }, 1e-13);
        CHECK(std::fabs(ix - x * one) <= 1e-10 * x * one);
    }
    // scale equivariance with a non-constant integrand
    const double x = 1e4;
    const double a = integrate(w, x, [](double xi) { return std::log(xi + 1); }, 1e-13);
    const double b = x * integrate(w, 1.0, [&](double u) { return std::log(x * u + 1); }, 1e-13);
    CHECK(std::fabs(a - b) <= 1e-10 * std::fabs(a));
}

TEST_CASE("quadrature against a dense midpoint reference") {
    const SmoothWeight w;
    const double x = 1e4;
    auto f = [&](double xi) { return w(xi / x) * (std::log(xi + 1) + 2 * kEulerGamma); };
    const double q = integrate(w, x, [](double xi) { return std::log(xi + 1) + 2 * kEulerGamma; }, 1e-12);
    // the integrand is flat to all orders at both ends, so the midpoint rule converges fast
    const int n = 1000000;
    const double a = 0.5 * x, h = 0.5 * x / n;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(a + (i + 0.5) * h);
    const double ref = pairwise_sum(v) * h;
    CHECK(std::fabs(q - ref) <= 1e-8 * std::fabs(ref));
}

TEST_CASE("quadrature is exact on polynomials times the weight") {
    const SmoothWeight w;
    // moments via the midpoint rule at two resolutions
    auto moment = [&](int deg, int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        const double h = 0.5 / n;
        for (int i = 0; i < n; ++i) {
            const double t = 0.5 + (i + 0.5) * h;
            v[static_cast<std::size_t>(i)] = w(t) * std::pow(t, deg);
        }
        return pairwise_sum(v) * h;
    };
    for (int deg = 0; deg <= 10; ++deg) {
        const double ref = moment(deg, 400000);
        const double q = adaptive_integrate([&](double t) { return w(t) * std::pow(t, deg); }, 0.5, 1.0, 1e-13).value;
        CHECK(std::fabs(q - ref) <= 1e-12 * std::fabs(ref) + 1e-15);
    }
}

TEST_CASE("quadrature failure modes") {
    CHECK_THROWS_AS(adaptive_integrate([](double t) { return 1.0 / t; }, -1.0, 1.0, 1e-12), Error);
    CHECK(adaptive_integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
    const auto q = adaptive_integrate([](double t) { return t * t; }, std::vector<double>{0.0, 0.5, 1.0}, 1e-13);
    CHECK(q.value == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("numeric helpers") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
    const auto s1 = chunked_sum(0, 100000, [](std::uint64_t i) { return 1.0 / (1.0 + static_cast<double>(i)); }, 1);
    const auto s4 = chunked_sum(0, 100000, [](std::uint64_t i) { return 1.0 / (1.0 + static_cast<double>(i)); }, 4);
    CHECK(s1 == s4);
    for (double d : {0.1, 1.0 / 3, 1e-300, 6.02e23, -2.5})
        CHECK(std::strtod(format_double(d).c_str(), nullptr) == d);
    const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK_THROWS_AS(least_squares({1, 1, 1, 1}, 2, 2, {1, 2}), Error);
}
