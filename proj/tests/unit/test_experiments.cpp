#include "shiftconv/error.hpp"
#include "shiftconv/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <sstream>

using namespace shiftconv;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::internal;
}

std::string csv_of(const ErrorReport& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

} // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config("# demo\n[run]\nk = 3\nh = -2\nxMin = 2e4\nxMax = 1e6\ngridPoints = 8\n"
                                  "weight = \"cos2\"\ndelta = 1/32\ntheta = 0\nseed = 9\nthreads = 2\ntau = 0.5\n"
                                  "relTol = 1e-10 # trailing\n");
    CHECK(cfg.k == 3);
    CHECK(cfg.h == -2);
    CHECK(cfg.x_min == 2e4);
    CHECK(cfg.x_max == 1e6);
    CHECK(cfg.grid_points == 8);
    CHECK(cfg.weight == "cos2");
    CHECK(cfg.delta == Q64(1, 32));
    CHECK(cfg.theta == Q64(0));
    CHECK(cfg.seed == 9);
    CHECK(cfg.threads == 2);
    CHECK(cfg.tau == 0.5);
    CHECK(cfg.rel_tol == 1e-10);
    CHECK_NOTHROW(validate_config(cfg));
    CHECK_THROWS_AS(parse_config("colour = red\n"), Error);
    CHECK_THROWS_AS(parse_config("k 3\n"), Error);
    CHECK_THROWS_AS(parse_config("k = three\n"), Error);
    CHECK(code_of([] { load_config("/nonexistent/run.cfg"); }) == Errc::io);
    ExperimentConfig c;
    set_config_value(c, "xMax", "1e5");
    CHECK(c.x_max == 1e5);
}

TEST_CASE("config validation") {
    auto bad = [](auto mutate) {
        ExperimentConfig c;
        mutate(c);
        return code_of([&] { validate_config(c); });
    };
    CHECK_NOTHROW(validate_config(ExperimentConfig{}));
    CHECK(bad([](auto& c) { c.k = 5; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.h = 0; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.x_min = 500; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.x_max = 1e8; }) == Errc::capacity);
    CHECK(bad([](auto& c) { c.grid_points = 5; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.x_max = 2e5; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.grid_points = 40; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.delta = Q64(1, 8); }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.theta = Q64(1, 8); }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.threads = 0; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.tau = 5; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.rel_tol = 1e-3; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.weight = "box"; }) == Errc::invalid_argument);
    CHECK(bad([](auto& c) { c.h = -10000; }) == Errc::domain);
}

TEST_CASE("experiment grid") {
    ExperimentConfig c;
    const auto g = experiment_grid(c);
    REQUIRE(g.size() == 16);
    CHECK(g.front() == 1e4);
    CHECK(g.back() == 1e7);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        CHECK(g[i] == std::round(g[i]));
    }
}

TEST_CASE("rationals") {
    CHECK(parse_rational("7/64") == Q64(7, 64));
    CHECK(parse_rational("-3") == Q64(-3));
    CHECK(parse_rational("0.0625") == Q64(1, 16));
    CHECK(parse_rational(" 2/4 ") == Q64(1, 2));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
    CHECK(format_rational(Q64(501, 512)) == "501/512");
    CHECK(format_rational(Q64(2)) == "2");
}

TEST_CASE("exponent table") {
    const auto t = exponent_calculator(Q64(1, 16), Q64(7, 64), Q64(0));
    CHECK(exponent_row(t, "small_a").exponent == Q64(501, 512));
    CHECK(exponent_row(t, "small_a").applies);
    CHECK(exponent_row(t, "headline").exponent == Q64(487, 512));
    CHECK(t.small_threshold_finite);
    CHECK(t.small_threshold == Q64(25, 28));
    for (const auto& r : t.rows) CHECK(r.nontrivial == (r.exponent < Q64(1)));
    CHECK_THROWS_AS(exponent_row(t, "nope"), Error);

    const auto t0 = exponent_calculator(Q64(1, 16), Q64(0), Q64(1, 2));
    CHECK(exponent_row(t0, "small_a").exponent == Q64(15, 16));
    CHECK(exponent_row(t0, "small_b").exponent == Q64(15, 16));
    CHECK_FALSE(t0.small_threshold_finite);

    // the headline bound coincides with the small-h bound for large h at theta = 7/64
    for (int i = 0; i < 28; ++i) {
        const Q64 he(i, 32);
        const auto ti = exponent_calculator(Q64(1, 16), Q64(7, 64), he);
        CHECK(exponent_row(ti, "headline").exponent == exponent_row(ti, "small_b").exponent);
        CHECK(exponent_row(ti, "small_b").exponent == Q64(7, 128) * he + Q64(15, 16) + Q64(7, 512));
    }
    // small_b at h_exp = 0 is 15/16 + theta / 8
    for (Q64 th : {Q64(0), Q64(1, 64), Q64(7, 64)})
        CHECK(exponent_row(exponent_calculator(Q64(1, 16), th, Q64(0)), "small_b").exponent == Q64(15, 16) + th / 8);
    // the general bound is continuous across its h ranges
    const auto tg = exponent_calculator(Q64(1, 16), Q64(7, 64), Q64(1, 2));
    CHECK(exponent_row(tg, "general_b").applies != exponent_row(tg, "general_a").applies);
    CHECK_THROWS_AS(exponent_calculator(Q64(1, 8), Q64(0), Q64(0)), Error);
    CHECK_THROWS_AS(exponent_calculator(Q64(1, 16), Q64(0), Q64(1)), Error);
}

TEST_CASE("two-term bound") {
    // at h_exp = 0 the second term dominates: 15/16 + 3 theta / 8
    CHECK(exponent_row(exponent_calculator(Q64(1, 16), Q64(7, 64), Q64(0)), "two_term").exponent == Q64(501, 512));
    // at theta = 0 it is 1 - delta until the h^(1/4) term wakes up at h_exp = 1 - 2 delta
    CHECK(exponent_row(exponent_calculator(Q64(1, 16), Q64(0), Q64(1, 2)), "two_term").exponent == Q64(15, 16));
    CHECK(exponent_row(exponent_calculator(Q64(1, 16), Q64(0), Q64(15, 16)), "two_term").exponent ==
          Q64(15, 16) + Q64(1, 64));
}

TEST_CASE("small experiment is deterministic") {
    ExperimentConfig c;
    c.x_min = 1e4;
    c.x_max = 3.2e5;
    c.grid_points = 6;
    const auto r1 = run_experiment(c);
    c.threads = 3;
    const auto r3 = run_experiment(c);
    CHECK(csv_of(r1) == csv_of(r3));
    REQUIRE(r1.rows.size() == 6);
    for (const auto& row : r1.rows) {
        CHECK(row.R == row.S - row.M);
        CHECK(row.absR == std::fabs(row.R));
        CHECK(std::fabs(row.R) < 0.01 * row.S);
    }
    CHECK(r1.has_slope);
    CHECK(csv_of(r1).rfind("x,S,M,R,absR\n", 0) == 0);
    CHECK(r1.predicted_exponent == Q64(501, 512));
}

TEST_CASE("verify_all items") {
    const auto rep = verify_all(1);
    std::vector<std::string> names;
    for (const auto& it : rep.items) {
        names.push_back(it.name);
        CHECK(!it.detail.empty());
    }
    for (const char* n : {"sieve_dk", "ramanujan_sum", "coset_bijection", "automorphy", "determinant_correspondence",
                          "partition_lemma", "euler_product", "dyadic_cover", "main_term", "exponent_table"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    for (const auto& it : rep.items)
        if (it.name != "ksum_sigma_envelope" && it.name != "twisted_ksum_envelope") CHECK_MESSAGE(it.passed, it.name);
}
