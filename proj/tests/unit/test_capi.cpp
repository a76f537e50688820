#include "shiftconv/shiftconv.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string take(sc_text* t) {
    std::string s = sc_text_data(t);
    sc_text_free(t);
    return s;
}

} // namespace

TEST_CASE("version and error state") {
    CHECK(std::string(sc_version()).size() > 0);
    uint64_t v = 0;
    CHECK(sc_gcd_infty(12, 2, &v) == SC_OK);
    CHECK(v == 4);
    CHECK(std::string(sc_last_error()).empty());
    CHECK(sc_gcd_infty(0, 2, &v) == SC_ERR_INVALID_ARGUMENT);
    CHECK(!std::string(sc_last_error()).empty());
    CHECK(sc_gcd_infty(5, 3, nullptr) == SC_ERR_INVALID_ARGUMENT);
    CHECK(sc_gcd_infty(5, 3, &v) == SC_OK);
    CHECK(std::string(sc_last_error()).empty());
}

TEST_CASE("divisor tables") {
    sc_divisor_table* t = nullptr;
    REQUIRE(sc_sieve_dk(3, 1000, &t) == SC_OK);
    uint64_t v = 0;
    CHECK(sc_divisor_table_get(t, 4, &v) == SC_OK);
    CHECK(v == 6);
    CHECK(sc_divisor_table_get(t, 0, &v) == SC_OK);
    CHECK(v == 0);
    CHECK(sc_divisor_table_get(t, 1001, &v) == SC_ERR_INVALID_ARGUMENT);
    sc_divisor_table_free(t);
    CHECK(sc_sieve_dk(0, 10, &t) == SC_ERR_INVALID_ARGUMENT);
    CHECK(sc_sieve_dk(2, uint64_t{1} << 40, &t) == SC_ERR_CAPACITY);
    sc_divisor_table_free(nullptr);
}

TEST_CASE("factorize and ramanujan sums") {
    uint64_t primes[4];
    int exps[4];
    size_t count = 0;
    REQUIRE(sc_factorize(360, primes, exps, 4, &count) == SC_OK);
    REQUIRE(count == 3);
    CHECK(primes[0] == 2);
    CHECK(exps[0] == 3);
    CHECK(primes[2] == 5);
    CHECK(sc_factorize(2 * 3 * 5 * 7 * 11, primes, exps, 4, &count) == SC_ERR_CAPACITY);
    CHECK(count == 5);
    CHECK(sc_factorize(0, primes, exps, 4, &count) == SC_ERR_INVALID_ARGUMENT);
    int64_t c = 0;
    for (uint64_t d = 1; d <= 40; ++d)
        for (int64_t h = -5; h <= 5; ++h) {
            REQUIRE(sc_ramanujan_sum(d, h, &c) == SC_OK);
            double re = 0;
            for (uint64_t a = 1; a <= d; ++a) {
                uint64_t x = a, y = d;
                while (y) x %= y, std::swap(x, y);
                if (x == 1) re += std::cos(2 * M_PI * static_cast<double>(a) * static_cast<double>(h) / static_cast<double>(d));
            }
            REQUIRE(c == std::llround(re));
        }
}

TEST_CASE("weights and sums") {
    sc_weight* w = nullptr;
    REQUIRE(sc_weight_create("mollifier", 0.5, 1.0, &w) == SC_OK);
    double v = 0;
    CHECK(sc_weight_eval(w, 0.75, 0, &v) == SC_OK);
    CHECK(v > 0);
    CHECK(sc_weight_eval(w, 2.0, 0, &v) == SC_OK);
    CHECK(v == 0);
    CHECK(sc_weight_eval(w, 0.75, 9, &v) == SC_ERR_INVALID_ARGUMENT);
    sc_weight* bad = nullptr;
    CHECK(sc_weight_create("box", 0.5, 1.0, &bad) == SC_ERR_INVALID_ARGUMENT);
    CHECK(bad == nullptr);

    double s1 = 0, s4 = 0, m = 0;
    REQUIRE(sc_direct_sum(2, 1, 1e5, w, 1, &s1) == SC_OK);
    REQUIRE(sc_direct_sum(2, 1, 1e5, w, 4, &s4) == SC_OK);
    CHECK(s1 == s4);
    REQUIRE(sc_main_term(2, 1, 1e5, w, 0, 2, &m) == SC_OK);
    CHECK(std::fabs(s1 - m) < 0.01 * s1);
    CHECK(sc_direct_sum(2, 0, 1e5, w, 1, &s1) == SC_ERR_INVALID_ARGUMENT);
    CHECK(sc_direct_sum(2, 1, 1e9, w, 1, &s1) == SC_ERR_CAPACITY);
    double c = 0;
    REQUIRE(sc_certain_sum(1, 3, 1, 1e4, w, w, &c) == SC_OK);
    CHECK(c == 0.0);
    REQUIRE(sc_certain_sum(2, 3, 1, 1e4, w, w, &c) == SC_OK);
    CHECK(c > 0);
    sc_weight_free(w);
}

TEST_CASE("verification entry points") {
    int passed = 0;
    sc_text* rep = nullptr;
    REQUIRE(sc_verify_detmat(2, 3, 1, 1000, &passed, &rep) == SC_OK);
    CHECK(passed == 1);
    CHECK(!take(rep).empty());
    REQUIRE(sc_verify_cosets(5, &passed, &rep) == SC_OK);
    CHECK(passed == 1);
    take(rep);
    REQUIRE(sc_verify_partition(24, 4, "1/16", &passed, &rep) == SC_OK);
    CHECK(passed == 1);
    take(rep);
    CHECK(sc_verify_partition(24, 4, "1/8", &passed, &rep) == SC_ERR_INVALID_ARGUMENT);
    CHECK(sc_verify_partition(24, 4, "x", &passed, &rep) == SC_ERR_INVALID_ARGUMENT);
    REQUIRE(sc_exponents("1/16", "7/64", "0", &rep) == SC_OK);
    CHECK(take(rep).find("501/512") != std::string::npos);
    CHECK(sc_exponents("1/16", "7/64", "1", &rep) == SC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config and experiment round trip") {
    sc_config* cfg = nullptr;
    REQUIRE(sc_config_create(&cfg) == SC_OK);
    CHECK(sc_config_set(cfg, "xMax", "3.2e5") == SC_OK);
    CHECK(sc_config_set(cfg, "gridPoints", "6") == SC_OK);
    CHECK(sc_config_set(cfg, "colour", "red") == SC_ERR_INVALID_ARGUMENT);
    CHECK(sc_config_set(cfg, "k", "x") == SC_ERR_INVALID_ARGUMENT);
    sc_report* r = nullptr;
    REQUIRE(sc_run_experiment(cfg, &r) == SC_OK);
    CHECK(sc_report_row_count(r) == 6);
    double row[5];
    REQUIRE(sc_report_get_row(r, 0, row) == SC_OK);
    CHECK(row[0] == 1e4);
    CHECK(row[3] == row[1] - row[2]);
    CHECK(sc_report_get_row(r, 6, row) == SC_ERR_INVALID_ARGUMENT);
    int has = 0;
    double slope = 0;
    REQUIRE(sc_report_slope(r, &has, &slope) == SC_OK);
    CHECK(has == 1);
    sc_text* csv = nullptr;
    REQUIRE(sc_report_csv(r, &csv) == SC_OK);
    const std::string text = take(csv);
    CHECK(text.rfind("x,S,M,R,absR\n", 0) == 0);
    const std::string path = "capi_test_report.csv";
    REQUIRE(sc_report_write_csv(r, path.c_str()) == SC_OK);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == text);
    std::remove(path.c_str());
    CHECK(sc_report_write_csv(r, "/nonexistent/dir/out.csv") == SC_ERR_IO);
    sc_text* summary = nullptr;
    REQUIRE(sc_report_summary(r, &summary) == SC_OK);
    CHECK(!take(summary).empty());
    sc_report_free(r);

    CHECK(sc_config_set(cfg, "xMax", "1e8") == SC_OK);
    CHECK(sc_run_experiment(cfg, &r) == SC_ERR_CAPACITY);
    sc_config_free(cfg);
    sc_config* missing = nullptr;
    CHECK(sc_config_load("/nonexistent/run.cfg", &missing) == SC_ERR_IO);
}
