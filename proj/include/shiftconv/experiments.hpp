#pragma once

#include "shiftconv/arith.hpp"

#include <boost/rational.hpp>
#include <iosfwd>
#include <string>
#include <vector>

namespace shiftconv {

using Q64 = boost::rational<i64>;

struct ExperimentConfig {
    int k = 2;
    i64 h = 1;
    double x_min = 1e4;
    double x_max = 1e7;
    int grid_points = 16;
    std::string weight = "mollifier";
    Q64 delta{1, 16};
    Q64 theta{7, 64};
    u64 seed = 1;
    int threads = 1;
    double tau = 1.0;
    double rel_tol = 1e-12;
};

// Throws invalid_argument for out-of-range fields, domain for grids that reach n + h <= 0.
void validate_config(const ExperimentConfig& cfg);

// key = value lines; '#' starts a comment; strings may be quoted.
// Keys: k, h, xMin, xMax, gridPoints, weight, delta, theta, seed, threads, tau, relTol.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Geometric grid rounded to integers.
std::vector<double> experiment_grid(const ExperimentConfig& cfg);

struct ReportRow {
    double x, S, M, R, absR;
};

struct ErrorReport {
    std::vector<ReportRow> rows; // sorted by x
    std::vector<double> dropped; // x values with |R| under the noise floor, left out of the fit
    bool has_slope = false;
    double slope = 0;
    double intercept = 0;
    Q64 predicted_exponent; // shifted-convolution bound at |h| = x_max^{h_exp}
    double h_exp = 0;
};

ErrorReport run_experiment(const ExperimentConfig& cfg);

// Header x,S,M,R,absR with round-trip decimal fields.
void write_csv(const ErrorReport& report, std::ostream& out);

// Exact rational from "p/q", an integer, or a plain decimal such as "0.0625".
Q64 parse_rational(const std::string& s);
std::string format_rational(const Q64& q);

struct ExponentRow {
    std::string name;
    std::string range; // h-range the bound is stated for, as exponents of x
    Q64 exponent;
    bool applies = false;    // h_exp lies in the stated range
    bool nontrivial = false; // exponent < 1
};

struct ExponentTable {
    Q64 delta, theta, h_exp;
    std::vector<ExponentRow> rows;
    // h_exp below which the small-h bound for large h is nontrivial; unbounded when theta = 0
    bool small_threshold_finite = false;
    Q64 small_threshold;
};

// delta in [0, 1/16], theta in [0, 1/2), h_exp in [0, 1).
ExponentTable exponent_calculator(Q64 delta, Q64 theta, Q64 h_exp);
const ExponentRow& exponent_row(const ExponentTable& t, const std::string& name);

struct VerifyItem {
    std::string name;
    bool passed = false;
    std::string detail; // measured constants and counts
};

struct VerifyReport {
    std::vector<VerifyItem> items;
    bool all_passed() const;
};

// Reduced-size run of every module's checks.
VerifyReport verify_all(u64 seed);

} // namespace shiftconv
