#pragma once

#include "shiftconv/arith.hpp"
#include "shiftconv/weights.hpp"

#include <array>
#include <boost/rational.hpp>
#include <vector>

namespace shiftconv {

using Rational = boost::rational<i64>;

// (c_d(h) / d) (log xi + 2 gamma - 2 log d)
double lambda_eval(i64 h, u64 d, double xi);

// g(m,h) = sum_{d|m} c_d(h)/d, exact
Rational g_eval(u64 m, i64 h);
// g'(m,h) = sum_{d|m} c_d(h) log d / d
double gprime_eval(u64 m, i64 h);
// g_beta(m,h) = sum_{d|m} c_d(h) / d^beta
double g_beta_eval(u64 m, i64 h, double beta);

// g(m,h) and g'(m,h) for 1 <= m <= M, built multiplicatively from a sieve.
struct SingularTables {
    std::vector<double> g, gp;
};
SingularTables singular_tables(u64 M, i64 h);

struct DirichletApprox {
    int k = 2;
    i64 h = 1;
    double s = 2.0;
    u64 N = 1'000'000; // direct truncation
    u64 P = 10'000;    // prime cutoff
};

struct DirichletValue {
    double value = 0;         // partial sum plus fitted tail
    double partial = 0;       // sum over m <= N
    double tail_estimate = 0; // from the fitted mean value of the partial sums
    double tail_bound = 0;    // upper bound for the absolute tail
};

// sum_m d_{k-1}(m) g(m,h) m^{-s}
DirichletValue dirichlet_direct(const DirichletApprox& a);

struct EulerValue {
    double value = 0;
    double truncated = 0;       // product over p <= P together with the p | h factors
    double tail_correction = 0; // multiplicative correction for p > P
};

EulerValue euler_product(const DirichletApprox& a);

// zeta(s)^{-(k-1)} D_h(s) as a product over p <= P of regularized local factors.
double regularized_product(const DirichletApprox& a);

// Prime zeta function sum_p p^{-s} for s > 1.
double prime_zeta(double s);

struct MainTermOptions {
    // width (in log scale) of the smooth transition deciding which variable is largest
    double tau = 1.0;
    double rel_tol = 1e-10;
    int threads = 1;
};

struct MainTermResult {
    double value = 0;
    u64 tuples = 0;      // sorted (a_2..a_k) tuples visited
    u64 closed_form = 0; // tuples whose integral reduced to the two base integrals
    u64 m_max = 0;       // largest product a_2 ... a_k used
};

// Main term of sum_n w(n/x) d_k(n) d(n+h): the first variable is treated as the
// largest one through a smooth partition of unity, and its sum is replaced by the
// integral of sum_{d|m} lambda_{h,d}(um + h).
MainTermResult main_term(int k, i64 h, double x, const SmoothWeight& w, const MainTermOptions& opt = {});

struct CertainFit {
    std::array<double, 3> coeffs{}; // c0, c1, c2
    std::vector<double> residuals;
    double rbar = 1;
};

// values_i ~ (x_i / rbar) (c0 + c1 log x_i + c2 log^2 x_i), rbar = max(r1, r2)
CertainFit certain_main_fit(u64 r1, u64 r2, i64 h, const std::vector<double>& xs, const std::vector<double>& values);

} // namespace shiftconv
