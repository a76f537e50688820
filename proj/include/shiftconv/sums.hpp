#pragma once

#include "shiftconv/arith.hpp"
#include "shiftconv/weights.hpp"

#include <boost/rational.hpp>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace shiftconv {

struct ConvolutionQuery {
    int k = 2;
    i64 h = 1;
    double x = 1e4;
    SmoothWeight w{};
};

// Tables of d_k and d sized for every x up to x_max; reusable across a grid.
class ConvolutionSummer {
public:
    ConvolutionSummer(int k, i64 h, double x_max, double support_hi = 1.0);

    // sum_n w(n/x) d_k(n) d(n+h)
    double sum(double x, const SmoothWeight& w, int threads = 1) const;
    int k() const { return k_; }
    i64 h() const { return h_; }

private:
    int k_;
    i64 h_;
    u64 limit_;
    std::vector<std::uint32_t> d_;
    DivisorTable dk_;
};

double direct_sum(const ConvolutionQuery& q, int threads = 1);

struct CertainQuery {
    u64 r1 = 1, r2 = 1;
    i64 h = 1;
    double x = 1e4;
    SmoothWeight w1{}, w2{};
};

struct CertainTerm {
    u64 n;
    double weight; // w1(r1 n/x) w2(r2 n/x)
    u64 d1, d2;    // d(r1 n + h), d(r2 n + h)
};

// sum_n w1(r1 n/x) w2(r2 n/x) d(r1 n + h) d(r2 n + h)
double certain_sum(const CertainQuery& q);
std::vector<CertainTerm> certain_terms(const CertainQuery& q);

enum class CaseTag { A, B, C };

struct PartitionCase {
    CaseTag tag = CaseTag::A;
    std::vector<int> witness; // indices (0-based, into the sorted vector) for tag C
};

const char* case_name(CaseTag t);

// Sorted-descending exponent vector on the simplex, 0 < delta <= 1/16.
// Search order A, B, C; C looks at prefixes first, then all subsets.
PartitionCase classify_partition(const std::vector<double>& alpha, double delta);
PartitionCase classify_partition(const std::vector<boost::rational<i64>>& alpha, boost::rational<i64> delta);

// Re-checks the defining inequality of a returned case.
bool verify_case(const std::vector<double>& alpha, double delta, const PartitionCase& c);
bool verify_case(const std::vector<boost::rational<i64>>& alpha, boost::rational<i64> delta, const PartitionCase& c);

struct ExponentThresholds {
    double X1, X2, X3, X4;
};
ExponentThresholds thresholds(double x, double delta);

// a_i in [A_i, 2 A_i), A_i a power of two
struct DyadicBox {
    std::vector<u64> A;
    double product() const;
};

// Ordered tuples of powers of two whose boxes meet {prod a in (lo x, hi x)};
// every tuple of positive integers with product in that window lies in exactly one box.
std::vector<DyadicBox> dyadic_cover(double x, int k, double lo = 0.5, double hi = 1.0);

// sum over a in the box of w(a_1...a_k / x) d(a_1...a_k + h), by k-fold loop
double box_sum(const DyadicBox& box, double x, i64 h, const SmoothWeight& w);
// same sum without the box restriction
double factor_expansion_sum(int k, double x, i64 h, const SmoothWeight& w);

struct RemainderBounds {
    double rem1 = 0;
    double rem2 = 0;
    std::vector<std::pair<unsigned, double>> rem3; // (subset bitmask, bound)
};

// Right-hand sides of the three remainder bounds with the x^eps factors dropped.
RemainderBounds remainder_bounds(const DyadicBox& box, double x, i64 h, double theta);
double rem3_bound(double A, double x, i64 h, double theta);

enum class BoundKind { rem1, rem2, rem3 };

struct BoxClass {
    PartitionCase pc;
    std::vector<double> alpha; // sorted descending, sums to 1
    BoundKind bound = BoundKind::rem1;
    double A = 0; // product over the witness for rem3
};

BoxClass classify_box(const DyadicBox& box, double x, double delta);

struct PartitionGridReport {
    u64 points = 0;
    u64 violations = 0;
    u64 reverify_failures = 0;
    u64 count_a = 0, count_b = 0, count_c = 0;
};

// All sorted alpha with entries in (1/resolution) Z, sum 1, length <= kmax, exact arithmetic.
PartitionGridReport verify_partition_grid(int resolution, int kmax, boost::rational<i64> delta);

} // namespace shiftconv
