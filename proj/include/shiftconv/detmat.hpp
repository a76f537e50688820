#pragma once

#include "shiftconv/arith.hpp"

#include <functional>
#include <vector>

namespace shiftconv {

struct DetInstance {
    u64 r1 = 1, r2 = 1;
    i64 h = 1;
    u64 r0 = 1, rt1 = 1, rt2 = 1;
    u64 k = 1;      // largest divisor of |rt2 - rt1| supported on primes of r1 r2
    i64 target = 0; // h (rt2 - rt1)
};

DetInstance make_instance(u64 r1, u64 r2, i64 h);

struct DirectSolution {
    u64 n;
    u64 a, d; // a d = r1 n + h
    u64 b, c; // b c = r2 n + h
};

struct MatrixSolution {
    i64 a, b, c, d;
};

// Weight windows: r_i n / x in (1/2, 1) for both i.
std::vector<DirectSolution> direct_solutions(const DetInstance& inst, u64 x);
u64 count_direct(const DetInstance& inst, u64 x);

// Positive-entry matrices with det h (rt2 - rt1), rt2 | a, rt1 | c, r2 | ad - h rt2,
// (ad - h rt2) / (rt2 x) and (bc - h rt1) / (rt1 x) in (1/2, 1).
std::vector<MatrixSolution> matrix_solutions(const DetInstance& inst, u64 x);
u64 count_matrix(const DetInstance& inst, u64 x);

struct Correspondence {
    u64 count_direct = 0;
    u64 count_matrix = 0;
    bool equal = false;
};

Correspondence correspondence_check(const DetInstance& inst, u64 x);

// Solutions written as (sa a', sb b'; sc c', sd d') with positive a', b', c', d'.
struct Scaling {
    u64 sa = 1, sb = 1, sc = 1, sd = 1;
};

void enumerate_scaled(const DetInstance& inst, u64 x, const Scaling& s,
                      const std::function<void(const MatrixSolution& full, const MatrixSolution& reduced)>& visit);

// One cell of the splitting by s0 = gcd(h, r0), s1 = gcd(h, rt1), s2 = gcd(h, rt2).
// Each prime of s1 goes to a or d, each prime of s2 to b or c, and each prime of
// s0 once to a or d and once to b or c. The reduced matrix has det h' (rt2 - rt1).
struct SplitCell {
    u64 u0 = 1, v0 = 1;   // s0 split over (a, d)
    u64 u0p = 1, v0p = 1; // s0 split over (b, c)
    u64 u1 = 1, v1 = 1;   // s1 split over (a, d)
    u64 u2 = 1, v2 = 1;   // s2 split over (b, c)
    i64 h_reduced = 1;
    u64 r0_reduced = 1, rt1_reduced = 1, rt2_reduced = 1;
    Scaling scaling;
};

struct SplitFamily {
    u64 s0 = 1, s1 = 1, s2 = 1;
    std::vector<SplitCell> cells;
};

SplitFamily split_by_gcd(const DetInstance& inst);

struct SplitCheck {
    u64 count_direct = 0;
    u64 count_cells = 0;
    std::size_t cells = 0;
    bool reduced_det_ok = true;
    bool equal = false;
};

// Counts every cell through its own reduced enumeration and compares with the
// direct factorization count.
SplitCheck split_check(const DetInstance& inst, u64 x);

struct GammaCheck {
    u64 total = 0;
    u64 cell_sum = 0;
    std::size_t cells = 0;
    bool coprime = true; // rescaled matrices have gcd(a,c,k) = gcd(b,d,k) = 1
    bool ok = false;
};

// Requires gcd(h, r1 r2) = 1 and rt1 != rt2.
GammaCheck gamma_decomposition_check(const DetInstance& inst, u64 x);

} // namespace shiftconv
