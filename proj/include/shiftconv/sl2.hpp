#pragma once

#include "shiftconv/arith.hpp"

#include <functional>
#include <random>
#include <vector>

namespace shiftconv {

struct Mat2 {
    i64 a = 1, b = 0, c = 0, d = 1;

    i64 det() const { return a * d - b * c; }
    friend Mat2 operator*(const Mat2& x, const Mat2& y);
    friend bool operator==(const Mat2& x, const Mat2& y) = default;
};

Mat2 mat_mul_checked(const Mat2& x, const Mat2& y);

struct ProjPoint {
    i64 x = 0, y = 1; // canonical representative modulo q
    friend bool operator==(const ProjPoint&, const ProjPoint&) = default;
    friend auto operator<=>(const ProjPoint&, const ProjPoint&) = default;
};

// P^1(Z/qZ) with canonical normalization computed prime power by prime power:
// at p^e the class of (x, y) is scaled to (x/y, 1) if p does not divide y,
// and to (1, y/x) otherwise.
class ProjLine {
public:
    explicit ProjLine(u64 q);

    u64 modulus() const { return q_; }
    // Requires gcd(x, y, q) = 1.
    ProjPoint normalize(i64 x, i64 y) const;
    bool is_primitive(i64 x, i64 y) const;
    std::vector<ProjPoint> points() const;
    u64 size() const;

private:
    struct Local {
        i64 p, pe;
        i64 crt; // idempotent for this component modulo q
    };
    u64 q_;
    std::vector<Local> parts_;
};

std::vector<ProjPoint> proj_line(u64 q);

struct CosetLabel {
    ProjPoint top;    // class of (a, b) in P^1_{q1}
    ProjPoint bottom; // class of (c, d) in P^1_{q2}
    friend bool operator==(const CosetLabel&, const CosetLabel&) = default;
    friend auto operator<=>(const CosetLabel&, const CosetLabel&) = default;
};

// Cosets of Gamma_2(q1, q2) = { q1 | b, q2 | c } in SL_2(Z).
class CosetSpace {
public:
    CosetSpace(u64 q1, u64 q2);

    u64 q1() const { return q1_; }
    u64 q2() const { return q2_; }
    const std::vector<CosetLabel>& labels() const { return labels_; }
    CosetLabel coset_of(const Mat2& m) const;
    Mat2 lift(const CosetLabel& label) const;
    bool valid(const CosetLabel& label) const;

private:
    u64 q1_, q2_, q0_;
    ProjLine line1_, line2_;
    std::vector<CosetLabel> labels_;
};

std::vector<CosetLabel> coset_list(u64 q1, u64 q2);
CosetLabel coset_of(const Mat2& m, u64 q1, u64 q2);
Mat2 lift_coset(const CosetLabel& label, u64 q1, u64 q2);

// Lift an element of SL_2(Z/N) to SL_2(Z).
Mat2 lift_sl2(i64 a, i64 b, i64 c, i64 d, i64 N);

enum class WeightMode { alpha0, alpha };

// Indicator weights on integer matrices; automorphic for Gamma_2(r2, r1).
class AutoWeight {
public:
    AutoWeight(u64 r1, u64 r2, i64 h = 1, WeightMode mode = WeightMode::alpha0);

    int operator()(const Mat2& m) const;
    u64 r1() const { return r1_; }
    u64 r2() const { return r2_; }
    u64 r0() const { return r0_; }
    u64 rt1() const { return rt1_; }
    u64 rt2() const { return rt2_; }
    i64 h() const { return h_; }
    WeightMode mode() const { return mode_; }

private:
    u64 r1_, r2_, r0_, rt1_, rt2_;
    i64 h_;
    WeightMode mode_;
};

using MatrixWeight = std::function<int(const Mat2&)>;

// Samples gamma in Gamma_2(q1, q2) as words of length <= 12 in the generators
// (1,q1;0,1), (1,0;q2,1), -I and checks weight(gamma g) == weight(g).
bool check_automorphy(const MatrixWeight& weight, u64 q1, u64 q2, int trials, u64 seed = 1);
bool check_automorphy(const AutoWeight& w, int trials, u64 seed = 1);

Mat2 random_sl2(std::mt19937_64& rng, int max_len = 12);

// Exact K-sums over Gamma_2(r2, r1) \ SL_2(Z) for weights in alpha0 mode.
// Representatives may be supplied to test independence of the lift.
struct KSumContext {
    AutoWeight w;
    std::vector<Mat2> reps;

    explicit KSumContext(const AutoWeight& weight);
    KSumContext(const AutoWeight& weight, std::vector<Mat2> representatives);

    // sum over tau of w(tau) w(tau sigma)
    i64 correlation(const Mat2& sigma) const;
};

double ksum_b(const KSumContext& ctx, double B);
double ksum_c(const KSumContext& ctx, double C);
double ksum_b(const AutoWeight& w, double B);
double ksum_c(const AutoWeight& w, double C);
// Max of |correlation(sigma)| over the identity plus samples-1 random integer matrices.
double ksum_sigma_sup(const AutoWeight& w, int samples, u64 seed = 1);

// Triple sum over g in the box |a| + |b|L + |c|/L + |d| <= 10, sigma_j = (1, f_j r; 0, k)
// with 0 <= f_j < k coprime to k, and sigma = sigma_1^{-1} g sigma_2 integral.
// The weight is taken as zero off integral matrices.
double twisted_ksum(const AutoWeight& w, int k, u64 r, double L);

inline constexpr u64 kMaxEnumeration = 10'000'000;

} // namespace shiftconv
