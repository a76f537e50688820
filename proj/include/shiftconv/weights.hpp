#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace shiftconv {

enum class WeightShape { mollifier, cos2 };

WeightShape parse_shape(const std::string& name);
const char* shape_name(WeightShape s);

inline constexpr int kMaxDeriv = 8;

class SmoothWeight {
public:
    explicit SmoothWeight(WeightShape shape = WeightShape::mollifier, double lo = 0.5, double hi = 1.0);

    double operator()(double t) const { return eval(t); }
    double eval(double t) const;
    // j-th derivative, 0 <= j <= 8
    double eval_deriv(double t, int j) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    WeightShape shape() const { return shape_; }
    // Upper bounds for |w^(j)| on the support, from a dense scan padded by 5%.
    const std::array<double, kMaxDeriv + 1>& deriv_bounds() const { return bounds_; }

private:
    WeightShape shape_;
    double lo_, hi_;
    std::array<double, kMaxDeriv + 1> bounds_{};
};

// C-infinity step: 0 for y <= 0, 1 for y >= 1, smooth and increasing between.
double smooth_step(double y);

// Members v_j(u) = base(u / 2^j) summing to 1 on (0, inf).
// base(u) = S(log2 u) - S(log2 u - 1) with S a smooth step of the given width
// centred at 0, so the base lives on [2^(-width/2), 2^(1+width/2)].
class DyadicPartition {
public:
    explicit DyadicPartition(double width = 1.0);

    double base(double u) const;
    double member(int j, double u) const;
    // Sum of v_j(u) over all j with v_j(u) possibly nonzero.
    double total(double u) const;
    double support_lo() const;
    double support_hi() const;
    double width() const { return width_; }

private:
    double step(double t) const;
    double width_;
};

DyadicPartition make_partition(double width = 1.0);

// Kernel on [1,2] normalized so that the integral of psi(y) dy / y equals 1.
double psi_kernel(double y);

struct Quadrature {
    double value = 0;
    double error = 0;
};

inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr unsigned kMaxQuadDepth = 40;

// Globally adaptive Gauss-Kronrod (15/31) on [a, b]; throws nonconvergence if the
// requested tolerance is not met. The error budget is max(rel_tol * int |f|, abs_tol).
Quadrature adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = kDefaultRelTol, double abs_tol = 0);
// Same, with the range split at the given increasing break points first.
Quadrature adaptive_integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                              double rel_tol = kDefaultRelTol, double abs_tol = 0);

// integral of w(xi / x) f(xi) d xi over the support of w scaled by x.
double integrate(const SmoothWeight& w, double x, const std::function<double(double)>& f,
                 double rel_tol = kDefaultRelTol);

} // namespace shiftconv
