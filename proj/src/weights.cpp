#include "shiftconv/weights.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

namespace shiftconv {

namespace {

using J = Jet<kMaxDeriv>;

constexpr double kPi = boost::math::constants::pi<double>();

// Shape profile on u in (-1, 1)
J profile(WeightShape shape, const J& u) {
    if (shape == WeightShape::mollifier) {
        // exp(-1 / (1 - u^2))
        J one = J::constant(1.0);
        return exp(-recip(one - u * u));
    }
    J s, c;
    sincos((kPi / 2) * u, s, c);
    return c * c;
}

double E(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

} // namespace

WeightShape parse_shape(const std::string& name) {
    if (name == "mollifier") return WeightShape::mollifier;
    if (name == "cos2") return WeightShape::cos2;
    fail(Errc::invalid_argument, "unknown weight shape '" + name + "'");
}

const char* shape_name(WeightShape s) { return s == WeightShape::mollifier ? "mollifier" : "cos2"; }

SmoothWeight::SmoothWeight(WeightShape shape, double lo, double hi) : shape_(shape), lo_(lo), hi_(hi) {
    require(lo > 0 && hi > lo && std::isfinite(hi), Errc::invalid_argument, "weight support must satisfy 0 < lo < hi");
    const int n = 4096;
    for (int i = 1; i < n; ++i) {
        const double t = lo_ + (hi_ - lo_) * i / n;
        for (int j = 0; j <= kMaxDeriv; ++j) bounds_[j] = std::max(bounds_[j], std::fabs(eval_deriv(t, j)));
    }
    for (auto& b : bounds_) b *= 1.05;
}

double SmoothWeight::eval(double t) const {
    if (!(t > lo_ && t < hi_)) return 0.0;
    const double u = (2 * t - lo_ - hi_) / (hi_ - lo_);
    if (shape_ == WeightShape::mollifier) return std::exp(-1.0 / (1.0 - u * u));
    const double c = std::cos(kPi / 2 * u);
    return c * c;
}

double SmoothWeight::eval_deriv(double t, int j) const {
    require(j >= 0 && j <= kMaxDeriv, Errc::invalid_argument, "derivative order must be in [0, 8]");
    if (!(t > lo_ && t < hi_)) return 0.0;
    const double scale = 2.0 / (hi_ - lo_);
    J u = J::variable((2 * t - lo_ - hi_) / (hi_ - lo_));
    u.c[1] = scale;
    return profile(shape_, u).deriv(j);
}

double smooth_step(double y) {
    if (y <= 0) return 0.0;
    if (y >= 1) return 1.0;
    const double a = E(y), b = E(1 - y);
    return a / (a + b);
}

DyadicPartition::DyadicPartition(double width) : width_(width) {
    require(width > 0 && width <= 1, Errc::invalid_argument, "partition width must be in (0, 1]");
}

DyadicPartition make_partition(double width) { return DyadicPartition(width); }

double DyadicPartition::step(double t) const { return smooth_step(t / width_ + 0.5); }

double DyadicPartition::base(double u) const {
    if (!(u > 0)) return 0.0;
    const double t = std::log2(u);
    return step(t) - step(t - 1);
}

double DyadicPartition::member(int j, double u) const { return base(std::ldexp(u, -j)); }

double DyadicPartition::total(double u) const {
    const int c = static_cast<int>(std::floor(std::log2(u)));
    double s = 0;
    for (int j = c - 2; j <= c + 2; ++j) s += member(j, u);
    return s;
}

double DyadicPartition::support_lo() const { return std::exp2(-width_ / 2); }
double DyadicPartition::support_hi() const { return std::exp2(1 + width_ / 2); }

double psi_kernel(double y) {
    static const SmoothWeight bump(WeightShape::mollifier, 1.0, 2.0);
    static const double norm = [] {
        return adaptive_integrate([](double v) { return bump(v) / v; }, 1.0, 2.0, 1e-13).value;
    }();
    return bump(y) / norm;
}

Quadrature adaptive_integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                              double rel_tol, double abs_tol) {
    require(breaks.size() >= 2, Errc::invalid_argument, "quadrature needs at least two break points");
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Panel {
        double a, b, value, error, l1;
        unsigned depth;
    };
    auto eval = [&](double lo, double hi, unsigned depth) {
        Panel p{lo, hi, 0, 0, 0, depth};
        p.value = GK::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
        return p;
    };
    // global refinement: always split the panel with the largest error
    auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    // a single 15/31 pair can agree by accident on a flat-topped bump, so start from 16 panels per piece
    constexpr int kInitialPanels = 16;
    std::vector<Panel> heap;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k], b = breaks[k + 1];
        require(b >= a, Errc::invalid_argument, "quadrature break points must increase");
        if (b == a) continue;
        for (int i = 0; i < kInitialPanels; ++i)
            heap.push_back(eval(a + (b - a) * i / kInitialPanels,
                                i + 1 == kInitialPanels ? b : a + (b - a) * (i + 1) / kInitialPanels, 4));
    }
    if (heap.empty()) return {};
    std::make_heap(heap.begin(), heap.end(), cmp);
    constexpr std::size_t kMaxPanels = 1 << 16;
    constexpr double kRoundoff = 64 * std::numeric_limits<double>::epsilon();
    for (;;) {
        double value = 0, error = 0, l1 = 0;
        for (const auto& p : heap) {
            value += p.value;
            error += p.error;
            l1 += p.l1;
        }
        if (!std::isfinite(value)) fail(Errc::nonconvergence, "quadrature produced a non-finite value");
        if (error <= std::max(rel_tol * l1, abs_tol) || error <= kRoundoff * l1 || error == 0) {
            // re-add in a fixed order so the result does not depend on heap layout
            std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
            std::vector<double> vals;
            for (const auto& p : heap) vals.push_back(p.value);
            return {pairwise_sum(vals), error};
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Panel worst = heap.back();
        heap.pop_back();
        if (worst.depth >= kMaxQuadDepth || heap.size() + 2 > kMaxPanels)
            fail(Errc::nonconvergence, "quadrature did not reach tolerance within depth 40");
        const double mid = 0.5 * (worst.a + worst.b);
        heap.push_back(eval(worst.a, mid, worst.depth + 1));
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(eval(mid, worst.b, worst.depth + 1));
        std::push_heap(heap.begin(), heap.end(), cmp);
    }
}

Quadrature adaptive_integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              double abs_tol) {
    if (!(b > a)) return {};
    return adaptive_integrate(f, std::vector<double>{a, b}, rel_tol, abs_tol);
}

double integrate(const SmoothWeight& w, double x, const std::function<double(double)>& f, double rel_tol) {
    require(x > 0, Errc::domain, "integrate: scale must be positive");
    return adaptive_integrate([&](double xi) { return w(xi / x) * f(xi); }, w.lo() * x, w.hi() * x, rel_tol).value;
}

} // namespace shiftconv
