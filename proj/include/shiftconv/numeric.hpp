#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace shiftconv {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Recursive halving sum; the tree depends only on n.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

inline constexpr std::uint64_t kChunk = 1 << 14;

// Sum term(i) for lo <= i < hi. Chunk boundaries are fixed, so the result is
// bit-identical for any thread count.
template <class F>
double chunked_sum(std::uint64_t lo, std::uint64_t hi, const F& term, int threads = 1) {
    if (hi <= lo) return 0.0;
    const std::uint64_t nchunks = (hi - lo + kChunk - 1) / kChunk;
    std::vector<double> partial(nchunks, 0.0);
    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        std::vector<double> buf;
        for (std::uint64_t c = first; c < nchunks; c += stride) {
            const std::uint64_t a = lo + c * kChunk;
            const std::uint64_t b = std::min(hi, a + kChunk);
            buf.resize(b - a);
            for (std::uint64_t i = a; i < b; ++i) buf[i - a] = term(i);
            partial[c] = pairwise_sum(buf.data(), buf.size());
        }
    };
    const std::uint64_t t = std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, nchunks));
    if (t == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t i = 0; i < t; ++i) pool.emplace_back(work, i, t);
        for (auto& th : pool) th.join();
    }
    return pairwise_sum(partial);
}

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least squares for the design matrix (row-major, rows x cols); throws domain on rank deficiency.
std::vector<double> least_squares(const std::vector<double>& design, std::size_t rows, std::size_t cols,
                                  const std::vector<double>& rhs);

// Truncated Taylor series: c[j] = f^(j)(t) / j!
template <int N>
struct Jet {
    std::array<double, N + 1> c{};

    static Jet constant(double v) {
        Jet r;
        r.c[0] = v;
        return r;
    }
    static Jet variable(double t) {
        Jet r;
        r.c[0] = t;
        if (N >= 1) r.c[1] = 1.0;
        return r;
    }
    double deriv(int j) const {
        double f = 1;
        for (int i = 2; i <= j; ++i) f *= i;
        return c[j] * f;
    }

    friend Jet operator+(Jet a, const Jet& b) {
        for (int i = 0; i <= N; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b) {
        for (int i = 0; i <= N; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend Jet operator-(Jet a) {
        for (auto& v : a.c) v = -v;
        return a;
    }
    friend Jet operator*(double s, Jet a) {
        for (auto& v : a.c) v *= s;
        return a;
    }
    friend Jet operator+(double s, Jet a) {
        a.c[0] += s;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
    friend Jet recip(const Jet& a) {
        Jet r;
        r.c[0] = 1.0 / a.c[0];
        for (int n = 1; n <= N; ++n) {
            double s = 0;
            for (int j = 1; j <= n; ++j) s += a.c[j] * r.c[n - j];
            r.c[n] = -s / a.c[0];
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
    friend Jet exp(const Jet& a) {
        // r' = a' r
        Jet r;
        r.c[0] = std::exp(a.c[0]);
        for (int n = 1; n <= N; ++n) {
            double s = 0;
            for (int j = 1; j <= n; ++j) s += j * a.c[j] * r.c[n - j];
            r.c[n] = s / n;
        }
        return r;
    }
    friend void sincos(const Jet& a, Jet& s, Jet& co) {
        s = Jet{};
        co = Jet{};
        s.c[0] = std::sin(a.c[0]);
        co.c[0] = std::cos(a.c[0]);
        for (int n = 1; n <= N; ++n) {
            double ss = 0, cc = 0;
            for (int j = 1; j <= n; ++j) {
                ss += j * a.c[j] * co.c[n - j];
                cc -= j * a.c[j] * s.c[n - j];
            }
            s.c[n] = ss / n;
            co.c[n] = cc / n;
        }
    }
};

} // namespace shiftconv
