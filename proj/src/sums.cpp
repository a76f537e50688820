#include "shiftconv/sums.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace shiftconv {

namespace {

using Q = boost::rational<i64>;

u64 window_end(double x, double hi) { return static_cast<u64>(std::ceil(hi * x)); }

template <class T>
struct Ops;

template <>
struct Ops<double> {
    static constexpr double slack = 1e-12;
    static double third() { return 1.0 / 3.0; }
    static double half() { return 0.5; }
    static double from(i64 n, i64 d) { return static_cast<double>(n) / static_cast<double>(d); }
};

template <>
struct Ops<Q> {
    static Q third() { return Q(1, 3); }
    static Q half() { return Q(1, 2); }
    static Q from(i64 n, i64 d) { return Q(n, d); }
};

template <class T>
T slack_of() {
    if constexpr (std::is_same_v<T, double>)
        return Ops<double>::slack;
    else
        return T(0);
}

template <class T>
void check_alpha(const std::vector<T>& alpha, T delta) {
    require(delta > T(0) && delta <= Ops<T>::from(1, 16), Errc::invalid_argument,
            "partition cases need 0 < delta <= 1/16");
    require(!alpha.empty(), Errc::invalid_argument, "alpha must be nonempty");
    T sum(0);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        require(alpha[i] >= -slack_of<T>() && alpha[i] <= T(1) + slack_of<T>(), Errc::invalid_argument,
                "alpha entries must lie in [0, 1]");
        if (i > 0) require(alpha[i] <= alpha[i - 1] + slack_of<T>(), Errc::invalid_argument, "alpha must be sorted descending");
        sum += alpha[i];
    }
    const T dev = sum > T(1) ? sum - T(1) : T(1) - sum;
    require(dev <= slack_of<T>(), Errc::invalid_argument, "alpha must sum to 1");
}

template <class T>
bool c_holds(const T& s, T delta) {
    return s >= 2 * delta - slack_of<T>() && s <= Ops<T>::third() - Ops<T>::from(4, 3) * delta + slack_of<T>();
}

template <class T>
bool verify_impl(const std::vector<T>& alpha, T delta, const PartitionCase& c) {
    switch (c.tag) {
    case CaseTag::A:
        return alpha[0] >= Ops<T>::third() + Ops<T>::from(2, 3) * delta - slack_of<T>();
    case CaseTag::B:
        return alpha.size() >= 2 && alpha[0] + alpha[1] >= Ops<T>::half() + delta - slack_of<T>();
    case CaseTag::C: {
        if (c.witness.empty()) return false;
        T s(0);
        for (int i : c.witness) {
            if (i < 0 || static_cast<std::size_t>(i) >= alpha.size()) return false;
            s += alpha[static_cast<std::size_t>(i)];
        }
        return c_holds(s, delta);
    }
    }
    return false;
}

template <class T>
PartitionCase classify_impl(const std::vector<T>& alpha, T delta) {
    check_alpha(alpha, delta);
    PartitionCase pc;
    auto done = [&](PartitionCase c) {
        if (!verify_impl(alpha, delta, c)) fail(Errc::internal, "partition case failed re-verification");
        return c;
    };
    pc.tag = CaseTag::A;
    if (verify_impl(alpha, delta, pc)) return done(pc);
    pc.tag = CaseTag::B;
    if (verify_impl(alpha, delta, pc)) return done(pc);
    pc.tag = CaseTag::C;
    const std::size_t k = alpha.size();
    T s(0);
    for (std::size_t i = 0; i < k; ++i) {
        s += alpha[i];
        pc.witness.push_back(static_cast<int>(i));
        if (c_holds(s, delta)) return done(pc);
    }
    require(k <= 20, Errc::capacity, "subset search limited to k <= 20");
    for (u64 mask = 1; mask < (u64{1} << k); ++mask) {
        T t(0);
        pc.witness.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) {
                t += alpha[i];
                pc.witness.push_back(static_cast<int>(i));
            }
        if (c_holds(t, delta)) return done(pc);
    }
    fail(Errc::lemma_violation, "no partition case applies");
}

} // namespace

const char* case_name(CaseTag t) {
    switch (t) {
    case CaseTag::A: return "A";
    case CaseTag::B: return "B";
    case CaseTag::C: return "C";
    }
    return "?";
}

ConvolutionSummer::ConvolutionSummer(int k, i64 h, double x_max, double support_hi) : k_(k), h_(h) {
    require(k >= 1 && k <= 8, Errc::invalid_argument, "k must be in [1, 8]");
    require(h != 0, Errc::invalid_argument, "h must be nonzero");
    require(x_max >= 1 && x_max <= 1e8, Errc::capacity, "x must be in [1, 10^8]");
    limit_ = window_end(x_max, support_hi);
    const i64 top = static_cast<i64>(limit_) + h;
    d_ = sieve_d2(static_cast<u64>(std::max<i64>(top, 1)));
    if (k > 2) dk_ = sieve_dk(k, limit_);
}

double ConvolutionSummer::sum(double x, const SmoothWeight& w, int threads) const {
    const u64 lo = static_cast<u64>(std::floor(w.lo() * x)) + 1;
    const u64 hi = window_end(x, w.hi());
    require(hi <= limit_, Errc::capacity, "x exceeds the sieved range");
    if (hi <= lo) return 0.0;
    require(static_cast<i64>(lo) + h_ >= 1, Errc::domain, "n + h must stay positive on the weight window");
    auto dk = [&](u64 n) -> double {
        if (k_ == 1) return 1.0;
        if (k_ == 2) return static_cast<double>(d_[n]);
        return static_cast<double>(dk_[n]);
    };
    return chunked_sum(
        lo, hi,
        [&](u64 n) {
            const double wv = w(static_cast<double>(n) / x);
            if (wv == 0.0) return 0.0;
            return wv * dk(n) * static_cast<double>(d_[static_cast<u64>(static_cast<i64>(n) + h_)]);
        },
        threads);
}

double direct_sum(const ConvolutionQuery& q, int threads) {
    ConvolutionSummer s(q.k, q.h, q.x, q.w.hi());
    return s.sum(q.x, q.w, threads);
}

std::vector<CertainTerm> certain_terms(const CertainQuery& q) {
    require(q.r1 >= 1 && q.r2 >= 1, Errc::invalid_argument, "r1, r2 must be positive");
    require(q.h != 0, Errc::invalid_argument, "h must be nonzero");
    require(q.x >= 1 && q.x <= 1e8, Errc::capacity, "x must be in [1, 10^8]");
    std::vector<CertainTerm> out;
    const double rmin = static_cast<double>(std::min(q.r1, q.r2));
    const u64 nmax = static_cast<u64>(std::ceil(std::max(q.w1.hi(), q.w2.hi()) * q.x / rmin));
    const u64 top = std::max(q.r1, q.r2) * nmax + static_cast<u64>(std::max<i64>(q.h, 0)) + 1;
    const auto d = sieve_d2(top);
    for (u64 n = 1; n <= nmax; ++n) {
        const double wv = q.w1(static_cast<double>(q.r1 * n) / q.x) * q.w2(static_cast<double>(q.r2 * n) / q.x);
        if (wv == 0.0) continue;
        const i64 m1 = static_cast<i64>(q.r1 * n) + q.h, m2 = static_cast<i64>(q.r2 * n) + q.h;
        require(m1 >= 1 && m2 >= 1, Errc::domain, "r n + h must stay positive on the weight window");
        out.push_back({n, wv, d[static_cast<u64>(m1)], d[static_cast<u64>(m2)]});
    }
    return out;
}

double certain_sum(const CertainQuery& q) {
    const auto terms = certain_terms(q);
    std::vector<double> v;
    v.reserve(terms.size());
    for (const auto& t : terms) v.push_back(t.weight * static_cast<double>(t.d1 * t.d2));
    return pairwise_sum(v);
}

PartitionCase classify_partition(const std::vector<double>& alpha, double delta) { return classify_impl(alpha, delta); }
PartitionCase classify_partition(const std::vector<Q>& alpha, Q delta) { return classify_impl(alpha, delta); }
bool verify_case(const std::vector<double>& alpha, double delta, const PartitionCase& c) {
    return verify_impl(alpha, delta, c);
}
bool verify_case(const std::vector<Q>& alpha, Q delta, const PartitionCase& c) { return verify_impl(alpha, delta, c); }

ExponentThresholds thresholds(double x, double delta) {
    return {std::pow(x, 1.0 / 3 + 2 * delta / 3), std::pow(x, 0.5 + delta), std::pow(x, 1.0 / 3 - 4 * delta / 3),
            std::pow(x, 2 * delta)};
}

double DyadicBox::product() const {
    double p = 1;
    for (u64 a : A) p *= static_cast<double>(a);
    return p;
}

std::vector<DyadicBox> dyadic_cover(double x, int k, double lo, double hi) {
    require(k >= 1, Errc::invalid_argument, "dyadic_cover: k must be >= 1");
    require(k <= 6, Errc::capacity, "dyadic_cover: k must be <= 6");
    require(x >= 1 && lo > 0 && hi > lo, Errc::invalid_argument, "dyadic_cover: bad window");
    std::vector<DyadicBox> out;
    std::vector<u64> cur;
    std::function<void(double)> rec = [&](double prod) {
        if (static_cast<int>(cur.size()) == k) {
            if (prod * std::ldexp(1.0, k) > lo * x) out.push_back({cur});
            return;
        }
        for (u64 a = 1; prod * static_cast<double>(a) < hi * x; a *= 2) {
            cur.push_back(a);
            rec(prod * static_cast<double>(a));
            cur.pop_back();
        }
    };
    rec(1.0);
    std::sort(out.begin(), out.end(), [](const DyadicBox& a, const DyadicBox& b) { return a.A > b.A; });
    return out;
}

double box_sum(const DyadicBox& box, double x, i64 h, const SmoothWeight& w) {
    std::vector<double> terms;
    std::function<void(std::size_t, u64)> rec = [&](std::size_t i, u64 prod) {
        if (i == box.A.size()) {
            const double wv = w(static_cast<double>(prod) / x);
            if (wv != 0.0) terms.push_back(wv * static_cast<double>(divisors(static_cast<u64>(static_cast<i64>(prod) + h)).size()));
            return;
        }
        for (u64 a = box.A[i]; a < 2 * box.A[i]; ++a) {
            if (static_cast<double>(prod * a) >= w.hi() * x) break;
            rec(i + 1, prod * a);
        }
    };
    rec(0, 1);
    return pairwise_sum(terms);
}

double factor_expansion_sum(int k, double x, i64 h, const SmoothWeight& w) {
    std::vector<double> terms;
    std::function<void(int, u64)> rec = [&](int i, u64 prod) {
        if (i == k) {
            const double wv = w(static_cast<double>(prod) / x);
            if (wv != 0.0) terms.push_back(wv * static_cast<double>(divisors(static_cast<u64>(static_cast<i64>(prod) + h)).size()));
            return;
        }
        for (u64 a = 1; static_cast<double>(prod * a) < w.hi() * x; ++a) rec(i + 1, prod * a);
    };
    rec(0, 1);
    return pairwise_sum(terms);
}

double rem3_bound(double A, double x, i64 h, double theta) {
    const double ah = std::fabs(static_cast<double>(h));
    return x / std::sqrt(A) +
           std::pow(A, 0.75) * std::pow(x, 0.75) *
               (std::pow(ah, theta / 2) * std::pow(A, theta / 2) + std::pow(x, theta / 2) / std::pow(A, theta / 2));
}

RemainderBounds remainder_bounds(const DyadicBox& box, double x, i64 h, double theta) {
    require(theta >= 0 && theta <= 7.0 / 64 + 1e-15, Errc::invalid_argument, "theta must be in [0, 7/64]");
    require(!box.A.empty(), Errc::invalid_argument, "empty box");
    std::vector<double> A;
    for (u64 a : box.A) A.push_back(static_cast<double>(a));
    std::sort(A.rbegin(), A.rend());
    const double A1 = A[0], A2 = A.size() > 1 ? A[1] : 1.0;
    const double ah = std::fabs(static_cast<double>(h));
    RemainderBounds rb;
    rb.rem1 = std::pow(x, 1.5) / std::pow(A1, 1.5);
    rb.rem2 = std::pow(x, 1.5) / (A1 * A2) * (1 + std::pow(A1 * A2, 2 * theta) / std::pow(x, theta)) *
              (1 + std::sqrt(A2 / A1)) * (1 + std::pow(ah, 0.25) * std::sqrt(A1 * A2 / x));
    for (unsigned mask = 1; mask < (1u << A.size()); ++mask) {
        double p = 1;
        for (std::size_t i = 0; i < A.size(); ++i)
            if (mask >> i & 1) p *= A[i];
        rb.rem3.emplace_back(mask, rem3_bound(p, x, h, theta));
    }
    return rb;
}

BoxClass classify_box(const DyadicBox& box, double x, double delta) {
    (void)x;
    BoxClass bc;
    const double P = box.product();
    require(P > 1, Errc::domain, "classify_box: box product must exceed 1");
    std::vector<double> A;
    for (u64 a : box.A) A.push_back(static_cast<double>(a));
    std::sort(A.rbegin(), A.rend());
    const double lp = std::log(P);
    for (double a : A) bc.alpha.push_back(std::log(a) / lp);
    // renormalize so the entries sum to 1 after rounding
    double s = 0;
    for (double a : bc.alpha) s += a;
    for (double& a : bc.alpha) a /= s;
    bc.pc = classify_partition(bc.alpha, delta);
    switch (bc.pc.tag) {
    case CaseTag::A: bc.bound = BoundKind::rem1; break;
    case CaseTag::B: bc.bound = BoundKind::rem2; break;
    case CaseTag::C:
        bc.bound = BoundKind::rem3;
        bc.A = 1;
        for (int i : bc.pc.witness) bc.A *= A[static_cast<std::size_t>(i)];
        break;
    }
    return bc;
}

PartitionGridReport verify_partition_grid(int resolution, int kmax, Q delta) {
    require(resolution >= 1 && resolution <= 240, Errc::invalid_argument, "resolution must be in [1, 240]");
    require(kmax >= 1 && kmax <= 8, Errc::invalid_argument, "kmax must be in [1, 8]");
    PartitionGridReport rep;
    std::vector<int> parts;
    for (int k = 1; k <= kmax; ++k) {
        // partitions of resolution into at most k parts, padded with zeros
        std::function<void(int, int)> rec = [&](int remaining, int maxpart) {
            if (static_cast<int>(parts.size()) == k) {
                if (remaining != 0) return;
                std::vector<Q> alpha;
                for (int p : parts) alpha.emplace_back(p, resolution);
                ++rep.points;
                try {
                    const auto pc = classify_partition(alpha, delta);
                    if (!verify_case(alpha, delta, pc)) ++rep.reverify_failures;
                    if (pc.tag == CaseTag::A) ++rep.count_a;
                    if (pc.tag == CaseTag::B) ++rep.count_b;
                    if (pc.tag == CaseTag::C) ++rep.count_c;
                } catch (const Error& e) {
                    if (e.code() != Errc::lemma_violation) throw;
                    ++rep.violations;
                }
                return;
            }
            for (int p = std::min(remaining, maxpart); p >= 0; --p) {
                parts.push_back(p);
                rec(remaining - p, p);
                parts.pop_back();
            }
        };
        rec(resolution, resolution);
    }
    return rep;
}

} // namespace shiftconv
