#include "shiftconv/arith.hpp"
#include "shiftconv/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <string>

namespace shiftconv {

namespace {

std::atomic<u64> g_sieve_cap{kDefaultSieveCap};

void check_cap(u64 N) {
    if (N > g_sieve_cap.load())
        fail(Errc::capacity, "sieve length " + std::to_string(N) + " exceeds cap " +
                                 std::to_string(g_sieve_cap.load()));
}

u64 pow_mod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    // Brent's variant with batched gcds; deterministic seeds
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

} // namespace

void set_sieve_cap(u64 cap) { g_sieve_cap.store(cap); }
u64 sieve_cap() { return g_sieve_cap.load(); }

u64 checked_add(u64 a, u64 b) {
    u64 r;
    if (__builtin_add_overflow(a, b, &r)) fail(Errc::capacity, "64-bit overflow in addition");
    return r;
}

u64 checked_mul(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) fail(Errc::capacity, "64-bit overflow in multiplication");
    return r;
}

DivisorTable sieve_dk(int k, u64 N) {
    require(k >= 1 && k <= 8, Errc::invalid_argument, "sieve_dk: k must be in [1, 8]");
    check_cap(N);
    DivisorTable t;
    t.k = k;
    t.limit = N;
    t.values.assign(N + 1, 1);
    t.values[0] = 0;
    std::vector<u64> next;
    for (int j = 1; j < k; ++j) {
        // d_{j+1} = d_j * 1
        next.assign(N + 1, 0);
        for (u64 e = 1; e <= N; ++e) {
            const u64 v = t.values[e];
            for (u64 n = e; n <= N; n += e) next[n] = checked_add(next[n], v);
        }
        t.values.swap(next);
    }
    return t;
}

std::vector<std::uint32_t> sieve_d2(u64 N) {
    check_cap(N);
    std::vector<std::uint32_t> d(N + 1, 0);
    for (u64 e = 1; e <= N; ++e)
        for (u64 n = e; n <= N; n += e) ++d[n];
    return d;
}

std::vector<std::uint32_t> spf_sieve(u64 N) {
    check_cap(N);
    std::vector<std::uint32_t> spf(N + 1, 0);
    for (u64 i = 2; i <= N; ++i) {
        if (spf[i]) continue;
        for (u64 j = i; j <= N; j += i)
            if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
    }
    return spf;
}

std::vector<u64> primes_up_to(u64 N) {
    std::vector<u64> ps;
    if (N < 2) return ps;
    std::vector<bool> comp(N + 1, false);
    for (u64 i = 2; i <= N; ++i) {
        if (comp[i]) continue;
        ps.push_back(i);
        for (u64 j = i * i; j <= N; j += i) comp[j] = true;
    }
    return ps;
}

std::vector<int> mobius_sieve(u64 N) {
    check_cap(N);
    std::vector<int> mu(N + 1, 0);
    std::vector<u64> primes;
    std::vector<bool> comp(N + 1, false);
    if (N >= 1) mu[1] = 1;
    for (u64 i = 2; i <= N; ++i) {
        if (!comp[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (u64 p : primes) {
            if (i * p > N) break;
            comp[i * p] = true;
            if (i % p == 0) {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    return mu;
}

std::vector<u64> phi_sieve(u64 N) {
    check_cap(N);
    std::vector<u64> phi(N + 1, 0);
    std::vector<u64> primes;
    if (N >= 1) phi[1] = 1;
    for (u64 i = 2; i <= N; ++i) {
        if (phi[i] == 0) {
            primes.push_back(i);
            phi[i] = i - 1;
        }
        for (u64 p : primes) {
            if (i * p > N) break;
            if (i % p == 0) {
                phi[i * p] = phi[i] * p;
                break;
            }
            phi[i * p] = phi[i] * (p - 1);
        }
    }
    return phi;
}

u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // this base set is deterministic for all n < 2^64
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

FactoredInt factorize(u64 n) {
    require(n >= 1 && n <= (u64{1} << 62), Errc::invalid_argument, "factorize: n must be in [1, 2^62]");
    FactoredInt f;
    f.value = n;
    std::vector<u64> ps;
    for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
        while (n % p == 0) {
            ps.push_back(p);
            n /= p;
        }
    }
    if (n > 1) factor_into(n, ps);
    std::sort(ps.begin(), ps.end());
    for (u64 p : ps) {
        if (!f.factors.empty() && f.factors.back().first == p)
            ++f.factors.back().second;
        else
            f.factors.emplace_back(p, 1);
    }
    return f;
}

bool is_squarefree(u64 n) {
    if (n == 0) return false;
    for (auto [p, e] : factorize(n).factors)
        if (e > 1) return false;
    return true;
}

i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
    i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        i64 q = a / b;
        i64 t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 inv_mod(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 x, y;
    i64 g = ext_gcd(mod(a, m), m, x, y);
    require(g == 1, Errc::domain, "inv_mod: not invertible");
    return mod(x, m);
}

int mobius(u64 n) {
    int s = 1;
    for (auto [p, e] : factorize(n).factors) {
        if (e > 1) return 0;
        s = -s;
    }
    return s;
}

u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, e] : factorize(n).factors) r = r / p * (p - 1);
    return r;
}

u64 dedekind_psi(u64 q) {
    u64 r = q;
    for (auto [p, e] : factorize(q).factors) r = r / p * (p + 1);
    return r;
}

u64 binomial(u64 n, u64 k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u64 r = 1;
    for (u64 i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
    return r;
}

i64 ramanujan_sum(u64 d, i64 h) {
    require(d >= 1, Errc::invalid_argument, "ramanujan_sum: d must be >= 1");
    const u64 ah = static_cast<u64>(h < 0 ? -h : h);
    const u64 g = std::gcd(d, ah); // gcd(d, 0) = d
    const u64 q = d / g;
    const int mu = mobius(q);
    if (mu == 0) return 0;
    return mu * static_cast<i64>(euler_phi(d) / euler_phi(q));
}

u64 gcd_infty(u64 d1, u64 d2) {
    require(d1 >= 1 && d2 >= 1, Errc::invalid_argument, "gcd_infty: arguments must be >= 1");
    u64 r = 1;
    u64 g = std::gcd(d1, d2);
    while (g > 1) {
        r *= g;
        d1 /= g;
        g = std::gcd(d1, g);
    }
    return r;
}

std::vector<u64> divisors(u64 n) {
    std::vector<u64> ds{1};
    for (auto [p, e] : factorize(n).factors) {
        const std::size_t m = ds.size();
        u64 pp = 1;
        for (int i = 1; i <= e; ++i) {
            pp *= p;
            for (std::size_t j = 0; j < m; ++j) ds.push_back(ds[j] * pp);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

} // namespace shiftconv
