#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace shiftconv {

using i64 = std::int64_t;
using u64 = std::uint64_t;

struct FactoredInt {
    u64 value = 1;
    std::vector<std::pair<u64, int>> factors; // (prime, exponent), primes increasing
};

// d_k(n) for 1 <= n <= limit; values[0] is unused and zero.
struct DivisorTable {
    int k = 1;
    u64 limit = 0;
    std::vector<u64> values;

    u64 operator[](u64 n) const { return values[n]; }
};

// Default ceiling on sieve length; raise with set_sieve_cap.
inline constexpr u64 kDefaultSieveCap = 100'000'000;
void set_sieve_cap(u64 cap);
u64 sieve_cap();

DivisorTable sieve_dk(int k, u64 N);
// d(n) = d_2(n) as 32-bit counts, cheaper for large tables.
std::vector<std::uint32_t> sieve_d2(u64 N);
std::vector<int> mobius_sieve(u64 N);
std::vector<u64> phi_sieve(u64 N);
// Smallest prime factor for 2 <= n <= N.
std::vector<std::uint32_t> spf_sieve(u64 N);
std::vector<u64> primes_up_to(u64 N);

FactoredInt factorize(u64 n);
bool is_prime(u64 n);
bool is_squarefree(u64 n);

i64 gcd(i64 a, i64 b);
// x*a + y*b = g with g = gcd(a, b) >= 0
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);
i64 mod(i64 a, i64 m);
// Inverse of a modulo m, requires gcd(a, m) = 1.
i64 inv_mod(i64 a, i64 m);
u64 mul_mod(u64 a, u64 b, u64 m);

int mobius(u64 n);
u64 euler_phi(u64 n);
// psi(q) = q * prod_{p|q} (1 + 1/p)
u64 dedekind_psi(u64 q);
u64 binomial(u64 n, u64 k);

// c_d(h), the Ramanujan sum, from the closed form.
i64 ramanujan_sum(u64 d, i64 h);

// Largest divisor of d1 whose primes all divide d2.
u64 gcd_infty(u64 d1, u64 d2);

std::vector<u64> divisors(u64 n);

// Checked 64-bit arithmetic; throws capacity on overflow.
u64 checked_add(u64 a, u64 b);
u64 checked_mul(u64 a, u64 b);

} // namespace shiftconv
