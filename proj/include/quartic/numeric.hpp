#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "quartic/rng.hpp"

namespace quartic {

using BigInt = boost::multiprecision::cpp_int;
using u64 = uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 p) { return (u64)((u128)a * b % p); }
inline u64 addmod(u64 a, u64 b, u64 p) { u64 s = a + b; if (s >= p || s < a) s -= p; return s; }
inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

u64 powmod(u64 a, u64 e, u64 p);
u64 invmod(u64 a, u64 p); // a != 0 mod p, p prime

bool is_prime_u64(u64 n); // deterministic Miller-Rabin
u64 next_prime_above(u64 n);

// floor of the integer square root, n >= 0
BigInt isqrt(const BigInt& n);
// floor of n^(1/4), n >= 0
BigInt iroot4(const BigInt& n);

// sign of (x - y*sqrt(p)) for integers x, y and non-square p.  Exact; never 0
// unless x == y == 0.
int cmp_int_vs_sqrt(const BigInt& x, const BigInt& y, const BigInt& p);

// x mod m normalized into [0, m)
BigInt mod_floor(const BigInt& x, const BigInt& m);

// prime factorization (trial division + Pollard-Brent rho), deterministic
std::map<BigInt, int> factorize(BigInt n);

bool miller_rabin(const BigInt& n);

} // namespace quartic
