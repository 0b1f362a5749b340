#include "quartic/numeric.hpp"

#include <algorithm>

namespace quartic {

u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 invmod(u64 a, u64 p) {
    // extended Euclid; p prime, a nonzero mod p
    int64_t t = 0, nt = 1;
    u64 r = p, nr = a % p;
    while (nr != 0) {
        u64 q = r / nr;
        int64_t tmp = t - (int64_t)q * nt;
        t = nt; nt = tmp;
        u64 tr = r - q * nr;
        r = nr; nr = tr;
    }
    return t < 0 ? (u64)(t + (int64_t)p) : (u64)t;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a % n, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

u64 next_prime_above(u64 n) {
    u64 c = n + 1;
    if (c <= 2) return 2;
    if ((c & 1) == 0) ++c;
    while (!is_prime_u64(c)) c += 2;
    return c;
}

BigInt isqrt(const BigInt& n) {
    if (n <= 0) return 0;
    BigInt x = BigInt(1) << (unsigned)((msb(n) / 2) + 1);
    for (;;) {
        BigInt y = (x + n / x) >> 1;
        if (y >= x) break;
        x = y;
    }
    return x;
}

BigInt iroot4(const BigInt& n) { return isqrt(isqrt(n)); }

int cmp_int_vs_sqrt(const BigInt& x, const BigInt& y, const BigInt& p) {
    if (y == 0) return x == 0 ? 0 : (x > 0 ? 1 : -1);
    if (y < 0) {
        if (x >= 0) return 1;
        // both negative: x > y*sqrt(p) iff x^2 < y^2 p
        BigInt l = x * x, r = y * y * p;
        return l < r ? 1 : (l > r ? -1 : 0);
    }
    if (x <= 0) return -1;
    BigInt l = x * x, r = y * y * p;
    return l > r ? 1 : (l < r ? -1 : 0);
}

BigInt mod_floor(const BigInt& x, const BigInt& m) {
    BigInt r = x % m;
    if (r < 0) r += m;
    return r;
}

bool miller_rabin(const BigInt& n) {
    if (n < 2) return false;
    for (int q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % q == 0) return n == q;
    }
    BigInt d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    auto mr = [&](BigInt a) {
        a %= n;
        if (a == 0) return true;
        BigInt x = powm(a, d, n);
        if (x == 1 || x == n - 1) return true;
        for (int i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == n - 1) return true;
        }
        return false;
    };
    // deterministic below 3.3e24; fixed extra bases above (probabilistic, but
    // factorize() verifies products so a false prime only costs a retry)
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 1662803}) {
        if (!mr(a)) return false;
    }
    return true;
}

namespace {

BigInt pollard_brent(const BigInt& n, u64 seed) {
    // Brent's cycle variant of Pollard rho
    Rng rng(seed);
    for (;;) {
        BigInt y = mod_floor(BigInt(rng.u64()), n - 1) + 1;
        BigInt c = mod_floor(BigInt(rng.u64()), n - 1) + 1;
        BigInt m = 128, g = 1, r = 1, q = 1, x, ys;
        while (g == 1) {
            x = y;
            for (BigInt i = 0; i < r; ++i) y = (y * y + c) % n;
            BigInt k = 0;
            while (k < r && g == 1) {
                ys = y;
                BigInt lim = std::min(m, r - k);
                for (BigInt i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (ys * ys + c) % n;
                g = gcd(abs(x - ys), n);
            }
        }
        if (g != n) return g;
    }
}

void factor_rec(BigInt n, std::map<BigInt, int>& out, u64 seed) {
    if (n == 1) return;
    if (miller_rabin(n)) { out[n] += 1; return; }
    BigInt d = pollard_brent(n, seed);
    factor_rec(d, out, seed + 1);
    factor_rec(n / d, out, seed + 1);
}

} // namespace

std::map<BigInt, int> factorize(BigInt n) {
    std::map<BigInt, int> out;
    if (n < 0) n = -n;
    if (n <= 1) return out;
    for (u64 q = 2; q < 20000 && BigInt(q) * q <= n; q = (q == 2 ? 3 : q + 2)) {
        while (n % q == 0) { out[BigInt(q)] += 1; n /= q; }
    }
    factor_rec(n, out, 0x5eedf00d);
    return out;
}

} // namespace quartic
