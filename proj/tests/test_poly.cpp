#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "quartic/field.hpp"
#include "quartic/poly.hpp"

using namespace quartic;

namespace {

// independent oracle: exhaustive root scan with multiplicity by division
std::map<u64, int> scan_roots_fp(const UniPoly& f, const FieldTower& t) {
    std::map<u64, int> out;
    u64 p = t.p();
    for (u64 x = 0; x < p; ++x) {
        FieldElement xe = t.from_int(x, 1);
        if (!f.eval(xe).is_zero()) continue;
        // multiplicity by repeated division
        UniPoly g = f;
        int m = 0;
        UniPoly lin(t, 1, {-xe, t.one(1)});
        for (;;) {
            auto [q, r] = poly_divmod(g, lin);
            if (!r.is_zero()) break;
            ++m;
            g = q;
        }
        out[x] = m;
    }
    return out;
}

} // namespace

TEST_CASE("roots of X^2 - 1 over F_131") {
    FieldTower t = FieldTower::build(131);
    UniPoly f = UniPoly::from_ints(t, 1, {-1, 0, 1});
    Rng rng(1);
    auto roots = find_roots(f, 1, rng);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == t.from_int(1));
    CHECK(roots[1] == t.from_int(130));
}

TEST_CASE("roots of X^2 + 1 over F_13 (exhaustive-scan oracle)") {
    FieldTower t = FieldTower::build_allow_small(13);
    UniPoly f = UniPoly::from_ints(t, 1, {1, 0, 1});
    // oracle first: scan all of F_13
    auto oracle = scan_roots_fp(f, t);
    REQUIRE(oracle.size() == 2);
    CHECK(oracle.count(5) == 1);
    CHECK(oracle.count(8) == 1);
    CHECK(mulmod(5, 5, 13) == 12);
    CHECK(mulmod(8, 8, 13) == 12);
    Rng rng(2);
    auto roots = find_roots(f, 1, rng);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == t.from_int(5));
    CHECK(roots[1] == t.from_int(8));
}

TEST_CASE("random small-degree polynomials match the exhaustive scan") {
    // >= 1e4 instances of degree <= 4 over F_p, p <= 257
    std::vector<u64> primes = {131, 151, 193, 257};
    int total = 0;
    for (u64 p : primes) {
        FieldTower t = FieldTower::build(p);
        Rng rng(1000 + p);
        for (int it = 0; it < 2600; ++it) {
            int deg = 1 + (int)rng.below(4);
            std::vector<FieldElement> c;
            for (int i = 0; i <= deg; ++i) c.push_back(t.random(1, rng));
            UniPoly f(t, 1, c);
            if (f.degree() < 1) continue;
            auto oracle = scan_roots_fp(f, t);
            Rng r2(it);
            auto roots = find_roots(f, 1, r2);
            std::map<u64, int> got;
            for (const auto& r : roots) got[r.coeff(0)] += 1;
            CHECK(got == oracle);
            ++total;
        }
    }
    CHECK(total >= 10000);
}

TEST_CASE("roots with multiplicity") {
    FieldTower t = FieldTower::build(131);
    // (X - 3)^2 (X - 5)
    UniPoly f = UniPoly::from_ints(t, 1, {-3, 1}) * UniPoly::from_ints(t, 1, {-3, 1}) *
                UniPoly::from_ints(t, 1, {-5, 1});
    Rng rng(3);
    auto roots = find_roots(f, 1, rng);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == t.from_int(3));
    CHECK(roots[1] == t.from_int(3));
    CHECK(roots[2] == t.from_int(5));
}

TEST_CASE("roots in extension levels match scan") {
    FieldTower t = FieldTower::build(131);
    Rng rng(4);
    for (int it = 0; it < 10; ++it) {
        std::vector<FieldElement> c;
        for (int i = 0; i <= 4; ++i) c.push_back(t.random(1, rng));
        UniPoly f(t, 1, c);
        if (f.degree() != 4) continue;
        Rng r2(it);
        auto roots = find_roots(f, 2, r2);
        // scan F_{p^2}
        int found = 0;
        for (u64 a = 0; a < 131; ++a)
            for (u64 b = 0; b < 131; ++b) {
                FieldElement x = t.make(2, {a, b});
                if (f.eval(x).is_zero()) ++found;
            }
        std::map<std::string, int> uniq;
        for (const auto& r : roots) {
            std::string s;
            r.append_bytes(s);
            uniq[s] += 1;
        }
        int distinct = (int)uniq.size();
        CHECK(distinct == found);
        for (const auto& r : roots) CHECK(f.eval(t.embed(r, 2)).is_zero());
    }
}

TEST_CASE("gcd and resultant basics") {
    FieldTower t = FieldTower::build(131);
    Rng rng(5);
    for (int it = 0; it < 100; ++it) {
        std::vector<FieldElement> c;
        for (int i = 0; i <= 3; ++i) c.push_back(t.random(1, rng));
        UniPoly f(t, 1, c);
        if (f.degree() < 1) continue;
        CHECK(poly_gcd(f, f) == f.monic());
        // resultant(X - a, X - b) = a - b
        FieldElement a = t.random(1, rng), b = t.random(1, rng);
        UniPoly la = UniPoly(t, 1, {-a, t.one(1)});
        UniPoly lb = UniPoly(t, 1, {-b, t.one(1)});
        CHECK(resultant(la, lb) == a - b);
        // resultant vanishes iff nontrivial gcd
        UniPoly g(t, 1, {t.random(1, rng), t.one(1)});
        UniPoly h1 = f * g;
        UniPoly h2 = UniPoly(t, 1, {t.random(1, rng), t.one(1)}) * g;
        CHECK(resultant(h1, h2).is_zero());
        CHECK(poly_gcd(h1, h2).degree() >= 1);
    }
}

TEST_CASE("irreducibility agrees with factoring") {
    FieldTower t = FieldTower::build(131);
    Rng rng(6);
    int checked = 0;
    for (int it = 0; it < 60; ++it) {
        std::vector<FieldElement> c;
        int deg = 2 + (int)rng.below(4);
        for (int i = 0; i < deg; ++i) c.push_back(t.random(1, rng));
        c.push_back(t.one(1));
        UniPoly f(t, 1, c);
        Rng r2(it);
        auto fs = factor(f, r2);
        bool irr = fs.size() == 1 && fs[0].second == 1 && fs[0].first.degree() == f.degree();
        CHECK(is_irreducible(f) == irr);
        // factors multiply back
        UniPoly prod = UniPoly::from_ints(t, 1, {1});
        for (auto& [q, m] : fs)
            for (int i = 0; i < m; ++i) prod = prod * q;
        CHECK(prod == f.monic());
        for (auto& [q, m] : fs) CHECK(is_irreducible(q));
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("factorization over an extension level") {
    FieldTower t = FieldTower::build(151);
    Rng rng(7);
    for (int it = 0; it < 12; ++it) {
        std::vector<FieldElement> c;
        for (int i = 0; i <= 5; ++i) c.push_back(t.random(2, rng));
        UniPoly f(t, 2, c);
        if (f.degree() < 2) continue;
        Rng r2(it);
        auto fs = factor(f, r2);
        UniPoly prod = UniPoly::from_ints(t, 2, {1});
        for (auto& [q, m] : fs)
            for (int i = 0; i < m; ++i) prod = prod * q;
        CHECK(prod == f.monic());
    }
}

TEST_CASE("lagrange interpolation") {
    FieldTower t = FieldTower::build(131);
    Rng rng(8);
    std::vector<FieldElement> xs, ys;
    for (int i = 0; i < 4; ++i) {
        xs.push_back(t.from_int(i + 2, 2));
        ys.push_back(t.random(2, rng));
    }
    UniPoly v = lagrange(t, 2, xs, ys);
    for (int i = 0; i < 4; ++i) CHECK(v.eval(xs[i]) == ys[i]);
}
