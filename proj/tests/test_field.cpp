#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quartic/field.hpp"
#include "quartic/poly.hpp"

using namespace quartic;

TEST_CASE("tower construction guards") {
    CHECK_THROWS_AS((void)FieldTower::build(2), Error);
    CHECK_THROWS_AS((void)FieldTower::build(127), Error);
    CHECK_THROWS_AS((void)FieldTower::build(128), Error);
    try {
        (void)FieldTower::build(2);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PrimeTooSmall);
    }
    try {
        (void)FieldTower::build(129);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotPrime);
    }
}

TEST_CASE("level-2 defining polynomial has no root in F_131 (exhaustive)") {
    FieldTower t = FieldTower::build(131);
    const auto& m = t.modulus(2);
    REQUIRE(m.size() == 3);
    for (u64 x = 0; x < 131; ++x) {
        u64 v = (m[0] + m[1] * x % 131 * 1 + x * x % 131 * m[2]) % 131;
        u64 w = (m[0] + mulmod(m[1], x, 131) + mulmod(mulmod(x, x, 131), m[2], 131)) % 131;
        CHECK(w != 0);
        (void)v;
    }
}

TEST_CASE("field axioms on random samples at every level") {
    FieldTower t = FieldTower::build(131);
    Rng rng(7);
    for (int lvl : kTowerLevels) {
        for (int i = 0; i < 200; ++i) {
            FieldElement a = t.random(lvl, rng);
            FieldElement b = t.random(lvl, rng);
            FieldElement c = t.random(lvl, rng);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK((a + b) + c == a + (b + c));
            if (!a.is_zero()) CHECK(a * a.inverse() == t.one(lvl));
        }
    }
}

TEST_CASE("embedding composition commutes") {
    FieldTower t = FieldTower::build(131);
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        FieldElement x = t.random(1, rng);
        CHECK(t.embed(t.embed(x, 3), 6) == t.embed(x, 6));
        CHECK(t.embed(t.embed(x, 2), 6) == t.embed(x, 6));
    }
    for (int i = 0; i < 200; ++i) {
        FieldElement x2 = t.random(2, rng);
        CHECK(t.embed(t.embed(x2, 6), 12) == t.embed(x2, 12));
        FieldElement x3 = t.random(3, rng);
        CHECK(t.embed(t.embed(x3, 6), 12) == t.embed(x3, 12));
    }
}

TEST_CASE("embeddings are ring maps fixing F_p") {
    FieldTower t = FieldTower::build(157);
    Rng rng(9);
    for (int to : {2, 3, 6, 12}) {
        for (int i = 0; i < 100; ++i) {
            FieldElement a = t.random(1, rng);
            FieldElement b = t.random(1, rng);
            CHECK(t.embed(a * b, to) == t.embed(a, to) * t.embed(b, to));
            CHECK(t.embed(a + b, to) == t.embed(a, to) + t.embed(b, to));
        }
        CHECK(t.embed(t.from_int(42), to) == t.from_int(42, to));
    }
}

TEST_CASE("frobenius applied k times is the identity; fixes the prime field") {
    FieldTower t = FieldTower::build(131);
    Rng rng(10);
    for (int lvl : kTowerLevels) {
        for (int i = 0; i < 50; ++i) {
            FieldElement x = t.random(lvl, rng);
            FieldElement y = x;
            for (int j = 0; j < lvl; ++j) y = t.frobenius(y, 1);
            CHECK(y == x);
            CHECK(t.frobenius(x, lvl) == x);
        }
        CHECK(t.frobenius(t.from_int(99, lvl), 1) == t.from_int(99, lvl));
    }
}

TEST_CASE("frobenius is the p-power map") {
    FieldTower t = FieldTower::build(131);
    Rng rng(11);
    for (int lvl : {2, 3, 6}) {
        for (int i = 0; i < 20; ++i) {
            FieldElement x = t.random(lvl, rng);
            CHECK(t.frobenius(x, 1) == t.pow(x, BigInt(131)));
        }
    }
}

TEST_CASE("compress inverts embed; canonical levels") {
    FieldTower t = FieldTower::build(131);
    Rng rng(12);
    for (int from : {1, 2, 3, 6}) {
        for (int to : {2, 3, 6, 12}) {
            if (to % from != 0 || to == from) continue;
            for (int i = 0; i < 50; ++i) {
                FieldElement x = t.random(from, rng);
                auto back = t.compress(t.embed(x, to), from);
                REQUIRE(back.has_value());
                CHECK(*back == x);
            }
        }
    }
    // degree computation: generator of level 2 has degree 2
    CHECK(t.degree(t.gen(2)) == 2);
    CHECK(t.degree(t.from_int(5, 12)) == 1);
    CHECK(t.canonical(t.embed(t.from_int(7, 1), 12)).level() == 1);
}

TEST_CASE("embedding preserves minimal polynomials") {
    FieldTower t = FieldTower::build(131);
    Rng rng(13);
    auto minpoly = [&](const FieldElement& x) {
        int d = t.degree(x);
        int lvl = x.level();
        UniPoly m = UniPoly::from_ints(t, lvl, {1});
        FieldElement c = x;
        for (int i = 0; i < d; ++i) {
            m = m * UniPoly(t, lvl, {-c, t.one(lvl)});
            c = t.frobenius(c, 1);
        }
        // coefficients are F_p rational
        std::vector<FieldElement> out;
        for (int i = 0; i <= m.degree(); ++i) {
            auto cc = t.compress(m.coeff(i), 1);
            REQUIRE(cc.has_value());
            out.push_back(*cc);
        }
        return UniPoly(t, 1, out);
    };
    for (int i = 0; i < 25; ++i) {
        FieldElement x = t.random(3, rng);
        CHECK(minpoly(x) == minpoly(t.embed(x, 6)));
        FieldElement y = t.random(2, rng);
        CHECK(minpoly(y) == minpoly(t.embed(y, 12)));
    }
}

TEST_CASE("deterministic tower: rebuilt towers agree") {
    FieldTower a = FieldTower::build(1009);
    FieldTower b = FieldTower::build(1009);
    for (int lvl : kTowerLevels) CHECK(a.modulus(lvl) == b.modulus(lvl));
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        FieldElement x = a.random(6, rng);
        FieldElement y = b.make(6, std::vector<u64>(x.coeffs().begin(), x.coeffs().begin() + 6));
        CHECK(a.embed(x, 12).coeffs() == b.embed(y, 12).coeffs());
    }
}
