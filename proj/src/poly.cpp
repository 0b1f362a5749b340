#include "quartic/poly.hpp"

#include <algorithm>

namespace quartic {

UniPoly::UniPoly(const FieldTower& t, int level, std::vector<FieldElement> coeffs)
    : tower_(&t), level_(level), c_(std::move(coeffs)) {
    for (auto& x : c_)
        if (x.level() != level) x = t.embed(x, level);
    trim();
}

UniPoly UniPoly::from_ints(const FieldTower& t, int level, const std::vector<int64_t>& c) {
    std::vector<FieldElement> v;
    v.reserve(c.size());
    for (int64_t x : c) v.push_back(t.from_int_signed(x, level));
    return UniPoly(t, level, std::move(v));
}

void UniPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

FieldElement UniPoly::coeff(int i) const {
    if (i < 0 || i >= (int)c_.size()) return tower_->zero(level_);
    return c_[i];
}

FieldElement UniPoly::lead() const {
    if (c_.empty()) fail(Errc::ZeroPolynomial, "lead of zero polynomial");
    return c_.back();
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
    int lvl = common_level(level_, o.level_);
    std::vector<FieldElement> r(std::max(c_.size(), o.c_.size()), tower_->zero(lvl));
    for (size_t i = 0; i < r.size(); ++i) {
        FieldElement v = tower_->zero(lvl);
        if (i < c_.size()) v += c_[i];
        if (i < o.c_.size()) v += o.c_[i];
        r[i] = v;
    }
    return UniPoly(*tower_, lvl, std::move(r));
}

UniPoly UniPoly::operator-(const UniPoly& o) const {
    int lvl = common_level(level_, o.level_);
    std::vector<FieldElement> r(std::max(c_.size(), o.c_.size()), tower_->zero(lvl));
    for (size_t i = 0; i < r.size(); ++i) {
        FieldElement v = tower_->zero(lvl);
        if (i < c_.size()) v += c_[i];
        if (i < o.c_.size()) v -= o.c_[i];
        r[i] = v;
    }
    return UniPoly(*tower_, lvl, std::move(r));
}

UniPoly UniPoly::operator*(const UniPoly& o) const {
    int lvl = common_level(level_, o.level_);
    if (is_zero() || o.is_zero()) return UniPoly(*tower_, lvl);
    std::vector<FieldElement> r(c_.size() + o.c_.size() - 1, tower_->zero(lvl));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j].is_zero()) continue;
            r[i + j] += c_[i] * o.c_[j];
        }
    }
    return UniPoly(*tower_, lvl, std::move(r));
}

UniPoly UniPoly::operator*(const FieldElement& s) const {
    std::vector<FieldElement> r = c_;
    for (auto& x : r) x = x * s;
    return UniPoly(*tower_, common_level(level_, s.level()), std::move(r));
}

bool UniPoly::operator==(const UniPoly& o) const {
    if (c_.size() != o.c_.size()) return false;
    for (size_t i = 0; i < c_.size(); ++i)
        if (!(c_[i] == o.c_[i])) return false;
    return true;
}

UniPoly UniPoly::promoted(int level) const {
    std::vector<FieldElement> r = c_;
    for (auto& x : r) x = tower_->embed(x, level);
    return UniPoly(*tower_, level, std::move(r));
}

UniPoly UniPoly::monic() const {
    if (is_zero()) fail(Errc::ZeroPolynomial, "monic of zero polynomial");
    FieldElement li = lead().inverse();
    return *this * li;
}

UniPoly UniPoly::derivative() const {
    if (c_.size() <= 1) return UniPoly(*tower_, level_);
    std::vector<FieldElement> r(c_.size() - 1, tower_->zero(level_));
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * tower_->from_int(i, level_);
    return UniPoly(*tower_, level_, std::move(r));
}

FieldElement UniPoly::eval(const FieldElement& x) const {
    int lvl = common_level(level_, x.level());
    FieldElement acc = tower_->zero(lvl);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

std::string UniPoly::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) s += " + ";
        s += c_[i].to_string() + "*X^" + std::to_string(i);
    }
    return s;
}

std::pair<UniPoly, UniPoly> poly_divmod(const UniPoly& f, const UniPoly& g) {
    if (g.is_zero()) fail(Errc::ZeroPolynomial, "division by zero polynomial");
    int lvl = common_level(f.level(), g.level());
    const FieldTower& t = f.tower();
    UniPoly r = f.promoted(lvl);
    UniPoly gg = g.promoted(lvl);
    if (r.degree() < gg.degree()) return {UniPoly(t, lvl), r};
    FieldElement li = gg.lead().inverse();
    std::vector<FieldElement> q(r.degree() - gg.degree() + 1, t.zero(lvl));
    std::vector<FieldElement> rc = r.coeffs();
    int dg = gg.degree();
    for (int d = (int)rc.size() - 1; d >= dg; --d) {
        if (rc[d].is_zero()) continue;
        FieldElement c = rc[d] * li;
        q[d - dg] = c;
        for (int i = 0; i <= dg; ++i) rc[d - dg + i] -= c * gg.coeff(i);
    }
    return {UniPoly(t, lvl, std::move(q)), UniPoly(t, lvl, std::move(rc))};
}

UniPoly poly_mod(const UniPoly& f, const UniPoly& g) { return poly_divmod(f, g).second; }

UniPoly poly_gcd(const UniPoly& f, const UniPoly& g) {
    UniPoly a = f, b = g;
    if (a.level() != b.level()) {
        int lvl = common_level(a.level(), b.level());
        a = a.promoted(lvl);
        b = b.promoted(lvl);
    }
    while (!b.is_zero()) {
        UniPoly r = poly_mod(a, b);
        a = b;
        b = r;
    }
    if (a.is_zero()) return a;
    return a.monic();
}

FieldElement resultant(const UniPoly& f, const UniPoly& g) {
    int lvl = common_level(f.level(), g.level());
    const FieldTower& t = f.tower();
    UniPoly a = f.promoted(lvl), b = g.promoted(lvl);
    if (a.is_zero() || b.is_zero()) fail(Errc::ZeroPolynomial, "resultant of zero polynomial");
    FieldElement res = t.one(lvl);
    while (b.degree() > 0) {
        UniPoly r = poly_mod(a, b);
        if (r.is_zero()) return t.zero(lvl);
        if ((a.degree() & 1) && (b.degree() & 1)) res = -res;
        res = res * t.pow_u64(b.lead(), (u64)(a.degree() - r.degree()));
        a = b;
        b = r;
    }
    // b is a nonzero constant
    res = res * t.pow_u64(b.coeff(0), (u64)a.degree());
    return res;
}

UniPoly poly_powmod(const UniPoly& f, const BigInt& e, const UniPoly& m) {
    const FieldTower& t = f.tower();
    int lvl = common_level(f.level(), m.level());
    UniPoly r = UniPoly::from_ints(t, lvl, {1});
    UniPoly b = poly_mod(f.promoted(lvl), m);
    BigInt k = e;
    while (k != 0) {
        if ((k & 1) != 0) r = poly_mod(r * b, m);
        k >>= 1;
        if (k != 0) b = poly_mod(b * b, m);
    }
    return r;
}

UniPoly poly_compose_mod(const UniPoly& f, const UniPoly& g, const UniPoly& m) {
    const FieldTower& t = f.tower();
    int lvl = common_level(common_level(f.level(), g.level()), m.level());
    UniPoly acc(t, lvl);
    UniPoly gg = poly_mod(g.promoted(lvl), m);
    for (int i = f.degree(); i >= 0; --i) {
        acc = poly_mod(acc * gg, m);
        acc = acc + UniPoly(t, lvl, {f.coeff(i)});
    }
    return acc;
}

UniPoly xq_powmod(const UniPoly& m, int level, int j) {
    // X^{p^j} mod m; m at `level`, coefficients fixed by frob^level when
    // level | j, which is the case used by the factorization routines
    const FieldTower& t = m.tower();
    UniPoly x = UniPoly::from_ints(t, level, {0, 1});
    UniPoly phi = poly_powmod(x, BigInt(t.p()), m);
    UniPoly cur = phi;
    for (int s = 1; s < j; ++s) {
        // cur = twist(cur) o phi, twist = coefficientwise Frobenius
        std::vector<FieldElement> tw = cur.coeffs();
        for (auto& c : tw) c = t.frobenius(c, 1);
        cur = poly_compose_mod(UniPoly(t, level, std::move(tw)), phi, m);
    }
    return cur;
}

bool is_irreducible(const UniPoly& f) {
    if (f.is_zero()) fail(Errc::ZeroPolynomial, "irreducibility of zero polynomial");
    int k = f.degree();
    if (k == 0) return false;
    if (k == 1) return true;
    const FieldTower& t = f.tower();
    int lvl = f.level();
    UniPoly m = f.monic();
    UniPoly x = UniPoly::from_ints(t, lvl, {0, 1});
    // X^{q^j} mod m by repeated composition with X^q (coefficients live in
    // F_{p^lvl}, fixed by frob^lvl, so no twist is needed)
    UniPoly xq = xq_powmod(m, lvl, lvl);
    std::vector<UniPoly> pw(k + 1);
    pw[1] = xq;
    for (int j = 2; j <= k; ++j) pw[j] = poly_compose_mod(pw[j - 1], xq, m);
    if (!(poly_mod(pw[k] - x, m).is_zero())) return false;
    for (int l = 2; l <= k; ++l) {
        if (k % l) continue;
        bool prime = true;
        for (int d = 2; d * d <= l; ++d)
            if (l % d == 0) { prime = false; break; }
        if (!prime) continue;
        UniPoly g = poly_gcd(m, pw[k / l] - x);
        if (g.degree() != 0) return false;
    }
    return true;
}

namespace {

// char-p squarefree decomposition: list of (squarefree poly, multiplicity)
void squarefree_rec(const UniPoly& f, int mult, std::vector<std::pair<UniPoly, int>>& out) {
    const FieldTower& t = f.tower();
    u64 p = t.p();
    UniPoly d = f.derivative();
    if (d.is_zero()) {
        // f = h(X^p); take p-th roots of coefficients
        std::vector<FieldElement> h;
        for (int i = 0; i <= f.degree(); i += (int)p)
            h.push_back(t.frobenius(f.coeff(i), f.level() - 1)); // a^{p^{k-1}} = a^{1/p}
        squarefree_rec(UniPoly(t, f.level(), std::move(h)), mult * (int)p, out);
        return;
    }
    UniPoly g = poly_gcd(f, d);
    UniPoly w = poly_divmod(f, g).first; // product of squarefree factors of mult not div by p
    int i = 1;
    UniPoly cur = w, rest = g;
    while (cur.degree() > 0) {
        UniPoly y = poly_gcd(cur, rest);
        UniPoly piece = poly_divmod(cur, y).first;
        if (piece.degree() > 0) out.push_back({piece.monic(), mult * i});
        rest = poly_divmod(rest, y).first;
        cur = y;
        ++i;
    }
    if (rest.degree() > 0) squarefree_rec(rest, mult, out);
}

// equal-degree splitting of a product of degree-d irreducibles
void edf(const UniPoly& f, int d, Rng& rng, std::vector<UniPoly>& out) {
    if (f.degree() == d) {
        out.push_back(f.monic());
        return;
    }
    const FieldTower& t = f.tower();
    int lvl = f.level();
    BigInt q = boost::multiprecision::pow(BigInt(t.p()), (unsigned)lvl);
    BigInt e = (boost::multiprecision::pow(q, (unsigned)d) - 1) / 2;
    for (;;) {
        std::vector<FieldElement> rc(f.degree(), t.zero(lvl));
        for (auto& c : rc) c = t.random(lvl, rng);
        UniPoly h(t, lvl, std::move(rc));
        if (h.degree() < 1) continue;
        UniPoly w = poly_powmod(h, e, f) - UniPoly::from_ints(t, lvl, {1});
        UniPoly g = poly_gcd(f, w);
        if (g.degree() > 0 && g.degree() < f.degree()) {
            edf(g, d, rng, out);
            edf(poly_divmod(f, g).first, d, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<std::pair<UniPoly, int>> factor(const UniPoly& f, Rng& rng) {
    if (f.is_zero()) fail(Errc::ZeroPolynomial, "factor of zero polynomial");
    std::vector<std::pair<UniPoly, int>> sqf;
    if (f.degree() > 0) squarefree_rec(f.monic(), 1, sqf);
    std::vector<std::pair<UniPoly, int>> out;
    const FieldTower& t = f.tower();
    int lvl = f.level();
    UniPoly x = UniPoly::from_ints(t, lvl, {0, 1});
    for (auto& [s, mult] : sqf) {
        // distinct-degree on s, then equal-degree per block
        UniPoly rem = s;
        UniPoly xq;
        UniPoly cur;
        for (int d = 1; rem.degree() > 0 && d <= rem.degree(); ++d) {
            if (2 * d > rem.degree()) break; // remainder is irreducible
            if (d == 1) {
                xq = xq_powmod(rem, lvl, lvl);
                cur = xq;
            } else {
                // recompute X^q mod rem when rem shrank, then advance
                xq = xq_powmod(rem, lvl, lvl);
                cur = xq;
                for (int j = 1; j < d; ++j) cur = poly_compose_mod(cur, xq, rem);
            }
            UniPoly g = poly_gcd(rem, cur - x);
            if (g.degree() > 0) {
                std::vector<UniPoly> pieces;
                edf(g, d, rng, pieces);
                for (auto& pc : pieces) out.push_back({pc, mult});
                rem = poly_divmod(rem, g).first;
            }
        }
        if (rem.degree() > 0) out.push_back({rem.monic(), mult});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
        for (int i = 0; i <= a.first.degree(); ++i) {
            int c = cmp(a.first.coeff(i), b.first.coeff(i));
            if (c) return c < 0;
        }
        return a.second < b.second;
    });
    return out;
}

std::vector<FieldElement> find_roots(const UniPoly& f, int level, Rng& rng) {
    if (f.is_zero()) fail(Errc::ZeroPolynomial, "roots of zero polynomial");
    const FieldTower& t = f.tower();
    UniPoly g = f.promoted(common_level(f.level(), level));
    int lvl = g.level();
    std::vector<FieldElement> roots;
    if (g.degree() < 1) return roots;
    // separate multiplicities first
    std::vector<std::pair<UniPoly, int>> sqf;
    squarefree_rec(g.monic(), 1, sqf);
    for (auto& [s, mult] : sqf) {
        // product of the linear factors over F_{p^level}
        UniPoly xq = xq_powmod(s, lvl, level);
        UniPoly lin = poly_gcd(s, xq - UniPoly::from_ints(t, lvl, {0, 1}));
        if (lin.degree() < 1) continue;
        // split lin completely by random gcds
        std::vector<UniPoly> stack{lin};
        BigInt e = (boost::multiprecision::pow(BigInt(t.p()), (unsigned)level) - 1) / 2;
        while (!stack.empty()) {
            UniPoly u = stack.back();
            stack.pop_back();
            if (u.degree() == 1) {
                FieldElement r = -(u.monic().coeff(0));
                auto cr = t.compress(r, level);
                FieldElement rr = cr ? *cr : r;
                for (int i = 0; i < mult; ++i) roots.push_back(rr);
                continue;
            }
            // shifted power probe
            FieldElement a = t.random(level, rng);
            UniPoly h = UniPoly(t, lvl, {t.embed(a, lvl), t.one(lvl)});
            UniPoly w = poly_powmod(h, e, u) - UniPoly::from_ints(t, lvl, {1});
            UniPoly d = poly_gcd(u, w);
            if (d.degree() > 0 && d.degree() < u.degree()) {
                stack.push_back(d);
                stack.push_back(poly_divmod(u, d).first);
            } else {
                stack.push_back(u);
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](const FieldElement& a, const FieldElement& b) {
        return cmp(a, b) < 0;
    });
    return roots;
}

UniPoly lagrange(const FieldTower& t, int level, const std::vector<FieldElement>& xs,
                 const std::vector<FieldElement>& ys) {
    UniPoly acc(t, level);
    for (size_t i = 0; i < xs.size(); ++i) {
        UniPoly term = UniPoly(t, level, {ys[i]});
        for (size_t j = 0; j < xs.size(); ++j) {
            if (i == j) continue;
            FieldElement den = (xs[i] - xs[j]).inverse();
            UniPoly lin(t, level, {-(xs[j] * den), den});
            term = term * lin;
        }
        acc = acc + term;
    }
    return acc;
}

} // namespace quartic
