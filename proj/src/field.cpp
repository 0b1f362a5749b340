#include "quartic/field.hpp"

#include <algorithm>
#include <cstring>

#include "quartic/poly.hpp"

namespace quartic {

bool is_tower_level(int k) {
    return k == 1 || k == 2 || k == 3 || k == 6 || k == 12;
}

int common_level(int a, int b) {
    for (int k : kTowerLevels)
        if (k % a == 0 && k % b == 0) return k;
    fail(Errc::Internal, "no common tower level");
}

int level_for_degree(int d) {
    for (int k : kTowerLevels)
        if (k % d == 0) return k;
    fail(Errc::Internal, "degree does not fit the tower");
}

namespace {
int slot(int level) {
    switch (level) {
        case 1: return 0;
        case 2: return 1;
        case 3: return 2;
        case 6: return 3;
        case 12: return 4;
    }
    fail(Errc::Internal, "bad tower level");
}
} // namespace

// ---------------------------------------------------------------- element ops

FieldElement FieldElement::operator-() const { return tower_->neg(*this); }
FieldElement FieldElement::operator+(const FieldElement& o) const { return tower_->add(*this, o); }
FieldElement FieldElement::operator-(const FieldElement& o) const { return tower_->sub(*this, o); }
FieldElement FieldElement::operator*(const FieldElement& o) const { return tower_->mul(*this, o); }
FieldElement FieldElement::inverse() const { return tower_->inv(*this); }

bool FieldElement::operator==(const FieldElement& o) const {
    if (level_ == o.level_) {
        for (int i = 0; i < level_; ++i)
            if (c_[i] != o.c_[i]) return false;
        return true;
    }
    int k = common_level(level_, o.level_);
    return tower_->embed(*this, k) == tower_->embed(o, k);
}

void FieldElement::append_bytes(std::string& out) const {
    out.push_back((char)level_);
    for (int i = 0; i < level_; ++i) {
        u64 v = c_[i];
        for (int b = 0; b < 8; ++b) out.push_back((char)((v >> (8 * b)) & 0xff));
    }
}

std::string FieldElement::to_string() const {
    std::string s = "[";
    for (int i = 0; i < level_; ++i) {
        if (i) s += ",";
        s += std::to_string(c_[i]);
    }
    return s + "]@" + std::to_string(level_);
}

int cmp(const FieldElement& a, const FieldElement& b) {
    if (a.level() != b.level()) return a.level() < b.level() ? -1 : 1;
    for (int i = 0; i < a.level(); ++i) {
        if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i) ? -1 : 1;
    }
    return 0;
}

// ---------------------------------------------------------------- tower build

FieldTower FieldTower::build(u64 p) {
    if (p >= (1ull << 62)) fail(Errc::BadInput, "modulus too large");
    if (!is_prime_u64(p)) fail(Errc::NotPrime, "p is not prime");
    if (p <= 127) fail(Errc::PrimeTooSmall, "p must exceed 127");
    return construct(p);
}

FieldTower FieldTower::build_allow_small(u64 p) {
    if (p >= (1ull << 62)) fail(Errc::BadInput, "modulus too large");
    if (!is_prime_u64(p)) fail(Errc::NotPrime, "p is not prime");
    if (p == 2) fail(Errc::PrimeTooSmall, "odd p required");
    return construct(p);
}

FieldTower FieldTower::construct(u64 p) {
    FieldTower t;
    t.p_ = p;
    for (int k : kTowerLevels) t.build_level(k);
    // embeddings chosen once, by least root; the k->12 maps for k in {2,3}
    // are compositions through level 6 so that all triangles commute
    Rng rng(derive_seed(0x70776572, p, 1));
    t.build_embedding(1, 2, rng);
    t.build_embedding(1, 3, rng);
    t.build_embedding(1, 6, rng);
    t.build_embedding(1, 12, rng);
    t.build_embedding(2, 6, rng);
    t.build_embedding(3, 6, rng);
    t.build_embedding(6, 12, rng);
    t.compose_embedding(2, 6, 12);
    t.compose_embedding(3, 6, 12);
    return t;
}

const FieldTower::Level& FieldTower::lv(int level) const { return levels_[slot(level)]; }

const std::vector<u64>& FieldTower::modulus(int level) const { return lv(level).modulus; }

namespace {

// polynomial arithmetic over F_p on raw u64 vectors (used only while a level
// is being bootstrapped, before FieldElement arithmetic exists for it)
using Raw = std::vector<u64>;

void raw_trim(Raw& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Raw raw_mulmod(const Raw& a, const Raw& b, const Raw& m, u64 p) {
    Raw prod(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            prod[i + j] = (u64)(((u128)a[i] * b[j] + prod[i + j]) % p);
    }
    // reduce by monic m
    size_t k = m.size() - 1;
    for (size_t d = prod.size(); d-- > k;) {
        u64 c = prod[d];
        if (!c) continue;
        prod[d] = 0;
        for (size_t i = 0; i < k; ++i)
            prod[d - k + i] = submod(prod[d - k + i], mulmod(c, m[i], p), p);
    }
    prod.resize(k);
    return prod;
}

Raw raw_powmod(Raw base, u64 e, const Raw& m, u64 p) {
    Raw r{1};
    r.resize(m.size() - 1, 0);
    base.resize(m.size() - 1, 0);
    while (e) {
        if (e & 1) r = raw_mulmod(r, base, m, p);
        base = raw_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

Raw raw_gcd(Raw a, Raw b, u64 p) {
    raw_trim(a);
    raw_trim(b);
    while (!b.empty()) {
        // a mod b
        u64 binv = invmod(b.back(), p);
        for (size_t d = a.size(); d-- >= b.size() && d + 1 >= b.size();) {
            if (a.size() < b.size()) break;
            u64 c = mulmod(a.back(), binv, p);
            size_t off = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i)
                a[off + i] = submod(a[off + i], mulmod(c, b[i], p), p);
            raw_trim(a);
        }
        std::swap(a, b);
        raw_trim(b);
    }
    return a;
}

bool raw_irreducible(const Raw& m, u64 p) {
    // m monic of degree k: irreducible iff X^{p^k} == X mod m and
    // gcd(X^{p^{k/l}} - X, m) = 1 for every prime l | k
    int k = (int)m.size() - 1;
    if (k == 1) return true;
    Raw x{0, 1};
    Raw xp = raw_powmod(x, p, m, p); // X^p
    // iterate Frobenius by exponentiation: X^{p^j} = (X^{p^{j-1}})^p
    std::vector<Raw> frob(k + 1);
    frob[1] = xp;
    for (int j = 2; j <= k; ++j) frob[j] = raw_powmod(frob[j - 1], p, m, p);
    Raw diff = frob[k];
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = submod(diff[1], 1, p);
    raw_trim(diff);
    if (!diff.empty()) return false;
    for (int l : {2, 3}) {
        if (k % l) continue;
        Raw d = frob[k / l];
        if (d.size() < 2) d.resize(2, 0);
        d[1] = submod(d[1], 1, p);
        raw_trim(d);
        Raw g = raw_gcd(m, d, p);
        if (g.size() != 1) return false;
    }
    return true;
}

} // namespace

void FieldTower::build_level(int k) {
    Level& L = levels_[slot(k)];
    L.k = k;
    // deterministic search from X^k + 1 upward: the non-leading coefficients
    // are the base-p digits of a counter, so towers match across machines
    for (u64 v = 1;; ++v) {
        Raw m(k + 1, 0);
        m[k] = 1;
        u64 rest = v;
        for (int i = 0; i < k && rest; ++i) {
            m[i] = rest % p_;
            rest /= p_;
        }
        if (rest) fail(Errc::Internal, "irreducible search exhausted");
        if (raw_irreducible(m, p_)) {
            L.modulus = m;
            break;
        }
    }
    // reduction rows: X^{k+j} mod m
    L.red.resize(std::max(0, k - 1));
    Raw cur(L.modulus.begin(), L.modulus.end() - 1); // X^k mod m = -(low part)
    for (auto& c : cur) c = c ? p_ - c : 0;
    for (int j = 0; j < k - 1; ++j) {
        L.red[j].fill(0);
        std::copy(cur.begin(), cur.end(), L.red[j].begin());
        // multiply cur by X mod m
        Raw nxt(k, 0);
        u64 top = cur[k - 1];
        for (int i = k - 1; i > 0; --i) nxt[i] = cur[i - 1];
        nxt[0] = 0;
        if (top) {
            for (int i = 0; i < k; ++i) {
                u64 s = L.modulus[i] ? p_ - mulmod(top, L.modulus[i], p_) : 0;
                nxt[i] = addmod(nxt[i], s, p_);
            }
        }
        cur = nxt;
    }
    // Frobenius matrix columns: X^{i·p} mod m
    Raw x{0, 1};
    Raw xp = k == 1 ? Raw{0} : raw_powmod(x, p_, L.modulus, p_);
    if (k == 1) xp = Raw{0}; // unused
    Raw col{1};
    col.resize(k, 0);
    L.frob_col.resize(k);
    for (int i = 0; i < k; ++i) {
        L.frob_col[i].fill(0);
        std::copy(col.begin(), col.end(), L.frob_col[i].begin());
        if (i + 1 < k) col = raw_mulmod(col, xp, L.modulus, p_);
    }
}

void FieldTower::build_embedding(int from, int to, Rng& rng) {
    Embedding E;
    E.from = from;
    E.to = to;
    E.cols.resize(from);
    if (from == 1) {
        E.cols[0].fill(0);
        E.cols[0][0] = 1;
    } else {
        // least root of the subfield modulus in the target level
        UniPoly m(*this, to);
        std::vector<FieldElement> cs;
        for (u64 c : lv(from).modulus) cs.push_back(from_int(c, to));
        m = UniPoly(*this, to, cs);
        auto roots = find_roots(m, to, rng);
        if (roots.empty()) fail(Errc::Internal, "embedding root not found");
        FieldElement r = roots[0];
        for (const auto& cand : roots)
            if (cmp(cand, r) < 0) r = cand;
        FieldElement pw = one(to);
        for (int i = 0; i < from; ++i) {
            E.cols[i].fill(0);
            for (int j = 0; j < to; ++j) E.cols[i][j] = pw.coeff(j);
            if (i + 1 < from) pw = mul(pw, r);
        }
    }
    // left inverse by Gaussian elimination on the to x from system
    {
        int rows = to, colsn = from;
        // augmented [E | I_rows], solve for pivot structure
        std::vector<std::vector<u64>> A(rows, std::vector<u64>(colsn + rows, 0));
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < colsn; ++c) A[r][c] = E.cols[c][r];
            A[r][colsn + r] = 1;
        }
        int rank = 0;
        for (int c = 0; c < colsn && rank < rows; ++c) {
            int piv = -1;
            for (int r = rank; r < rows; ++r)
                if (A[r][c]) { piv = r; break; }
            if (piv < 0) fail(Errc::Internal, "embedding not injective");
            std::swap(A[rank], A[piv]);
            u64 inv = invmod(A[rank][c], p_);
            for (auto& v : A[rank]) v = mulmod(v, inv, p_);
            for (int r = 0; r < rows; ++r) {
                if (r == rank || !A[r][c]) continue;
                u64 f = A[r][c];
                for (int cc = 0; cc < colsn + rows; ++cc)
                    A[r][cc] = submod(A[r][cc], mulmod(f, A[rank][cc], p_), p_);
            }
            ++rank;
        }
        E.left_inv.resize(from);
        for (int i = 0; i < from; ++i) {
            E.left_inv[i].fill(0);
            for (int j = 0; j < to; ++j) E.left_inv[i][j] = A[i][colsn + j];
        }
    }
    embeddings_.push_back(std::move(E));
}

void FieldTower::compose_embedding(int from, int mid, int to) {
    const Embedding& A = emb(from, mid);
    Embedding E;
    E.from = from;
    E.to = to;
    E.cols.resize(from);
    for (int i = 0; i < from; ++i) {
        FieldElement v = zero(mid);
        for (int j = 0; j < mid; ++j) v.c_[j] = A.cols[i][j];
        FieldElement w = embed(v, to);
        E.cols[i].fill(0);
        for (int j = 0; j < to; ++j) E.cols[i][j] = w.coeff(j);
    }
    // left inverse: from->mid section composed with mid->to section
    const Embedding& B = emb(mid, to);
    E.left_inv.resize(from);
    for (int i = 0; i < from; ++i) {
        E.left_inv[i].fill(0);
        for (int j = 0; j < to; ++j) {
            u128 acc = 0;
            for (int t = 0; t < mid; ++t)
                acc += (u128)A.left_inv[i][t] * B.left_inv[t][j];
            E.left_inv[i][j] = (u64)(acc % p_);
        }
    }
    embeddings_.push_back(std::move(E));
}

const FieldTower::Embedding& FieldTower::emb(int from, int to) const {
    for (const auto& e : embeddings_)
        if (e.from == from && e.to == to) return e;
    fail(Errc::Internal, "missing embedding");
}

// ------------------------------------------------------------- constructors

FieldElement FieldTower::zero(int level) const {
    FieldElement x;
    x.tower_ = this;
    x.level_ = level;
    return x;
}

FieldElement FieldTower::one(int level) const { return from_int(1, level); }

FieldElement FieldTower::from_int(u64 a, int level) const {
    FieldElement x = zero(level);
    x.c_[0] = a % p_;
    return x;
}

FieldElement FieldTower::from_int_signed(int64_t a, int level) const {
    u64 m = (u64)(((a % (int64_t)p_) + (int64_t)p_) % (int64_t)p_);
    return from_int(m, level);
}

FieldElement FieldTower::from_bigint(const BigInt& a, int level) const {
    BigInt m = mod_floor(a, BigInt(p_));
    return from_int(m.convert_to<u64>(), level);
}

FieldElement FieldTower::make(int level, const std::vector<u64>& coeffs) const {
    if ((int)coeffs.size() > level) fail(Errc::BadInput, "coefficient vector too long");
    FieldElement x = zero(level);
    for (size_t i = 0; i < coeffs.size(); ++i) x.c_[i] = coeffs[i] % p_;
    return x;
}

FieldElement FieldTower::gen(int level) const {
    FieldElement x = zero(level);
    if (level == 1) fail(Errc::BadInput, "level 1 has no generator");
    x.c_[1] = 1;
    return x;
}

FieldElement FieldTower::random(int level, Rng& rng) const {
    FieldElement x = zero(level);
    for (int i = 0; i < level; ++i) x.c_[i] = rng.below(p_);
    return x;
}

FieldElement FieldTower::nth_element(int level, const BigInt& idx) const {
    FieldElement x = zero(level);
    BigInt v = idx;
    BigInt P(p_);
    for (int i = 0; i < level && v != 0; ++i) {
        x.c_[i] = (u64)(v % P).convert_to<u64>();
        v /= P;
    }
    return x;
}

// ---------------------------------------------------------------- arithmetic

FieldElement FieldTower::promote_pair(const FieldElement& a, const FieldElement& b,
                                      FieldElement& bb) const {
    if (a.level_ == b.level_) {
        bb = b;
        return a;
    }
    int k = common_level(a.level_, b.level_);
    bb = embed(b, k);
    return embed(a, k);
}

FieldElement FieldTower::add(const FieldElement& a, const FieldElement& b) const {
    FieldElement y, x = promote_pair(a, b, y);
    FieldElement r = zero(x.level_);
    for (int i = 0; i < x.level_; ++i) r.c_[i] = addmod(x.c_[i], y.c_[i], p_);
    return r;
}

FieldElement FieldTower::sub(const FieldElement& a, const FieldElement& b) const {
    FieldElement y, x = promote_pair(a, b, y);
    FieldElement r = zero(x.level_);
    for (int i = 0; i < x.level_; ++i) r.c_[i] = submod(x.c_[i], y.c_[i], p_);
    return r;
}

FieldElement FieldTower::neg(const FieldElement& a) const {
    FieldElement r = zero(a.level_);
    for (int i = 0; i < a.level_; ++i) r.c_[i] = a.c_[i] ? p_ - a.c_[i] : 0;
    return r;
}

FieldElement FieldTower::mul(const FieldElement& a, const FieldElement& b) const {
    FieldElement y, x = promote_pair(a, b, y);
    int k = x.level_;
    const Level& L = lv(k);
    if (k == 1) {
        FieldElement r = zero(1);
        r.c_[0] = mulmod(x.c_[0], y.c_[0], p_);
        return r;
    }
    u128 prod[23];
    std::memset(prod, 0, sizeof(u128) * (2 * k - 1));
    for (int i = 0; i < k; ++i) {
        if (!x.c_[i]) continue;
        for (int j = 0; j < k; ++j) prod[i + j] += (u128)x.c_[i] * y.c_[j];
    }
    u128 acc[12];
    for (int i = 0; i < k; ++i) acc[i] = (u64)(prod[i] % p_);
    for (int j = 0; j < k - 1; ++j) {
        u64 m = (u64)(prod[k + j] % p_);
        if (!m) continue;
        const auto& row = L.red[j];
        for (int i = 0; i < k; ++i) acc[i] += (u128)m * row[i];
    }
    FieldElement r = zero(k);
    for (int i = 0; i < k; ++i) r.c_[i] = (u64)(acc[i] % p_);
    return r;
}

FieldElement FieldTower::inv(const FieldElement& a) const {
    if (a.is_zero()) fail(Errc::BadInput, "inverse of zero");
    int k = a.level_;
    if (k == 1) {
        FieldElement r = zero(1);
        r.c_[0] = invmod(a.c_[0], p_);
        return r;
    }
    // extended Euclid between the coefficient polynomial and the modulus
    Raw r0(lv(k).modulus), r1(a.c_.begin(), a.c_.begin() + k);
    raw_trim(r1);
    Raw t0{}, t1{1};
    while (!(r1.size() == 1 || r1.empty())) {
        // divide r0 by r1
        Raw q(r0.size() - r1.size() + 1, 0);
        Raw rem = r0;
        u64 li = invmod(r1.back(), p_);
        for (size_t d = rem.size(); d-- + 1 >= r1.size() + 1 && rem.size() >= r1.size();) {
            u64 c = mulmod(rem.back(), li, p_);
            size_t off = rem.size() - r1.size();
            q[off] = c;
            for (size_t i = 0; i < r1.size(); ++i)
                rem[off + i] = submod(rem[off + i], mulmod(c, r1[i], p_), p_);
            raw_trim(rem);
            if (rem.size() < r1.size()) break;
        }
        // t2 = t0 - q*t1
        Raw qt(q.size() + t1.size(), 0);
        qt.assign(q.size() + (t1.empty() ? 1 : t1.size()), 0);
        for (size_t i = 0; i < q.size(); ++i) {
            if (!q[i]) continue;
            for (size_t j = 0; j < t1.size(); ++j)
                qt[i + j] = (u64)(((u128)q[i] * t1[j] + qt[i + j]) % p_);
        }
        Raw t2(std::max(t0.size(), qt.size()), 0);
        for (size_t i = 0; i < t2.size(); ++i) {
            u64 x0 = i < t0.size() ? t0[i] : 0;
            u64 x1 = i < qt.size() ? qt[i] : 0;
            t2[i] = submod(x0, x1, p_);
        }
        raw_trim(t2);
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if (r1.empty()) fail(Errc::Internal, "element not invertible");
    u64 s = invmod(r1[0], p_);
    FieldElement out = zero(k);
    // reduce t1 mod modulus (degree already < k) and scale
    for (size_t i = 0; i < t1.size() && i < (size_t)k; ++i) out.c_[i] = mulmod(t1[i], s, p_);
    return out;
}

// --------------------------------------------------------- embeddings & maps

FieldElement FieldTower::embed(const FieldElement& x, int to_level) const {
    if (x.level_ == to_level) return x;
    if (to_level % x.level_ != 0)
        fail(Errc::BadInput, "levels not comparable");
    const Embedding& E = emb(x.level_, to_level);
    u128 acc[12] = {};
    for (int i = 0; i < x.level_; ++i) {
        if (!x.c_[i]) continue;
        for (int j = 0; j < to_level; ++j) acc[j] += (u128)x.c_[i] * E.cols[i][j];
    }
    FieldElement r = zero(to_level);
    for (int j = 0; j < to_level; ++j) r.c_[j] = (u64)(acc[j] % p_);
    return r;
}

std::optional<FieldElement> FieldTower::compress(const FieldElement& x, int to_level) const {
    if (x.level_ == to_level) return x;
    if (x.level_ % to_level != 0) return std::nullopt;
    const Embedding& E = emb(to_level, x.level_);
    FieldElement cand = zero(to_level);
    for (int i = 0; i < to_level; ++i) {
        u128 acc = 0;
        for (int j = 0; j < x.level_; ++j) acc += (u128)E.left_inv[i][j] * x.c_[j];
        cand.c_[i] = (u64)(acc % p_);
    }
    if (embed(cand, x.level_) == x) return cand;
    return std::nullopt;
}

int FieldTower::degree(const FieldElement& x) const {
    FieldElement y = frobenius(x, 1);
    int d = 1;
    while (!(y == x)) {
        y = frobenius(y, 1);
        ++d;
        if (d > x.level_) fail(Errc::Internal, "frobenius orbit overflow");
    }
    return d;
}

FieldElement FieldTower::canonical(const FieldElement& x) const {
    int d = degree(x);
    int target = level_for_degree(d);
    if (target == x.level_) return x;
    auto c = compress(x, target);
    if (!c) fail(Errc::Internal, "canonical compression failed");
    return *c;
}

FieldElement FieldTower::frobenius(const FieldElement& x, int e) const {
    int k = x.level_;
    if (k == 1) return x;
    e %= k;
    if (e < 0) e += k;
    FieldElement cur = x;
    const Level& L = lv(k);
    for (int t = 0; t < e; ++t) {
        u128 acc[12] = {};
        for (int i = 0; i < k; ++i) {
            if (!cur.c_[i]) continue;
            for (int j = 0; j < k; ++j) acc[j] += (u128)cur.c_[i] * L.frob_col[i][j];
        }
        for (int j = 0; j < k; ++j) cur.c_[j] = (u64)(acc[j] % p_);
    }
    return cur;
}

FieldElement FieldTower::pow(const FieldElement& x, const BigInt& e) const {
    if (e < 0) return pow(inv(x), -e);
    FieldElement r = one(x.level_);
    FieldElement b = x;
    BigInt m = e;
    while (m != 0) {
        if ((m & 1) != 0) r = mul(r, b);
        m >>= 1;
        if (m != 0) b = mul(b, b);
    }
    return r;
}

FieldElement FieldTower::pow_u64(const FieldElement& x, u64 e) const {
    FieldElement r = one(x.level_);
    FieldElement b = x;
    while (e) {
        if (e & 1) r = mul(r, b);
        e >>= 1;
        if (e) b = mul(b, b);
    }
    return r;
}

} // namespace quartic
