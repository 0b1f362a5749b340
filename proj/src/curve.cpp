#include "quartic/curve.hpp"

#include <algorithm>

namespace quartic {

int mono_count(int d) { return (d + 1) * (d + 2) / 2; }

int mono_index(int d, int ax, int ay) {
    int i = d - ax;
    return i * (i + 1) / 2 + (i - ay);
}

void mono_exponents(int d, int idx, int& ax, int& ay, int& az) {
    for (int a = d; a >= 0; --a) {
        int block = d - a + 1;
        if (idx < block) {
            ax = a;
            ay = d - a - idx;
            az = d - a - ay;
            return;
        }
        idx -= block;
    }
    fail(Errc::Internal, "monomial index out of range");
}

// ------------------------------------------------------------------- Mat3

std::array<FieldElement, 3> Mat3::apply(const std::array<FieldElement, 3>& v) const {
    std::array<FieldElement, 3> r;
    for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return r;
}

FieldElement Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 Mat3::inverse() const {
    FieldElement d = det();
    FieldElement di = d.inverse();
    Mat3 r;
    auto co = [&](int i, int j) {
        int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
        int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        return m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = co(j, i) * di;
    return r;
}

// ------------------------------------------------------------------- Form

Form::Form(const FieldTower& t, int level, int degree)
    : tower_(&t), level_(level), degree_(degree), c_(mono_count(degree), t.zero(level)) {}

Form::Form(const FieldTower& t, int level, int degree, std::vector<FieldElement> coeffs)
    : tower_(&t), level_(level), degree_(degree), c_(std::move(coeffs)) {
    if ((int)c_.size() != mono_count(degree)) fail(Errc::BadInput, "bad coefficient count");
    for (auto& x : c_)
        if (x.level() != level) x = t.embed(x, level);
}

Form Form::from_ints(const FieldTower& t, int level, int degree,
                     const std::vector<int64_t>& coeffs) {
    std::vector<FieldElement> v;
    v.reserve(coeffs.size());
    for (int64_t x : coeffs) v.push_back(t.from_int_signed(x, level));
    return Form(t, level, degree, std::move(v));
}

bool Form::is_zero() const {
    for (const auto& x : c_)
        if (!x.is_zero()) return false;
    return true;
}

FieldElement Form::eval(const FieldElement& x, const FieldElement& y,
                        const FieldElement& z) const {
    int lvl = common_level(common_level(level_, x.level()),
                           common_level(y.level(), z.level()));
    std::array<std::vector<FieldElement>, 3> pw;
    for (int v = 0; v < 3; ++v) {
        const FieldElement& base = v == 0 ? x : (v == 1 ? y : z);
        pw[v].resize(degree_ + 1);
        pw[v][0] = tower_->one(lvl);
        for (int e = 1; e <= degree_; ++e) pw[v][e] = pw[v][e - 1] * base;
    }
    FieldElement acc = tower_->zero(lvl);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        int ax, ay, az;
        mono_exponents(degree_, (int)i, ax, ay, az);
        acc += c_[i] * pw[0][ax] * pw[1][ay] * pw[2][az];
    }
    return acc;
}

Form Form::operator*(const Form& o) const {
    int lvl = common_level(level_, o.level_);
    Form r(*tower_, lvl, degree_ + o.degree_);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        int a1, b1, cz1;
        mono_exponents(degree_, (int)i, a1, b1, cz1);
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j].is_zero()) continue;
            int a2, b2, cz2;
            mono_exponents(o.degree_, (int)j, a2, b2, cz2);
            int idx = mono_index(degree_ + o.degree_, a1 + a2, b1 + b2);
            r.c_[idx] += c_[i] * o.c_[j];
        }
    }
    return r;
}

Form Form::promoted(int level) const {
    std::vector<FieldElement> v = c_;
    for (auto& x : v) x = tower_->embed(x, level);
    return Form(*tower_, level, degree_, std::move(v));
}

Form Form::composed(const Mat3& M) const {
    int lvl = level_;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) lvl = common_level(lvl, M.m[i][j].level());
    // linear forms L_v = row v of M
    std::array<Form, 3> lin;
    for (int v = 0; v < 3; ++v)
        lin[v] = Form(*tower_, lvl, 1, {M.m[v][0], M.m[v][1], M.m[v][2]});
    // powers of each linear form
    std::array<std::vector<Form>, 3> pw;
    for (int v = 0; v < 3; ++v) {
        pw[v].resize(degree_ + 1);
        for (int e = 1; e <= degree_; ++e) pw[v][e] = e == 1 ? lin[v] : pw[v][e - 1] * lin[v];
    }
    Form acc(*tower_, lvl, degree_);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        int ax, ay, az;
        mono_exponents(degree_, (int)i, ax, ay, az);
        // start from the scalar and multiply the needed powers
        Form term(*tower_, lvl, 0, {c_[i]});
        if (ax) term = term * pw[0][ax];
        if (ay) term = term * pw[1][ay];
        if (az) term = term * pw[2][az];
        for (size_t k = 0; k < acc.c_.size(); ++k) acc.c_[k] += term.c_[k];
    }
    return acc;
}

Form Form::partial(int var) const {
    if (degree_ == 0) fail(Errc::BadInput, "partial of constant");
    Form r(*tower_, level_, degree_ - 1);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        int e[3];
        mono_exponents(degree_, (int)i, e[0], e[1], e[2]);
        if (e[var] == 0) continue;
        FieldElement coef = c_[i] * tower_->from_int(e[var], level_);
        e[var] -= 1;
        r.c_[mono_index(degree_ - 1, e[0], e[1])] += coef;
    }
    return r;
}

Form Form::normalized() const {
    for (const auto& x : c_) {
        if (!x.is_zero()) {
            FieldElement s = x.inverse();
            std::vector<FieldElement> v = c_;
            for (auto& y : v) y = y * s;
            return Form(*tower_, level_, degree_, std::move(v));
        }
    }
    fail(Errc::ZeroForm, "normalizing zero form");
}

UniPoly Form::y_coeff_poly(int j) const {
    std::vector<FieldElement> xs(degree_ + 1, tower_->zero(level_));
    for (size_t i = 0; i < c_.size(); ++i) {
        int ax, ay, az;
        mono_exponents(degree_, (int)i, ax, ay, az);
        if (ay == j) xs[ax] += c_[i];
    }
    return UniPoly(*tower_, level_, std::move(xs));
}

// --------------------------------------------------------------- PlanePoint

PlanePoint PlanePoint::make(const FieldElement& x, const FieldElement& y,
                            const FieldElement& z) {
    const FieldTower& t = *x.tower();
    int lvl = common_level(common_level(x.level(), y.level()), z.level());
    FieldElement X = t.embed(x, lvl), Y = t.embed(y, lvl), Z = t.embed(z, lvl);
    FieldElement s;
    if (!Z.is_zero()) s = Z.inverse();
    else if (!Y.is_zero()) s = Y.inverse();
    else if (!X.is_zero()) s = X.inverse();
    else fail(Errc::BadInput, "all projective coordinates zero");
    X = X * s;
    Y = Y * s;
    Z = Z * s;
    FieldElement cx = t.canonical(X), cy = t.canonical(Y), cz = t.canonical(Z);
    int L = common_level(common_level(cx.level(), cy.level()), cz.level());
    PlanePoint p;
    p.x_ = t.embed(cx, L);
    p.y_ = t.embed(cy, L);
    p.z_ = t.embed(cz, L);
    p.level_ = L;
    return p;
}

PlanePoint PlanePoint::frobenius(int e) const {
    const FieldTower& t = *x_.tower();
    return make(t.frobenius(x_, e), t.frobenius(y_, e), t.frobenius(z_, e));
}

bool PlanePoint::operator==(const PlanePoint& o) const {
    return level_ == o.level_ && x_ == o.x_ && y_ == o.y_ && z_ == o.z_;
}

void PlanePoint::append_bytes(std::string& out) const {
    x_.append_bytes(out);
    y_.append_bytes(out);
    z_.append_bytes(out);
}

std::string PlanePoint::to_string() const {
    return "(" + x_.to_string() + ":" + y_.to_string() + ":" + z_.to_string() + ")";
}

int cmp(const PlanePoint& a, const PlanePoint& b) {
    if (a.level() != b.level()) return a.level() < b.level() ? -1 : 1;
    if (int c = cmp(a.x(), b.x())) return c;
    if (int c = cmp(a.y(), b.y())) return c;
    return cmp(a.z(), b.z());
}

// ---------------------------------------------------------- EffectiveDivisor

void EffectiveDivisor::add_point(const PlanePoint& p, int mult) {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p,
                               [](const auto& a, const PlanePoint& b) { return cmp(a.first, b) < 0; });
    if (it != pts_.end() && it->first == p) it->second += mult;
    else pts_.insert(it, {p, mult});
}

void EffectiveDivisor::add_unresolved(int degree, int mult) {
    unresolved_.push_back({degree, mult});
}

void EffectiveDivisor::merge(const EffectiveDivisor& o) {
    for (const auto& [p, m] : o.pts_) add_point(p, m);
    for (const auto& u : o.unresolved_) unresolved_.push_back(u);
}

bool EffectiveDivisor::subtract(const EffectiveDivisor& o) {
    if (!o.unresolved_.empty()) return false;
    for (const auto& [p, m] : o.pts_) {
        auto it = std::lower_bound(pts_.begin(), pts_.end(), p,
                                   [](const auto& a, const PlanePoint& b) { return cmp(a.first, b) < 0; });
        if (it == pts_.end() || !(it->first == p) || it->second < m) return false;
        it->second -= m;
        if (it->second == 0) pts_.erase(it);
    }
    return true;
}

bool EffectiveDivisor::contains(const EffectiveDivisor& o) const {
    EffectiveDivisor tmp = *this;
    return tmp.subtract(o);
}

int EffectiveDivisor::total_degree() const {
    int d = 0;
    for (const auto& [p, m] : pts_) d += m;
    for (const auto& [deg, m] : unresolved_) d += deg * m;
    return d;
}

int EffectiveDivisor::multiplicity_of(const PlanePoint& p) const {
    for (const auto& [q, m] : pts_)
        if (q == p) return m;
    return 0;
}

std::string EffectiveDivisor::to_string() const {
    std::string s;
    for (const auto& [p, m] : pts_) s += std::to_string(m) + "*" + p.to_string() + " ";
    for (const auto& [d, m] : unresolved_)
        s += "[deg " + std::to_string(d) + " x" + std::to_string(m) + "] ";
    return s;
}

// ------------------------------------------------------------ branch series

namespace {

using Series = std::vector<FieldElement>; // coefficient of t^j, fixed length

Series series_zero(const FieldTower& t, int lvl, int prec) {
    return Series(prec, t.zero(lvl));
}

Series series_mul(const Series& a, const Series& b, const FieldTower& t, int lvl) {
    int prec = (int)a.size();
    Series r = series_zero(t, lvl, prec);
    for (int i = 0; i < prec; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j < prec; ++j) {
            if (b[j].is_zero()) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

} // namespace

int BranchSeries::valuation(const Form& h) const {
    const FieldTower& t = *xyz[0][0].tower();
    int lvl = common_level(level, h.level());
    std::array<std::vector<Series>, 3> pw;
    for (int v = 0; v < 3; ++v) {
        pw[v].resize(h.degree() + 1);
        pw[v][0] = series_zero(t, lvl, prec);
        pw[v][0][0] = t.one(lvl);
        Series base(prec, t.zero(lvl));
        for (int j = 0; j < prec; ++j) base[j] = t.embed(xyz[v][j], lvl);
        for (int e = 1; e <= h.degree(); ++e) pw[v][e] = series_mul(pw[v][e - 1], base, t, lvl);
    }
    Series acc = series_zero(t, lvl, prec);
    for (int i = 0; i < (int)h.coeffs().size(); ++i) {
        if (h.coeff(i).is_zero()) continue;
        int ax, ay, az;
        mono_exponents(h.degree(), i, ax, ay, az);
        Series term = series_mul(pw[0][ax], pw[1][ay], t, lvl);
        term = series_mul(term, pw[2][az], t, lvl);
        FieldElement c = t.embed(h.coeff(i), lvl);
        for (int j = 0; j < prec; ++j) acc[j] += c * term[j];
    }
    for (int j = 0; j < prec; ++j)
        if (!acc[j].is_zero()) return j;
    return prec;
}

BranchSeries local_expansion(const PlanePoint& P, const Quartic& f, int order) {
    const FieldTower& t = f.tower();
    int lvl = common_level(P.level(), f.level());
    int prec = std::max(order, 1);
    // chart: the coordinate the canonical form pinned to 1
    int ch = !P.z().is_zero() ? 2 : (!P.y().is_zero() ? 1 : 0);
    int ui = ch == 0 ? 1 : 0;
    int vi = ch == 2 ? 1 : 2;
    FieldElement u0 = t.embed(ui == 0 ? P.x() : P.y(), lvl);
    FieldElement v0 = t.embed(vi == 1 ? P.y() : P.z(), lvl);
    if (!f.eval(P.x(), P.y(), P.z()).is_zero())
        fail(Errc::PointNotOnCurve, "local expansion off the curve");
    FieldElement gu = f.partial(ui).eval(P.x(), P.y(), P.z());
    FieldElement gv = f.partial(vi).eval(P.x(), P.y(), P.z());
    bool solve_v = !gv.is_zero();
    if (!solve_v && gu.is_zero()) fail(Errc::Internal, "singular point in local expansion");

    // bivariate coefficients F[a][b] of u^a v^b with the chart variable at 1
    std::array<std::array<FieldElement, 5>, 5> F;
    for (auto& row : F) row.fill(t.zero(lvl));
    for (int i = 0; i < (int)f.coeffs().size(); ++i) {
        int e[3];
        mono_exponents(4, i, e[0], e[1], e[2]);
        F[e[ui]][e[vi]] += t.embed(f.coeff(i), lvl);
    }

    // series for the free variable: w(t) = w0 + t
    auto lin_series = [&](const FieldElement& w0) {
        Series s = series_zero(t, lvl, prec);
        s[0] = w0;
        if (prec > 1) s[1] = t.one(lvl);
        return s;
    };

    Series free_s = solve_v ? lin_series(u0) : lin_series(v0);
    Series dep = series_zero(t, lvl, prec);
    dep[0] = solve_v ? v0 : u0;
    FieldElement slope_inv = (solve_v ? gv : gu).inverse();

    // evaluate F(u(t), v(t)) to full precision
    auto eval_F = [&](const Series& us, const Series& vs) {
        std::array<Series, 5> upw, vpw;
        upw[0] = series_zero(t, lvl, prec);
        upw[0][0] = t.one(lvl);
        vpw[0] = upw[0];
        for (int e = 1; e <= 4; ++e) {
            upw[e] = series_mul(upw[e - 1], us, t, lvl);
            vpw[e] = series_mul(vpw[e - 1], vs, t, lvl);
        }
        Series acc = series_zero(t, lvl, prec);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b) {
                if (F[a][b].is_zero()) continue;
                Series term = series_mul(upw[a], vpw[b], t, lvl);
                for (int j = 0; j < prec; ++j) acc[j] += F[a][b] * term[j];
            }
        return acc;
    };

    for (int j = 1; j < prec; ++j) {
        Series r = solve_v ? eval_F(free_s, dep) : eval_F(dep, free_s);
        if (r[j].is_zero()) continue;
        dep[j] = -(r[j] * slope_inv);
    }

    BranchSeries out;
    out.level = lvl;
    out.prec = prec;
    Series one_s = series_zero(t, lvl, prec);
    one_s[0] = t.one(lvl);
    out.xyz[ch] = one_s;
    out.xyz[ui] = solve_v ? free_s : dep;
    out.xyz[vi] = solve_v ? dep : free_s;
    return out;
}

BranchSeries local_expansion(const PlanePoint& P, const StandardCurve& C, int order) {
    return local_expansion(P, C.f(), order);
}

// ------------------------------------------------------------- smoothness

bool quartic_is_smooth(const Quartic& g) {
    if (g.is_zero()) fail(Errc::ZeroForm, "zero quartic");
    const FieldTower& t = g.tower();
    int lvl = g.level();
    std::array<Form, 3> P = {g.partial(0), g.partial(1), g.partial(2)};
    // degree-7 Macaulay block of <gx, gy, gz>: full iff the partials have no
    // common projective zero
    int cols = mono_count(7);
    std::vector<std::vector<FieldElement>> rows;
    rows.reserve(45);
    for (int v = 0; v < 3; ++v) {
        for (int mi = 0; mi < mono_count(4); ++mi) {
            int ax, ay, az;
            mono_exponents(4, mi, ax, ay, az);
            std::vector<FieldElement> row(cols, t.zero(lvl));
            for (int i = 0; i < mono_count(3); ++i) {
                if (P[v].coeff(i).is_zero()) continue;
                int bx, by, bz;
                mono_exponents(3, i, bx, by, bz);
                row[mono_index(7, ax + bx, ay + by)] += P[v].coeff(i);
            }
            rows.push_back(std::move(row));
        }
    }
    // rank by Gaussian elimination
    int rank = 0;
    int nr = (int)rows.size();
    for (int c = 0; c < cols && rank < nr; ++c) {
        int piv = -1;
        for (int r = rank; r < nr; ++r)
            if (!rows[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        FieldElement inv = rows[rank][c].inverse();
        for (int cc = c; cc < cols; ++cc) rows[rank][cc] = rows[rank][cc] * inv;
        for (int r = 0; r < nr; ++r) {
            if (r == rank || rows[r][c].is_zero()) continue;
            FieldElement fct = rows[r][c];
            for (int cc = c; cc < cols; ++cc) rows[r][cc] -= fct * rows[rank][cc];
        }
        ++rank;
    }
    return rank == cols;
}

// ------------------------------------------------------- line intersection

namespace {

Rng engine_rng() { return Rng(0x1475ec7d00dULL); } // output is sort-canonical

// points of P^2(F_p) in scan order
std::array<FieldElement, 3> nth_projective_point(const FieldTower& t, const BigInt& n) {
    BigInt p(t.p());
    if (n < p * p) {
        BigInt x = n % p, y = n / p;
        return {t.from_bigint(x), t.from_bigint(y), t.one(1)};
    }
    BigInt m = n - p * p;
    if (m < p) return {t.from_bigint(m), t.one(1), t.zero(1)};
    return {t.one(1), t.zero(1), t.zero(1)};
}

} // namespace

EffectiveDivisor intersect_line(const Quartic& f, const Form& line) {
    if (line.is_zero()) fail(Errc::ZeroForm, "zero line");
    if (line.degree() != 1) fail(Errc::BadInput, "not a line");
    const FieldTower& t = f.tower();
    int lvl = common_level(f.level(), line.level());
    FieldElement a = t.embed(line.coeff(0), lvl), b = t.embed(line.coeff(1), lvl),
                 c = t.embed(line.coeff(2), lvl);
    std::array<FieldElement, 3> A, B;
    FieldElement z = t.zero(lvl), o = t.one(lvl);
    if (!a.is_zero()) {
        FieldElement ai = a.inverse();
        A = {-(b * ai), o, z};
        B = {-(c * ai), z, o};
    } else if (!b.is_zero()) {
        FieldElement bi = b.inverse();
        A = {o, z, z};
        B = {z, -(c * bi), o};
    } else {
        A = {o, z, z};
        B = {z, o, z};
    }
    // restrict f to the line: U(t) = f(A + tB)
    std::array<UniPoly, 3> lin;
    for (int v = 0; v < 3; ++v) lin[v] = UniPoly(t, lvl, {A[v], B[v]});
    std::array<std::vector<UniPoly>, 3> pw;
    for (int v = 0; v < 3; ++v) {
        pw[v].resize(5);
        pw[v][0] = UniPoly::from_ints(t, lvl, {1});
        for (int e = 1; e <= 4; ++e) pw[v][e] = pw[v][e - 1] * lin[v];
    }
    UniPoly U(t, lvl);
    for (int i = 0; i < (int)f.coeffs().size(); ++i) {
        if (f.coeff(i).is_zero()) continue;
        int ax, ay, az;
        mono_exponents(4, i, ax, ay, az);
        U = U + pw[0][ax] * pw[1][ay] * pw[2][az] * t.embed(f.coeff(i), lvl);
    }
    if (U.is_zero()) fail(Errc::Internal, "line contained in quartic");

    EffectiveDivisor D;
    int du = U.degree();
    if (du < 4) D.add_point(PlanePoint::make(B[0], B[1], B[2]), 4 - du);
    if (du >= 1) {
        Rng rng = engine_rng();
        auto factors = factor(U, rng);
        for (auto& [q, mq] : factors) {
            int dq = q.degree();
            int abs_deg = lvl * dq;
            if (abs_deg <= 12 && 12 % abs_deg == 0) {
                int target = level_for_degree(abs_deg);
                Rng rng2 = engine_rng();
                auto roots = find_roots(q, target, rng2);
                for (const auto& r : roots) {
                    FieldElement x0 = A[0] + r * B[0];
                    FieldElement y0 = A[1] + r * B[1];
                    FieldElement z0 = A[2] + r * B[2];
                    D.add_point(PlanePoint::make(x0, y0, z0), mq);
                }
            } else {
                D.add_unresolved(dq, mq);
            }
        }
    }
    return D;
}

// --------------------------------------------------- generic intersection

EffectiveDivisor intersect_form(const Quartic& f, const Form& h,
                                const std::vector<StandardCurve::Center>* cache) {
    if (h.is_zero()) fail(Errc::ZeroForm, "zero form");
    if (h.degree() == 1) return intersect_line(f, h);
    const FieldTower& t = f.tower();
    int lvl = common_level(f.level(), h.level());
    int d = h.degree();

    BigInt center_idx = 0;
    BigInt center_max = BigInt(t.p()) * t.p() + t.p() + 1;
    for (int attempt = 0; attempt < 64; ++attempt) {
        // pick a projection center off both curves
        std::array<FieldElement, 3> c;
        Mat3 M;
        Quartic fM;
        bool from_cache = false;
        if (cache && attempt < (int)cache->size()) {
            const auto& cd = (*cache)[attempt];
            if (!h.eval(cd.c[0], cd.c[1], cd.c[2]).is_zero()) {
                c = cd.c;
                M = cd.M;
                fM = cd.fM;
                from_cache = true;
            } else {
                continue;
            }
        }
        if (!from_cache) {
            bool found = false;
            while (center_idx < center_max) {
                c = nth_projective_point(t, center_idx);
                center_idx += 1;
                if (f.eval(c[0], c[1], c[2]).is_zero()) continue;
                if (h.eval(c[0], c[1], c[2]).is_zero()) continue;
                found = true;
                break;
            }
            if (!found) fail(Errc::Internal, "no valid projection center");
            // invertible M with second column c
            bool built = false;
            for (int i = 0; i < 3 && !built; ++i) {
                for (int j = 0; j < 3 && !built; ++j) {
                    if (i == j) continue;
                    for (int r = 0; r < 3; ++r) {
                        M.m[r][0] = t.from_int(r == i ? 1 : 0);
                        M.m[r][1] = c[r];
                        M.m[r][2] = t.from_int(r == j ? 1 : 0);
                    }
                    if (!M.det().is_zero()) built = true;
                }
            }
            if (!built) fail(Errc::Internal, "center matrix not invertible");
            fM = f.composed(M);
        }
        Form hM = h.composed(M);
        Quartic fMl = fM.promoted(lvl);
        Form hMl = hM.promoted(lvl);

        // y-leading coefficients are the nonzero constants f(c), h(c)
        std::array<UniPoly, 5> fy;
        std::vector<UniPoly> hy(d + 1);
        for (int j = 0; j <= 4; ++j) fy[j] = fMl.y_coeff_poly(j);
        for (int j = 0; j <= d; ++j) hy[j] = hMl.y_coeff_poly(j);

        // R(x) = Res_y(fM, hM)|_{z=1} by evaluation/interpolation
        int samples = 4 * d + 1;
        std::vector<FieldElement> xs, rs;
        for (int s = 0; s < samples; ++s) {
            FieldElement xi = t.from_int(s, 1);
            std::vector<FieldElement> ac(5), bc(d + 1);
            for (int j = 0; j <= 4; ++j) ac[j] = fy[j].eval(t.embed(xi, lvl));
            for (int j = 0; j <= d; ++j) bc[j] = hy[j].eval(t.embed(xi, lvl));
            UniPoly A(t, lvl, std::move(ac));
            UniPoly B(t, lvl, std::move(bc));
            xs.push_back(t.embed(xi, lvl));
            rs.push_back(resultant(A, B));
        }
        UniPoly R = lagrange(t, lvl, xs, rs);
        int e0 = 4 * d - R.degree();
        if (R.is_zero()) fail(Errc::Internal, "vanishing resultant");

        EffectiveDivisor D;
        bool retry = false;

        auto fiber_point = [&](const FieldElement& x0, int mult, int fiberLvl) -> bool {
            // single distinct common root in y above x0, else bad center
            std::vector<FieldElement> ac(5), bc(d + 1);
            for (int j = 0; j <= 4; ++j) ac[j] = t.embed(fy[j].eval(x0), fiberLvl);
            for (int j = 0; j <= d; ++j) bc[j] = t.embed(hy[j].eval(x0), fiberLvl);
            UniPoly A(t, fiberLvl, std::move(ac));
            UniPoly B(t, fiberLvl, std::move(bc));
            UniPoly g = poly_gcd(A, B);
            if (g.degree() < 1) fail(Errc::Internal, "empty fiber under vanishing resultant");
            UniPoly s = poly_divmod(g, poly_gcd(g, g.derivative())).first;
            if (s.degree() != 1) return false;
            FieldElement y0 = -(s.monic().coeff(0));
            auto np = M.apply({t.embed(x0, fiberLvl), y0, t.one(fiberLvl)});
            D.add_point(PlanePoint::make(np[0], np[1], np[2]), mult);
            return true;
        };

        if (R.degree() >= 1) {
            Rng rng = engine_rng();
            auto factors = factor(R, rng);
            for (auto& [q, mq] : factors) {
                if (retry) break;
                int dq = q.degree();
                int abs_deg = lvl * dq;
                if (abs_deg <= 12 && 12 % abs_deg == 0) {
                    int target = level_for_degree(abs_deg);
                    Rng rng2 = engine_rng();
                    auto roots = find_roots(q, target, rng2);
                    for (const auto& r : roots) {
                        if (!fiber_point(r, mq, common_level(target, lvl))) {
                            retry = true;
                            break;
                        }
                    }
                } else {
                    D.add_unresolved(dq, mq);
                }
            }
        }
        if (retry) continue;

        if (e0 > 0) {
            // fiber over (1:0): intersection points on the new line z = 0
            std::vector<FieldElement> ac, bc;
            for (int j = 0; j <= 4; ++j) ac.push_back(fMl.y_coeff_poly(j).coeff(4 - j));
            // careful: need f(x,y,0): coefficient of x^{deg-j} y^j
            ac.clear();
            bc.clear();
            for (int j = 0; j <= 4; ++j) ac.push_back(fMl.coeff(4 - j, j));
            for (int j = 0; j <= d; ++j) bc.push_back(hMl.coeff(d - j, j));
            UniPoly A(t, lvl, std::move(ac));
            UniPoly B(t, lvl, std::move(bc));
            UniPoly g = poly_gcd(A, B);
            if (g.degree() < 1) fail(Errc::Internal, "empty infinity fiber");
            UniPoly s = poly_divmod(g, poly_gcd(g, g.derivative())).first;
            if (s.degree() != 1) continue; // retry center
            FieldElement y0 = -(s.monic().coeff(0));
            auto np = M.apply({t.one(lvl), y0, t.zero(lvl)});
            D.add_point(PlanePoint::make(np[0], np[1], np[2]), e0);
        }
        return D;
    }
    fail(Errc::Internal, "intersection center retries exhausted");
}

EffectiveDivisor intersection_divisor(const Form& h, const StandardCurve& C) {
    return intersect_form(C.f(), h, &C.centers());
}

// ------------------------------------------------------------ tangent line

Form tangent_line_at(const PlanePoint& P, const Quartic& f) {
    const FieldTower& t = f.tower();
    if (!f.eval(P.x(), P.y(), P.z()).is_zero())
        fail(Errc::PointNotOnCurve, "tangent at point off curve");
    int lvl = common_level(P.level(), f.level());
    FieldElement a = f.partial(0).eval(P.x(), P.y(), P.z());
    FieldElement b = f.partial(1).eval(P.x(), P.y(), P.z());
    FieldElement c = f.partial(2).eval(P.x(), P.y(), P.z());
    return Form(t, lvl, 1, {a, b, c}).normalized();
}

Form tangent_line_at(const PlanePoint& P, const StandardCurve& C) {
    const FieldTower& t = C.tower();
    if (!C.point_on_curve(P)) fail(Errc::PointNotOnCurve, "tangent at point off curve");
    int lvl = common_level(P.level(), C.base_level());
    FieldElement a = C.fx().eval(P.x(), P.y(), P.z());
    FieldElement b = C.fy().eval(P.x(), P.y(), P.z());
    FieldElement c = C.fz().eval(P.x(), P.y(), P.z());
    return Form(t, lvl, 1, {a, b, c}).normalized();
}

// ------------------------------------------------------------- interpolate

Form interpolate(const EffectiveDivisor& S, int d, const StandardCurve& C) {
    if (d != 2 && d != 3) fail(Errc::BadInput, "interpolation degree must be 2 or 3");
    if (!S.fully_materialized()) fail(Errc::BadInput, "interpolation needs materialized points");
    const FieldTower& t = C.tower();
    int b = C.base_level();
    int nm = mono_count(d);
    u64 p = t.p();

    // Frobenius orbits over the base field; one representative each
    std::vector<std::pair<PlanePoint, int>> reps;
    {
        std::vector<std::pair<PlanePoint, int>> left = S.points();
        while (!left.empty()) {
            PlanePoint P = left.front().first;
            int m = left.front().second;
            // orbit of P under x -> x^{p^b}
            std::vector<PlanePoint> orbit{P};
            PlanePoint cur = P.frobenius(b);
            while (!(cur == P)) {
                orbit.push_back(cur);
                cur = cur.frobenius(b);
            }
            for (const auto& q : orbit) {
                auto it = std::find_if(left.begin(), left.end(),
                                       [&](const auto& e) { return e.first == q; });
                if (it == left.end() || it->second != m)
                    fail(Errc::BadInput, "divisor not Frobenius-stable over the base");
                left.erase(it);
            }
            reps.push_back({P, m});
        }
    }

    // base-field restriction: unknowns are the F_p coordinates of the n_m
    // base-level coefficients
    int cols = nm * b;
    std::vector<std::vector<u64>> rows;
    std::vector<FieldElement> basis(b);
    for (int s = 0; s < b; ++s) {
        std::vector<u64> cv(s + 1, 0);
        cv[s] = 1;
        basis[s] = t.make(b, cv);
    }

    for (auto& [P, m] : reps) {
        int W = common_level(common_level(P.level(), b), b);
        std::vector<std::vector<FieldElement>> cond; // cond[j][i], j < m
        if (m == 1) {
            std::vector<FieldElement> row(nm);
            for (int i = 0; i < nm; ++i) {
                int ax, ay, az;
                mono_exponents(d, i, ax, ay, az);
                FieldElement val = t.one(W);
                for (int e = 0; e < ax; ++e) val *= t.embed(P.x(), W);
                for (int e = 0; e < ay; ++e) val *= t.embed(P.y(), W);
                for (int e = 0; e < az; ++e) val *= t.embed(P.z(), W);
                row[i] = val;
            }
            cond.push_back(std::move(row));
        } else {
            BranchSeries br = local_expansion(P, C.f(), m);
            W = common_level(br.level, b);
            cond.assign(m, std::vector<FieldElement>(nm, t.zero(W)));
            for (int i = 0; i < nm; ++i) {
                // series of the i-th monomial along the branch
                int prec = br.prec;
                auto mulser = [&](const std::vector<FieldElement>& A,
                                  const std::vector<FieldElement>& B) {
                    std::vector<FieldElement> r(prec, t.zero(W));
                    for (int ii = 0; ii < prec; ++ii) {
                        if (A[ii].is_zero()) continue;
                        for (int jj = 0; ii + jj < prec; ++jj) r[ii + jj] += A[ii] * B[jj];
                    }
                    return r;
                };
                int ax, ay, az;
                mono_exponents(d, i, ax, ay, az);
                std::vector<FieldElement> acc(prec, t.zero(W));
                acc[0] = t.one(W);
                auto raise = [&](int v, int times) {
                    std::vector<FieldElement> base(prec, t.zero(W));
                    for (int j = 0; j < prec; ++j) base[j] = t.embed(br.xyz[v][j], W);
                    for (int e = 0; e < times; ++e) acc = mulser(acc, base);
                };
                raise(0, ax);
                raise(1, ay);
                raise(2, az);
                for (int j = 0; j < m; ++j) cond[j][i] = acc[j];
            }
        }
        for (auto& cj : cond) {
            // one level-W condition -> W rows over F_p
            std::vector<std::vector<u64>> block(W, std::vector<u64>(cols, 0));
            for (int i = 0; i < nm; ++i) {
                for (int s = 0; s < b; ++s) {
                    FieldElement prod = cj[i] * t.embed(basis[s], W);
                    for (int r = 0; r < W; ++r) block[r][i * b + s] = prod.coeff(r);
                }
            }
            for (auto& r : block) rows.push_back(std::move(r));
        }
    }

    // F_p nullspace
    int nr = (int)rows.size();
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < cols && rank < nr; ++c) {
        int piv = -1;
        for (int r = rank; r < nr; ++r)
            if (rows[r][c]) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        u64 inv = invmod(rows[rank][c], p);
        for (int cc = 0; cc < cols; ++cc) rows[rank][cc] = mulmod(rows[rank][cc], inv, p);
        for (int r = 0; r < nr; ++r) {
            if (r == rank || !rows[r][c]) continue;
            u64 f0 = rows[r][c];
            for (int cc = 0; cc < cols; ++cc)
                rows[r][cc] = submod(rows[r][cc], mulmod(f0, rows[rank][cc], p), p);
        }
        pivot_col.push_back(c);
        ++rank;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;

    Form best;
    bool have = false;
    for (int fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        std::vector<u64> v(cols, 0);
        v[fc] = 1;
        for (int r = 0; r < rank; ++r) {
            // pivot_col[r] solves to -rows[r][fc]
            v[pivot_col[r]] = rows[r][fc] ? p - rows[r][fc] : 0;
        }
        std::vector<FieldElement> lam(nm);
        for (int i = 0; i < nm; ++i) {
            std::vector<u64> cv(v.begin() + i * b, v.begin() + (i + 1) * b);
            lam[i] = t.make(b, cv);
        }
        Form cand(t, b, d, std::move(lam));
        if (cand.is_zero()) continue;
        cand = cand.normalized();
        if (!have) {
            best = cand;
            have = true;
        } else {
            for (int i = 0; i < nm; ++i) {
                int cc = cmp(cand.coeff(i), best.coeff(i));
                if (cc < 0) { best = cand; break; }
                if (cc > 0) break;
            }
        }
    }
    if (!have) fail(Errc::NoInterpolant, "empty interpolation space");
    return best;
}

// ---------------------------------------------------------- StandardCurve

bool StandardCurve::point_on_curve(const PlanePoint& p) const {
    return f_.eval(p.x(), p.y(), p.z()).is_zero();
}

void StandardCurve::finish_setup() {
    const FieldTower& t = f_.tower();
    fx_ = f_.partial(0);
    fy_ = f_.partial(1);
    fz_ = f_.partial(2);
    for (int j = 0; j <= 4; ++j) fz_ypoly_[j] = f_.y_coeff_poly(j);
    d_inf_ = EffectiveDivisor();
    d_inf_.add_point(p1_, 1);
    d_inf_.add_point(p2_, 1);
    d_inf_.add_point(p3_, 1);
    // projection centers off the curve, reused by every intersection
    BigInt idx = 0;
    BigInt maxi = BigInt(t.p()) * t.p() + t.p() + 1;
    while ((int)centers_.size() < 6 && idx < maxi) {
        auto c = nth_projective_point(t, idx);
        idx += 1;
        if (f_.eval(c[0], c[1], c[2]).is_zero()) continue;
        Center cd;
        cd.c = c;
        bool built = false;
        for (int i = 0; i < 3 && !built; ++i) {
            for (int j = 0; j < 3 && !built; ++j) {
                if (i == j) continue;
                for (int r = 0; r < 3; ++r) {
                    cd.M.m[r][0] = t.from_int(r == i ? 1 : 0);
                    cd.M.m[r][1] = c[r];
                    cd.M.m[r][2] = t.from_int(r == j ? 1 : 0);
                }
                if (!cd.M.det().is_zero()) built = true;
            }
        }
        if (!built) continue;
        cd.fM = f_.composed(cd.M);
        centers_.push_back(std::move(cd));
    }
}

namespace {

struct LineChoice {
    bool ok = false;
    Mat3 M;
    bool tangent = false;
};

// try the tangent at P: all four intersection points must be rational and a
// second distinct point must exist
LineChoice try_tangent_at(const Quartic& g, const PlanePoint& P) {
    LineChoice out;
    const FieldTower& t = g.tower();
    int b = g.level();
    FieldElement a0 = g.partial(0).eval(P.x(), P.y(), P.z());
    FieldElement a1 = g.partial(1).eval(P.x(), P.y(), P.z());
    FieldElement a2 = g.partial(2).eval(P.x(), P.y(), P.z());
    Form ell(t, b, 1, {a0, a1, a2});
    if (ell.is_zero()) fail(Errc::NotSmooth, "vanishing gradient");
    EffectiveDivisor D = intersect_line(g, ell);
    if (!D.fully_materialized()) return out;
    for (const auto& [pt, m] : D.points())
        if (b % pt.level() != 0) return out; // point not rational over the base
    // all rational; need a point distinct from P
    PlanePoint Q;
    bool haveq = false;
    for (const auto& [pt, m] : D.points()) {
        if (pt == P) continue;
        if (!haveq || cmp(pt, Q) < 0) {
            Q = pt;
            haveq = true;
        }
    }
    if (!haveq) return out; // hyperflex
    // M = [Q | P | e_i], first basis vector keeping it invertible
    for (int i = 0; i < 3; ++i) {
        Mat3 M;
        for (int r = 0; r < 3; ++r) {
            M.m[r][0] = t.embed(r == 0 ? Q.x() : (r == 1 ? Q.y() : Q.z()), b);
            M.m[r][1] = t.embed(r == 0 ? P.x() : (r == 1 ? P.y() : P.z()), b);
            M.m[r][2] = t.from_int(r == i ? 1 : 0, b);
        }
        if (!M.det().is_zero()) {
            out.ok = true;
            out.M = M;
            out.tangent = true;
            return out;
        }
    }
    return out;
}

} // namespace

StandardCurve StandardCurve::from_transform(const Quartic& g, const Mat3& M) {
    const FieldTower& t = g.tower();
    int b = g.level();
    StandardCurve C;
    C.g_ = g;
    C.M_ = M;
    C.f_ = g.composed(M);
    Form zline(t, b, 1, {t.zero(b), t.zero(b), t.one(b)});
    EffectiveDivisor zc = intersect_line(C.f_, zline);
    PlanePoint O = PlanePoint::make(t.zero(b), t.one(b), t.zero(b));
    PlanePoint E1 = PlanePoint::make(t.one(b), t.zero(b), t.zero(b));
    if (zc.multiplicity_of(O) >= 2) {
        C.tangent_found_ = true;
        C.p1_ = O;
        C.p2_ = O;
        C.p4_ = E1;
        EffectiveDivisor rest = zc;
        EffectiveDivisor used;
        used.add_point(O, 2);
        used.add_point(E1, 1);
        if (!rest.subtract(used) || rest.total_degree() != 1)
            fail(Errc::Internal, "transform does not standardize the curve");
        C.p3_ = rest.points()[0].first;
    } else {
        C.tangent_found_ = false;
        if ((int)zc.points().size() != 4 || zc.multiplicity_of(O) != 1 ||
            zc.multiplicity_of(E1) != 1)
            fail(Errc::Internal, "transform does not standardize the curve");
        std::vector<PlanePoint> others;
        for (const auto& [pt, m] : zc.points())
            if (!(pt == O) && !(pt == E1)) others.push_back(pt);
        C.p1_ = O;
        C.p2_ = others[0];
        C.p3_ = others[1];
        C.p4_ = E1;
    }
    C.finish_setup();
    return C;
}

StandardCurve StandardCurve::standardize(const Quartic& g) {
    if (g.degree() != 4) fail(Errc::BadInput, "quartic expected");
    if (g.is_zero()) fail(Errc::ZeroForm, "zero quartic");
    const FieldTower& t = g.tower();
    int b = g.level();
    if (!quartic_is_smooth(g)) fail(Errc::NotSmooth, "curve is singular");

    StandardCurve C;
    C.g_ = g;

    LineChoice choice;
    // rational points: x scan on the z = 1 chart, then the z = 0 chart
    BigInt q = boost::multiprecision::pow(BigInt(t.p()), (unsigned)b);
    Rng rootrng = engine_rng();
    for (BigInt xi = 0; xi < q && !choice.ok; ++xi) {
        FieldElement x = t.nth_element(b, xi);
        std::vector<FieldElement> yc(5);
        for (int j = 0; j <= 4; ++j) yc[j] = g.y_coeff_poly(j).eval(x);
        UniPoly U(t, b, std::move(yc));
        if (U.is_zero()) continue;
        for (const auto& y : find_roots(U, b, rootrng)) {
            choice = try_tangent_at(g, PlanePoint::make(x, y, t.one(b)));
            if (choice.ok) break;
        }
    }
    if (!choice.ok) {
        // z = 0 chart: (x:1:0) then (1:0:0)
        std::vector<FieldElement> xc(5);
        for (int i = 0; i <= 4; ++i) xc[i] = g.coeff(i, 4 - i);
        UniPoly U(t, b, std::move(xc));
        if (!U.is_zero()) {
            for (const auto& x : find_roots(U, b, rootrng)) {
                choice = try_tangent_at(g, PlanePoint::make(x, t.one(b), t.zero(b)));
                if (choice.ok) break;
            }
        }
        if (!choice.ok && g.coeff(4, 0).is_zero())
            choice = try_tangent_at(g, PlanePoint::make(t.one(b), t.zero(b), t.zero(b)));
    }

    if (!choice.ok) {
        // fallback: any line with four distinct rational intersection points
        BigInt lines = BigInt(t.p()) * t.p() + t.p() + 1;
        for (BigInt li = 0; li < lines && !choice.ok; ++li) {
            auto lc = nth_projective_point(t, li);
            Form ell(t, b, 1, {t.embed(lc[0], b), t.embed(lc[1], b), t.embed(lc[2], b)});
            EffectiveDivisor D = intersect_line(g, ell);
            if (!D.fully_materialized()) continue;
            if ((int)D.points().size() != 4) continue;
            bool rational = true;
            for (const auto& [pt, m] : D.points())
                if (b % pt.level() != 0 || m != 1) { rational = false; break; }
            if (!rational) continue;
            // sorted canonical: first -> (0:1:0), last -> (1:0:0)
            const PlanePoint& Pa = D.points()[0].first;
            const PlanePoint& Pb = D.points()[3].first;
            for (int i = 0; i < 3 && !choice.ok; ++i) {
                Mat3 M;
                for (int r = 0; r < 3; ++r) {
                    M.m[r][0] = t.embed(r == 0 ? Pb.x() : (r == 1 ? Pb.y() : Pb.z()), b);
                    M.m[r][1] = t.embed(r == 0 ? Pa.x() : (r == 1 ? Pa.y() : Pa.z()), b);
                    M.m[r][2] = t.from_int(r == i ? 1 : 0, b);
                }
                if (!M.det().is_zero()) {
                    choice.ok = true;
                    choice.M = M;
                    choice.tangent = false;
                }
            }
        }
    }
    if (!choice.ok) fail(Errc::NoRationalLine, "no usable rational line");

    C.M_ = choice.M;
    C.f_ = g.composed(choice.M);
    C.tangent_found_ = choice.tangent;

    // read the distinguished points off z . C in the new coordinates
    Form zline(t, b, 1, {t.zero(b), t.zero(b), t.one(b)});
    EffectiveDivisor zc = intersect_line(C.f_, zline);
    PlanePoint O = PlanePoint::make(t.zero(b), t.one(b), t.zero(b));
    PlanePoint E1 = PlanePoint::make(t.one(b), t.zero(b), t.zero(b));
    if (choice.tangent) {
        C.p1_ = O;
        C.p2_ = O;
        C.p4_ = E1;
        EffectiveDivisor rest = zc;
        EffectiveDivisor used;
        used.add_point(O, 2);
        used.add_point(E1, 1);
        if (!rest.subtract(used) || rest.total_degree() != 1)
            fail(Errc::Internal, "standardization shape check failed");
        C.p3_ = rest.points()[0].first;
    } else {
        if ((int)zc.points().size() != 4) fail(Errc::Internal, "fallback line shape check failed");
        // O and E1 are intersection points by construction
        std::vector<PlanePoint> others;
        for (const auto& [pt, m] : zc.points()) {
            if (pt == O || pt == E1) continue;
            others.push_back(pt);
        }
        if (others.size() != 2) fail(Errc::Internal, "fallback line points missing");
        C.p1_ = O;
        C.p2_ = others[0];
        C.p3_ = others[1];
        C.p4_ = E1;
    }
    C.finish_setup();
    return C;
}

} // namespace quartic
