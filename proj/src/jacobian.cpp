#include "quartic/jacobian.hpp"

#include <algorithm>

namespace quartic {

namespace {

Rng det_rng() { return Rng(0xd1715045ULL); } // sort-canonical outputs only

bool all_affine(const std::vector<PlanePoint>& pts) {
    for (const auto& p : pts) {
        const FieldTower& t = *p.x().tower();
        if (!(p.z() == t.one(p.z().level()))) return false;
    }
    return true;
}

bool points_typical(const std::vector<PlanePoint>& pts) {
    if (pts.size() != 3) return false;
    if (!all_affine(pts)) return false;
    const FieldTower& t = *pts[0].x().tower();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (pts[i] == pts[j]) return false;
            if (pts[i].x() == pts[j].x()) return false;
        }
    // non-collinear: det of homogeneous coordinates
    int lvl = 1;
    for (const auto& p : pts) lvl = common_level(lvl, p.level());
    auto at = [&](int i, int v) {
        const PlanePoint& p = pts[i];
        return t.embed(v == 0 ? p.x() : (v == 1 ? p.y() : p.z()), lvl);
    };
    FieldElement det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                       at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                       at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    return !det.is_zero();
}

bool multiset_frobenius_stable(const std::vector<PlanePoint>& pts, int e) {
    std::vector<PlanePoint> img;
    img.reserve(pts.size());
    for (const auto& p : pts) img.push_back(p.frobenius(e));
    std::sort(img.begin(), img.end(), [](const PlanePoint& a, const PlanePoint& b) {
        return cmp(a, b) < 0;
    });
    std::vector<PlanePoint> orig = pts;
    std::sort(orig.begin(), orig.end(), [](const PlanePoint& a, const PlanePoint& b) {
        return cmp(a, b) < 0;
    });
    for (size_t i = 0; i < pts.size(); ++i)
        if (!(img[i] == orig[i])) return false;
    return true;
}

bool typical_check(const JacobianContext& ctx, const UniPoly& u, const UniPoly& v,
                   std::string* why = nullptr) {
    if (u.degree() != 3) { if (why) *why = "deg u"; return false; }
    if (v.degree() != 2) { if (why) *why = "deg v"; return false; }
    if (poly_gcd(u, u.derivative()).degree() != 0) { if (why) *why = "u not squarefree"; return false; }
    // on curve: f(X, v(X), 1) = 0 mod u
    const StandardCurve& C = ctx.curve();
    int b = ctx.base_level();
    UniPoly acc(ctx.tower(), b);
    UniPoly vm = poly_mod(v, u);
    UniPoly vpow = UniPoly::from_ints(ctx.tower(), b, {1});
    for (int j = 0; j <= 4; ++j) {
        UniPoly aj = C.affine_y_coeff(j).promoted(b);
        acc = poly_mod(acc + aj * vpow, u);
        if (j < 4) vpow = poly_mod(vpow * vm, u);
    }
    if (!acc.is_zero()) { if (why) *why = "points off curve"; return false; }
    return true;
}

} // namespace

// ----------------------------------------------------------------- divisors

TypicalDivisor::TypicalDivisor(const JacobianContext& ctx, UniPoly u, UniPoly v)
    : u_(std::move(u)), v_(std::move(v)) {
    int b = ctx.base_level();
    u_ = u_.promoted(b).monic();
    v_ = poly_mod(v_.promoted(b), u_);
    std::string why;
    if (!typical_check(ctx, u_, v_, &why)) fail(Errc::BadInput, "not a typical divisor: " + why);
}

AtypicalDivisor::AtypicalDivisor(const JacobianContext& ctx, std::vector<PlanePoint> pts)
    : pts_(std::move(pts)) {
    if (pts_.size() != 3) fail(Errc::BadInput, "atypical support must have three points");
    std::sort(pts_.begin(), pts_.end(),
              [](const PlanePoint& a, const PlanePoint& b) { return cmp(a, b) < 0; });
    for (const auto& p : pts_)
        if (!ctx.curve().point_on_curve(p)) fail(Errc::PointNotOnCurve, "support point off curve");
    if (!multiset_frobenius_stable(pts_, ctx.base_level()))
        fail(Errc::BadInput, "support not Frobenius-stable");
    if (points_typical(pts_)) fail(Errc::BadInput, "typical support stored atypically");
}

bool AtypicalDivisor::operator==(const AtypicalDivisor& o) const {
    if (pts_.size() != o.pts_.size()) return false;
    for (size_t i = 0; i < pts_.size(); ++i)
        if (!(pts_[i] == o.pts_[i])) return false;
    return true;
}

DivisorClass::DivisorClass(const JacobianContext& ctx, TypicalDivisor d)
    : ctx_(&ctx), rep_(std::move(d)) {}

DivisorClass::DivisorClass(const JacobianContext& ctx, AtypicalDivisor d)
    : ctx_(&ctx), rep_(std::move(d)) {}

// ------------------------------------------------------------------ context

std::shared_ptr<JacobianContext> JacobianContext::create(
    std::shared_ptr<const FieldTower> tower, const std::vector<int64_t>& curve, int base_level) {
    if (base_level != 1 && base_level != 2) fail(Errc::BadInput, "base level must be 1 or 2");
    if (curve.size() != 15) fail(Errc::BadInput, "quartic needs 15 coefficients");
    auto ctx = std::shared_ptr<JacobianContext>(new JacobianContext());
    ctx->tower_ = tower;
    ctx->base_ = base_level;
    const FieldTower& t = *tower;
    Quartic g = Form::from_ints(t, base_level, 4, curve);
    if (base_level == 1) {
        ctx->curve_ = StandardCurve::standardize(g);
    } else {
        // prefer a transform found over F_p: Frobenius then acts
        // coefficientwise on the standardized model
        bool reused = false;
        try {
            Quartic g1 = Form::from_ints(t, 1, 4, curve);
            StandardCurve s1 = StandardCurve::standardize(g1);
            if (s1.tangent_found()) {
                Mat3 M2;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) M2.m[i][j] = t.embed(s1.change_of_basis().m[i][j], 2);
                ctx->curve_ = StandardCurve::from_transform(g, M2);
                reused = true;
            }
        } catch (const Error& e) {
            if (e.code() == Errc::NotSmooth) throw;
        }
        if (!reused) ctx->curve_ = StandardCurve::standardize(g);
    }
    ctx->f_over_fp_ = true;
    for (const auto& c : ctx->curve_.f().coeffs())
        if (t.degree(c) != 1) { ctx->f_over_fp_ = false; break; }
    if (base_level == 2) {
        // basis element of F_{q^2} over F_q inside level 12: sqrt of the
        // first non-square of F_{p^2}
        Rng rng = det_rng();
        for (BigInt i = 1;; ++i) {
            FieldElement n = t.nth_element(2, i);
            if (n.is_zero()) continue;
            UniPoly q2(t, 2, {-n, t.zero(2), t.one(2)});
            Rng r2 = det_rng();
            if (!find_roots(q2, 2, r2).empty()) continue;
            Rng r3 = det_rng();
            auto roots = find_roots(q2, 12, r3);
            if (roots.empty()) fail(Errc::Internal, "quadratic basis root not found");
            ctx->quad_w_ = t.embed(roots[0], 12);
            break;
        }
    }
    ctx->identity_hash_ = hash_class(identity(*ctx));
    return ctx;
}

DivisorClass identity(const JacobianContext& ctx) {
    const StandardCurve& C = ctx.curve();
    std::vector<PlanePoint> pts = {C.P1_inf(), C.P2_inf(), C.P3_inf()};
    return DivisorClass(ctx, AtypicalDivisor(ctx, std::move(pts)));
}

bool is_identity(const DivisorClass& d) {
    if (d.is_typical()) return false;
    return hash_class(d) == d.ctx().identity_hash();
}

std::vector<PlanePoint> support_points(const DivisorClass& d) {
    const JacobianContext& ctx = d.ctx();
    if (!d.is_typical()) return d.atypical().points();
    const FieldTower& t = ctx.tower();
    Rng rng = det_rng();
    auto roots = find_roots(d.typical().u(), ctx.point_level(), rng);
    if ((int)roots.size() != 3) fail(Errc::Internal, "u must split at the point level");
    std::vector<PlanePoint> pts;
    for (const auto& x : roots) {
        FieldElement y = d.typical().v().eval(x);
        pts.push_back(PlanePoint::make(x, y, t.one(x.level())));
    }
    return pts;
}

DivisorClass divisor_from_points(const JacobianContext& ctx, std::vector<PlanePoint> pts) {
    if (pts.size() != 3) fail(Errc::BadInput, "divisor support must have three points");
    std::sort(pts.begin(), pts.end(),
              [](const PlanePoint& a, const PlanePoint& b) { return cmp(a, b) < 0; });
    if (!multiset_frobenius_stable(pts, ctx.base_level()))
        fail(Errc::BadInput, "support not Frobenius-stable over the base");
    if (points_typical(pts)) {
        const FieldTower& t = ctx.tower();
        int b = ctx.base_level();
        int pl = ctx.point_level();
        // u from the x-coordinates, v by interpolation
        UniPoly u = UniPoly::from_ints(t, pl, {1});
        std::vector<FieldElement> xs, ys;
        for (const auto& p : pts) {
            FieldElement x = t.embed(p.x(), pl), y = t.embed(p.y(), pl);
            u = u * UniPoly(t, pl, {-x, t.one(pl)});
            xs.push_back(x);
            ys.push_back(y);
        }
        UniPoly v = lagrange(t, pl, xs, ys);
        std::vector<FieldElement> uc, vc;
        for (int i = 0; i <= 3; ++i) {
            auto c = t.compress(u.coeff(i), b);
            if (!c) fail(Errc::Internal, "u coefficients outside the base field");
            uc.push_back(*c);
        }
        for (int i = 0; i <= 2; ++i) {
            auto c = t.compress(v.coeff(i), b);
            if (!c) fail(Errc::Internal, "v coefficients outside the base field");
            vc.push_back(*c);
        }
        return DivisorClass(ctx, TypicalDivisor(ctx, UniPoly(t, b, uc), UniPoly(t, b, vc)));
    }
    return DivisorClass(ctx, AtypicalDivisor(ctx, std::move(pts)));
}

// ---------------------------------------------------------------- naive add

namespace {

EffectiveDivisor support_divisor(const DivisorClass& d) {
    EffectiveDivisor D;
    for (const auto& p : support_points(d)) D.add_point(p, 1);
    return D;
}

std::vector<PlanePoint> expand_points(const EffectiveDivisor& D) {
    std::vector<PlanePoint> out;
    for (const auto& [p, m] : D.points())
        for (int i = 0; i < m; ++i) out.push_back(p);
    return out;
}

DivisorClass naive_add_supports(const JacobianContext& ctx, const EffectiveDivisor& A,
                                const EffectiveDivisor& B) {
    const StandardCurve& C = ctx.curve();
    EffectiveDivisor S1 = A;
    S1.merge(B);
    S1.add_point(C.P1_inf(), 1);
    S1.add_point(C.P2_inf(), 1);
    S1.add_point(C.P4_inf(), 1);
    Form K = interpolate(S1, 3, C);
    EffectiveDivisor KC = intersection_divisor(K, C);
    if (!KC.subtract(S1) || KC.total_degree() != 3 || !KC.fully_materialized())
        fail(Errc::Internal, "cubic interpolation postcondition failed");
    EffectiveDivisor S2 = KC;
    S2.add_point(C.P1_inf(), 1);
    S2.add_point(C.P2_inf(), 1);
    Form Q = interpolate(S2, 2, C);
    EffectiveDivisor QC = intersection_divisor(Q, C);
    if (!QC.subtract(S2) || QC.total_degree() != 3 || !QC.fully_materialized())
        fail(Errc::Internal, "conic interpolation postcondition failed");
    return divisor_from_points(ctx, expand_points(QC));
}

} // namespace

DivisorClass naive_add(const DivisorClass& a, const DivisorClass& b) {
    const JacobianContext& ctx = a.ctx();
    if (!a.is_typical() && is_identity(a)) return b;
    if (!b.is_typical() && is_identity(b)) return a;
    return naive_add_supports(ctx, support_divisor(a), support_divisor(b));
}

DivisorClass negate(const DivisorClass& d) {
    const JacobianContext& ctx = d.ctx();
    const StandardCurve& C = ctx.curve();
    if (!d.is_typical() && is_identity(d)) return d;
    EffectiveDivisor S = support_divisor(d);
    S.add_point(C.P4_inf(), 2);
    Form Q = interpolate(S, 2, C);
    EffectiveDivisor QC = intersection_divisor(Q, C);
    if (!QC.subtract(S) || QC.total_degree() != 3 || !QC.fully_materialized())
        fail(Errc::Internal, "negation interpolation postcondition failed");
    return divisor_from_points(ctx, expand_points(QC));
}

// -------------------------------------------------------------- typical add

std::optional<TypicalDivisor> typical_add(const JacobianContext& ctx, const TypicalDivisor& A,
                                          const TypicalDivisor& B) {
    if (!ctx.curve().tangent_found()) return std::nullopt;
    const FieldTower& t = ctx.tower();
    int b = ctx.base_level();
    const UniPoly &u1 = A.u(), &v1 = A.v(), &u2 = B.u(), &v2 = B.v();
    bool doubling = (u1 == u2 && v1 == v2);
    if (!doubling && poly_gcd(u1, u2).degree() != 0) return std::nullopt;

    const StandardCurve& C = ctx.curve();
    std::array<UniPoly, 5> a; // y^j coefficients of f(x, y, 1)
    for (int j = 0; j <= 4; ++j) a[j] = C.affine_y_coeff(j).promoted(b);
    // standardization forces deg_y = 3 with a constant leading coefficient
    if (a[4].degree() >= 0 || a[3].degree() != 0) return std::nullopt;

    // cubic K_z = k8 y^2 + (k2 x^2 + k5 x + k9) y + (k3 x^2 + k6 x + k10),
    // k8 normalized to 1; six conditions over the base field
    UniPoly x1 = UniPoly::from_ints(t, b, {0, 1});
    auto mkrows = [&](const UniPoly& u, const UniPoly& v,
                      std::vector<std::array<FieldElement, 8>>& rows, bool second_order) {
        UniPoly vm = poly_mod(v, u);
        UniPoly x = poly_mod(x1, u);
        UniPoly xx = poly_mod(x1 * x1, u);
        UniPoly one = UniPoly::from_ints(t, b, {1});
        // order of unknowns: [k8, k2, k5, k9, k3, k6, k10]
        std::array<UniPoly, 7> g;
        g[0] = poly_mod(vm * vm, u);
        g[1] = poly_mod(xx * vm, u);
        g[2] = poly_mod(x * vm, u);
        g[3] = vm;
        g[4] = xx;
        g[5] = x;
        g[6] = one;
        if (second_order) {
            // tangency along the curve: d/dt K(x(t), y(t)) with y' = -f_x/f_y
            UniPoly fx(t, b), fy(t, b);
            UniPoly vpow = UniPoly::from_ints(t, b, {1});
            for (int j = 0; j <= 3; ++j) {
                fx = poly_mod(fx + C.fx().y_coeff_poly(j).promoted(b) * vpow, u);
                if (j < 3) vpow = poly_mod(vpow * vm, u);
            }
            vpow = UniPoly::from_ints(t, b, {1});
            for (int j = 0; j <= 3; ++j) {
                fy = poly_mod(fy + C.fy().y_coeff_poly(j).promoted(b) * vpow, u);
                if (j < 3) vpow = poly_mod(vpow * vm, u);
            }
            // s = -fx / fy mod u
            UniPoly g0 = poly_gcd(fy, u);
            if (g0.degree() != 0) return false; // f_y not invertible mod u
            // invert fy mod u by extended Euclid through poly ops
            UniPoly r0 = u, r1 = poly_mod(fy, u);
            UniPoly t0(t, b), t1 = UniPoly::from_ints(t, b, {1});
            while (r1.degree() > 0) {
                auto [q, r2] = poly_divmod(r0, r1);
                UniPoly t2 = t0 - q * t1;
                r0 = r1;
                r1 = r2;
                t0 = t1;
                t1 = poly_mod(t2, u);
            }
            if (r1.is_zero()) return false;
            UniPoly fyinv = t1 * r1.coeff(0).inverse();
            UniPoly s = poly_mod((UniPoly(t, b) - fx) * fyinv, u);
            std::array<UniPoly, 7> h;
            h[0] = poly_mod(s * vm * t.from_int(2, b), u);
            h[1] = poly_mod(x * vm * t.from_int(2, b) + s * xx, u);
            h[2] = poly_mod(vm + s * x, u);
            h[3] = s;
            h[4] = poly_mod(x * t.from_int(2, b), u);
            h[5] = one;
            h[6] = UniPoly(t, b);
            for (int r = 0; r < 3; ++r) {
                std::array<FieldElement, 8> row;
                for (int c = 0; c < 7; ++c) row[c] = g[c].coeff(r);
                row[7] = t.zero(b);
                rows.push_back(row);
            }
            for (int r = 0; r < 3; ++r) {
                std::array<FieldElement, 8> row;
                for (int c = 0; c < 7; ++c) row[c] = h[c].coeff(r);
                row[7] = t.zero(b);
                rows.push_back(row);
            }
            return true;
        }
        for (int r = 0; r < 3; ++r) {
            std::array<FieldElement, 8> row;
            for (int c = 0; c < 7; ++c) row[c] = g[c].coeff(r);
            row[7] = t.zero(b);
            rows.push_back(row);
        }
        return true;
    };

    std::vector<std::array<FieldElement, 8>> rows;
    if (doubling) {
        if (!mkrows(u1, v1, rows, true)) return std::nullopt;
    } else {
        if (!mkrows(u1, v1, rows, false)) return std::nullopt;
        if (!mkrows(u2, v2, rows, false)) return std::nullopt;
    }
    if (rows.size() != 6) return std::nullopt;

    // k8 = 1: move its column to the right-hand side and solve 6x6
    std::vector<std::array<FieldElement, 7>> M(6);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) M[r][c] = rows[r][c + 1];
        M[r][6] = -rows[r][0];
    }
    for (int c = 0; c < 6; ++c) {
        int piv = -1;
        for (int r = c; r < 6; ++r)
            if (!M[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) return std::nullopt; // no unique solution: fall back
        std::swap(M[c], M[piv]);
        FieldElement inv = M[c][c].inverse();
        for (int cc = c; cc < 7; ++cc) M[c][cc] = M[c][cc] * inv;
        for (int r = 0; r < 6; ++r) {
            if (r == c || M[r][c].is_zero()) continue;
            FieldElement f0 = M[r][c];
            for (int cc = c; cc < 7; ++cc) M[r][cc] -= f0 * M[c][cc];
        }
    }
    FieldElement k2 = M[0][6], k5 = M[1][6], k9 = M[2][6];
    FieldElement k3 = M[3][6], k6 = M[4][6], k10 = M[5][6];
    UniPoly bpol(t, b, {k9, k5, k2});
    UniPoly cpol(t, b, {k10, k6, k3});

    // f mod K in y: alpha y + beta with y^2 = -b y - c on K
    // y^3 = (b^2 - c) y + b c
    UniPoly b2c = bpol * bpol - cpol;
    UniPoly alpha = a[3] * b2c - a[2] * bpol + a[1];
    UniPoly beta = a[3] * (bpol * cpol) - a[2] * cpol + a[0];
    // Res_y(f, K) = alpha^2 c - alpha beta b + beta^2
    UniPoly R = alpha * alpha * cpol - alpha * beta * bpol + beta * beta;
    if (R.degree() != 9) return std::nullopt;
    UniPoly denom = doubling ? u1 * u1 : u1 * u2;
    auto [q3, rem3] = poly_divmod(R, denom);
    if (!rem3.is_zero() || q3.degree() != 3) return std::nullopt;
    UniPoly u3 = q3.monic();
    if (poly_gcd(u3, u3.derivative()).degree() != 0) return std::nullopt;

    // v3 = -beta / alpha mod u3
    {
        UniPoly g0 = poly_gcd(alpha, u3);
        if (g0.degree() != 0) return std::nullopt;
    }
    UniPoly r0 = u3, r1 = poly_mod(alpha, u3);
    UniPoly t0(t, b), t1 = UniPoly::from_ints(t, b, {1});
    while (r1.degree() > 0) {
        auto [q, r2] = poly_divmod(r0, r1);
        UniPoly t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = poly_mod(t2, u3);
    }
    if (r1.is_zero()) return std::nullopt;
    UniPoly alphainv = t1 * r1.coeff(0).inverse();
    UniPoly v3 = poly_mod((UniPoly(t, b) - beta) * alphainv, u3);
    if (v3.degree() != 2) return std::nullopt;
    // residual of the conic y = v3(x): f(x, v3(x)) = u3 * u4
    UniPoly Apol(t, b);
    UniPoly vpow = UniPoly::from_ints(t, b, {1});
    for (int j = 0; j <= 3; ++j) {
        Apol = Apol + a[j] * vpow;
        if (j < 3) vpow = vpow * v3;
    }
    if (Apol.degree() != 6) return std::nullopt;
    auto [u4q, rem4] = poly_divmod(Apol, u3);
    if (!rem4.is_zero() || u4q.degree() != 3) return std::nullopt;
    UniPoly u4 = u4q.monic();
    UniPoly v4 = poly_mod(v3, u4);
    if (v4.degree() != 2) return std::nullopt;
    if (poly_gcd(u4, u4.derivative()).degree() != 0) return std::nullopt;
    if (!typical_check(ctx, u4, v4)) return std::nullopt;
    return TypicalDivisor(ctx, u4, v4);
}

DivisorClass hybrid_add(const DivisorClass& a, const DivisorClass& b) {
    const JacobianContext& ctx = a.ctx();
    ctx.count_op();
    if (!a.is_typical() && is_identity(a)) return b;
    if (!b.is_typical() && is_identity(b)) return a;
    if (a.is_typical() && b.is_typical()) {
        auto r = typical_add(ctx, a.typical(), b.typical());
        if (r) return DivisorClass(ctx, std::move(*r));
    }
    return naive_add_supports(ctx, support_divisor(a), support_divisor(b));
}

DivisorClass scalar_mul(const BigInt& n, const DivisorClass& d) {
    const JacobianContext& ctx = d.ctx();
    if (n == 0) return identity(ctx);
    BigInt m = n;
    DivisorClass base = d;
    if (m < 0) {
        base = negate(d);
        m = -m;
    }
    int bits = (int)msb(m);
    DivisorClass acc = base;
    for (int i = bits - 1; i >= 0; --i) {
        acc = hybrid_add(acc, acc);
        if (bit_test(m, (unsigned)i)) acc = hybrid_add(acc, base);
    }
    return acc;
}

// --------------------------------------------------------------------- hash

namespace {

Form line_through(const JacobianContext& ctx, const std::vector<PlanePoint>& pts,
                  bool& collinear) {
    const FieldTower& t = ctx.tower();
    const StandardCurve& C = ctx.curve();
    collinear = false;
    const PlanePoint *dbl = nullptr, *single = nullptr;
    if (pts[0] == pts[1] && pts[1] == pts[2]) {
        // triple point: collinear iff the tangent meets with multiplicity 3
        Form ell = tangent_line_at(pts[0], C);
        BranchSeries br = local_expansion(pts[0], C, 3);
        if (br.valuation(ell) >= 3) {
            collinear = true;
            return ell;
        }
        return ell;
    }
    if (pts[0] == pts[1]) { dbl = &pts[0]; single = &pts[2]; }
    else if (pts[1] == pts[2]) { dbl = &pts[1]; single = &pts[0]; }
    if (dbl) {
        // doubled point: the only candidate line is its tangent
        Form ell = tangent_line_at(*dbl, C);
        int lvl = common_level(ell.level(), single->level());
        if (ell.eval(t.embed(single->x(), lvl), t.embed(single->y(), lvl),
                     t.embed(single->z(), lvl)).is_zero()) {
            collinear = true;
            return ell;
        }
        return ell;
    }
    // three distinct points: cross product line through the first two
    int lvl = 1;
    for (const auto& p : pts) lvl = common_level(lvl, p.level());
    auto at = [&](int i, int v) {
        const PlanePoint& p = pts[i];
        return t.embed(v == 0 ? p.x() : (v == 1 ? p.y() : p.z()), lvl);
    };
    FieldElement la = at(0, 1) * at(1, 2) - at(0, 2) * at(1, 1);
    FieldElement lb = at(0, 2) * at(1, 0) - at(0, 0) * at(1, 2);
    FieldElement lc = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    Form ell(t, lvl, 1, {la, lb, lc});
    if (ell.eval(at(2, 0), at(2, 1), at(2, 2)).is_zero()) collinear = true;
    return ell;
}

Form canonical_line(const FieldTower& t, const Form& ell) {
    Form n = ell.normalized();
    FieldElement a = t.canonical(n.coeff(0));
    FieldElement b = t.canonical(n.coeff(1));
    FieldElement c = t.canonical(n.coeff(2));
    int lvl = common_level(common_level(a.level(), b.level()), c.level());
    return Form(t, lvl, 1, {a, b, c});
}

} // namespace

std::string hash_class(const DivisorClass& d) {
    std::string out;
    if (d.is_typical()) {
        out.push_back('\x01');
        for (int i = 0; i <= 2; ++i) d.typical().u().coeff(i).append_bytes(out);
        for (int i = 0; i <= 2; ++i) d.typical().v().coeff(i).append_bytes(out);
        return out;
    }
    const JacobianContext& ctx = d.ctx();
    const auto& pts = d.atypical().points();
    bool collinear = false;
    Form ell = line_through(ctx, pts, collinear);
    if (!collinear) {
        out.push_back('\x02');
        for (const auto& p : pts) p.append_bytes(out);
        return out;
    }
    Form cl = canonical_line(ctx.tower(), ell);
    EffectiveDivisor D = intersect_line(ctx.curve().f(), cl);
    EffectiveDivisor sup;
    for (const auto& p : pts) sup.add_point(p, 1);
    if (!D.subtract(sup) || D.total_degree() != 1 || !D.fully_materialized())
        fail(Errc::Internal, "collinear hash: fourth point extraction failed");
    out.push_back('\x03');
    D.points()[0].first.append_bytes(out);
    return out;
}

// ------------------------------------------------------------ random points

PlanePoint random_curve_point(const JacobianContext& ctx, int orbit, Rng& rng) {
    const FieldTower& t = ctx.tower();
    const StandardCurve& C = ctx.curve();
    int b = ctx.base_level();
    int absdeg = b * orbit;
    int lvl = level_for_degree(absdeg);
    for (;;) {
        FieldElement x;
        if (lvl == absdeg) {
            x = t.random(lvl, rng);
        } else {
            // proper subfield F_{q^2} of the level-12 field (base 2, orbit 2)
            FieldElement r0 = t.embed(t.random(b, rng), lvl);
            FieldElement r1 = t.embed(t.random(b, rng), lvl);
            x = r0 + r1 * ctx.quadratic_basis();
        }
        std::vector<FieldElement> yc(5);
        for (int j = 0; j <= 4; ++j) yc[j] = C.affine_y_coeff(j).eval(x);
        UniPoly U(t, lvl, std::move(yc));
        if (U.is_zero()) continue;
        auto roots = find_roots(U, lvl, rng);
        std::vector<PlanePoint> cands;
        for (const auto& y : roots) {
            if (!(t.frobenius(y, absdeg) == y)) continue;
            PlanePoint P = PlanePoint::make(x, y, t.one(lvl));
            if (orbit > 1 && P.frobenius(b) == P) continue; // orbit too small
            cands.push_back(P);
        }
        if (cands.empty()) continue;
        // dedupe (roots are distinct, but canonicalization could collide)
        return cands[(size_t)rng.below(cands.size())];
    }
}

DivisorClass random_divisor(const JacobianContext& ctx, Rng& rng) {
    int b = ctx.base_level();
    u64 branch = rng.below(6);
    std::vector<PlanePoint> pts;
    if (branch < 3) {
        PlanePoint P = random_curve_point(ctx, 2, rng);
        pts = {P, P.frobenius(b), random_curve_point(ctx, 1, rng)};
    } else if (branch < 5) {
        PlanePoint P = random_curve_point(ctx, 3, rng);
        pts = {P, P.frobenius(b), P.frobenius(2 * b)};
    } else {
        pts = {random_curve_point(ctx, 1, rng), random_curve_point(ctx, 1, rng),
               random_curve_point(ctx, 1, rng)};
    }
    return divisor_from_points(ctx, std::move(pts));
}

// --------------------------------------------------- base image / Frobenius

DivisorClass frobenius_class(const DivisorClass& d, int e) {
    const JacobianContext& ctx = d.ctx();
    const FieldTower& t = ctx.tower();
    if (ctx.curve_defined_over_prime_field()) {
        if (d.is_typical()) {
            std::vector<FieldElement> uc, vc;
            for (int i = 0; i <= 3; ++i) uc.push_back(t.frobenius(d.typical().u().coeff(i), e));
            for (int i = 0; i <= 2; ++i) vc.push_back(t.frobenius(d.typical().v().coeff(i), e));
            return DivisorClass(
                ctx, TypicalDivisor(ctx, UniPoly(t, ctx.base_level(), uc),
                                    UniPoly(t, ctx.base_level(), vc)));
        }
        std::vector<PlanePoint> pts;
        for (const auto& p : d.atypical().points()) pts.push_back(p.frobenius(e));
        return divisor_from_points(ctx, std::move(pts));
    }
    // transport p-power Frobenius through the change of basis
    const Mat3& M = ctx.curve().change_of_basis();
    Mat3 Minv = M.inverse();
    std::vector<PlanePoint> pts = support_points(d);
    for (int step = 0; step < e; ++step) {
        for (auto& p : pts) {
            int lvl = common_level(p.level(), ctx.base_level());
            auto w = M.apply({t.embed(p.x(), lvl), t.embed(p.y(), lvl), t.embed(p.z(), lvl)});
            for (auto& coord : w) coord = t.frobenius(coord, 1);
            auto back = Minv.apply(w);
            p = PlanePoint::make(back[0], back[1], back[2]);
        }
    }
    return divisor_from_points(ctx, std::move(pts));
}

bool is_in_base_image(const DivisorClass& d) {
    const JacobianContext& ctx = d.ctx();
    if (ctx.base_level() != 2) fail(Errc::BadInput, "base image test needs a level-2 context");
    const FieldTower& t = ctx.tower();
    if (d.is_typical() && ctx.curve_defined_over_prime_field()) {
        for (int i = 0; i <= 3; ++i)
            if (t.degree(d.typical().u().coeff(i)) != 1) return false;
        for (int i = 0; i <= 2; ++i)
            if (t.degree(d.typical().v().coeff(i)) != 1) return false;
        return true;
    }
    DivisorClass ds = frobenius_class(d, 1);
    if (!d.is_typical() && !ds.is_typical()) {
        // same multiset is enough except in the collinear case
        bool col = false;
        Form ell = line_through(ctx, d.atypical().points(), col);
        (void)ell;
        if (!col) return d.atypical() == ds.atypical();
    }
    return hash_class(d) == hash_class(ds);
}

// ------------------------------------------------------------ serialization

std::string serialize(const DivisorClass& d) {
    std::string out;
    if (d.is_typical()) {
        out.push_back('\x01');
        out.push_back((char)d.ctx().base_level());
        for (int i = 0; i <= 2; ++i) d.typical().u().coeff(i).append_bytes(out);
        for (int i = 0; i <= 2; ++i) d.typical().v().coeff(i).append_bytes(out);
    } else {
        out.push_back('\x02');
        out.push_back((char)d.ctx().base_level());
        for (const auto& p : d.atypical().points()) p.append_bytes(out);
    }
    return out;
}

namespace {

FieldElement read_element(const FieldTower& t, const std::string& s, size_t& off) {
    if (off >= s.size()) fail(Errc::BadInput, "truncated divisor encoding");
    int lvl = (int)(unsigned char)s[off++];
    if (!is_tower_level(lvl)) fail(Errc::BadInput, "bad level byte");
    if (off + 8 * (size_t)lvl > s.size()) fail(Errc::BadInput, "truncated divisor encoding");
    std::vector<u64> c(lvl, 0);
    for (int i = 0; i < lvl; ++i) {
        u64 v = 0;
        for (int bte = 0; bte < 8; ++bte) v |= (u64)(unsigned char)s[off++] << (8 * bte);
        if (v >= t.p()) fail(Errc::BadInput, "coefficient not reduced");
        c[i] = v;
    }
    return t.make(lvl, c);
}

} // namespace

DivisorClass deserialize(const JacobianContext& ctx, const std::string& s) {
    const FieldTower& t = ctx.tower();
    if (s.size() < 2) fail(Errc::BadInput, "truncated divisor encoding");
    char tag = s[0];
    int b = (int)(unsigned char)s[1];
    if (b != ctx.base_level()) fail(Errc::BadInput, "context base mismatch");
    size_t off = 2;
    if (tag == '\x01') {
        std::vector<FieldElement> uc, vc;
        for (int i = 0; i <= 2; ++i) uc.push_back(read_element(t, s, off));
        uc.push_back(t.one(b));
        for (int i = 0; i <= 2; ++i) vc.push_back(read_element(t, s, off));
        if (off != s.size()) fail(Errc::BadInput, "trailing bytes");
        return DivisorClass(ctx, TypicalDivisor(ctx, UniPoly(t, b, uc), UniPoly(t, b, vc)));
    }
    if (tag == '\x02') {
        std::vector<PlanePoint> pts;
        for (int i = 0; i < 3; ++i) {
            FieldElement x = read_element(t, s, off);
            FieldElement y = read_element(t, s, off);
            FieldElement z = read_element(t, s, off);
            pts.push_back(PlanePoint::make(x, y, z));
        }
        if (off != s.size()) fail(Errc::BadInput, "trailing bytes");
        return divisor_from_points(ctx, std::move(pts));
    }
    fail(Errc::BadInput, "unknown divisor tag");
}

} // namespace quartic
