#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "quartic/curve.hpp"

namespace quartic {

class JacobianContext;

// Mumford pair (u, v): u monic of degree 3, v of degree exactly 2, both over
// the base field; the three points (x_i : v(x_i) : 1), u(x_i) = 0, are
// pairwise distinct, affine, non-collinear, with distinct x-coordinates.
class TypicalDivisor {
  public:
    TypicalDivisor(const JacobianContext& ctx, UniPoly u, UniPoly v);
    const UniPoly& u() const { return u_; }
    const UniPoly& v() const { return v_; }
    bool operator==(const TypicalDivisor& o) const { return u_ == o.u_ && v_ == o.v_; }

  private:
    UniPoly u_, v_;
};

// Canonical multiset of three points over the level-6b field, stable under
// the base Frobenius, failing at least one typicality condition.
class AtypicalDivisor {
  public:
    AtypicalDivisor(const JacobianContext& ctx, std::vector<PlanePoint> pts);
    const std::vector<PlanePoint>& points() const { return pts_; }
    bool operator==(const AtypicalDivisor& o) const;

  private:
    std::vector<PlanePoint> pts_; // size 3, canonical order
};

class DivisorClass {
  public:
    DivisorClass(const JacobianContext& ctx, TypicalDivisor d);
    DivisorClass(const JacobianContext& ctx, AtypicalDivisor d);

    const JacobianContext& ctx() const { return *ctx_; }
    bool is_typical() const { return std::holds_alternative<TypicalDivisor>(rep_); }
    const TypicalDivisor& typical() const { return std::get<TypicalDivisor>(rep_); }
    const AtypicalDivisor& atypical() const { return std::get<AtypicalDivisor>(rep_); }

  private:
    const JacobianContext* ctx_;
    std::variant<TypicalDivisor, AtypicalDivisor> rep_;
};

// Jac(C)(F_{p^b}), b in {1, 2}.  Immutable math data; the op counter is the
// only mutable state, so one context must not be shared by writers across
// threads (each lift task creates its own).
class JacobianContext {
  public:
    static std::shared_ptr<JacobianContext> create(std::shared_ptr<const FieldTower> tower,
                                                   const std::vector<int64_t>& curve,
                                                   int base_level);

    const FieldTower& tower() const { return *tower_; }
    const StandardCurve& curve() const { return curve_; }
    int base_level() const { return base_; }
    // level housing all support points (6 or 12)
    int point_level() const { return base_ == 1 ? 6 : 12; }
    bool curve_defined_over_prime_field() const { return f_over_fp_; }
    const std::string& identity_hash() const { return identity_hash_; }

    u64 ops() const { return ops_; }
    void reset_ops() const { ops_ = 0; }
    void count_op() const { ++ops_; }

    // basis element of F_{q^2} over F_q inside the point level (base 2 only)
    const FieldElement& quadratic_basis() const { return quad_w_; }

  private:
    JacobianContext() = default;
    std::shared_ptr<const FieldTower> tower_;
    StandardCurve curve_;
    int base_ = 1;
    bool f_over_fp_ = false;
    std::string identity_hash_;
    FieldElement quad_w_;
    mutable u64 ops_ = 0;
};

DivisorClass identity(const JacobianContext& ctx);
bool is_identity(const DivisorClass& d);

// tag by the typicality predicate; validates Frobenius stability
DivisorClass divisor_from_points(const JacobianContext& ctx, std::vector<PlanePoint> pts);
// support multiset of D^+ (three points, with multiplicity)
std::vector<PlanePoint> support_points(const DivisorClass& d);

DivisorClass naive_add(const DivisorClass& a, const DivisorClass& b);
// fast Mumford path; nullopt signals fallback to naive_add
std::optional<TypicalDivisor> typical_add(const JacobianContext& ctx, const TypicalDivisor& a,
                                          const TypicalDivisor& b);
DivisorClass hybrid_add(const DivisorClass& a, const DivisorClass& b);
DivisorClass negate(const DivisorClass& d);
DivisorClass scalar_mul(const BigInt& n, const DivisorClass& d);

// perfect hash: equal exactly on equal classes
std::string hash_class(const DivisorClass& d);

DivisorClass random_divisor(const JacobianContext& ctx, Rng& rng);

// base-2 contexts: is d in the image of Jac(F_p) -> Jac(F_{p^2})?
bool is_in_base_image(const DivisorClass& d);
// class of the p^e-power Frobenius image (on the underlying model over F_p)
DivisorClass frobenius_class(const DivisorClass& d, int e = 1);

std::string serialize(const DivisorClass& d);
DivisorClass deserialize(const JacobianContext& ctx, const std::string& bytes);

// random point of C with coordinates in F_{q^orbit} and exact orbit size
// over the base field (orbit in {1, 2, 3})
PlanePoint random_curve_point(const JacobianContext& ctx, int orbit, Rng& rng);

} // namespace quartic
