#pragma once

#include <utility>
#include <vector>

#include "quartic/field.hpp"

namespace quartic {

// Univariate polynomial with all coefficients at one tower level.
// Invariant: leading coefficient nonzero unless the polynomial is zero
// (empty coefficient vector).
class UniPoly {
  public:
    UniPoly() : tower_(nullptr), level_(0) {}
    UniPoly(const FieldTower& t, int level) : tower_(&t), level_(level) {}
    UniPoly(const FieldTower& t, int level, std::vector<FieldElement> coeffs);

    static UniPoly from_ints(const FieldTower& t, int level, const std::vector<int64_t>& c);

    const FieldTower& tower() const { return *tower_; }
    int level() const { return level_; }
    int degree() const { return (int)c_.size() - 1; } // -1 for zero polynomial
    bool is_zero() const { return c_.empty(); }
    const std::vector<FieldElement>& coeffs() const { return c_; }
    FieldElement coeff(int i) const;
    FieldElement lead() const;

    UniPoly operator+(const UniPoly& o) const;
    UniPoly operator-(const UniPoly& o) const;
    UniPoly operator*(const UniPoly& o) const;
    UniPoly operator*(const FieldElement& s) const;
    bool operator==(const UniPoly& o) const;
    bool operator!=(const UniPoly& o) const { return !(*this == o); }

    UniPoly promoted(int level) const;
    UniPoly monic() const;
    UniPoly derivative() const;
    FieldElement eval(const FieldElement& x) const;
    std::string to_string() const;

    void trim();

  private:
    const FieldTower* tower_;
    int level_;
    std::vector<FieldElement> c_; // c_[i] multiplies X^i
};

// quotient and remainder, g nonzero
std::pair<UniPoly, UniPoly> poly_divmod(const UniPoly& f, const UniPoly& g);
UniPoly poly_mod(const UniPoly& f, const UniPoly& g);
// monic gcd
UniPoly poly_gcd(const UniPoly& f, const UniPoly& g);
// resultant of f and g at their common level
FieldElement resultant(const UniPoly& f, const UniPoly& g);
// f^e mod m
UniPoly poly_powmod(const UniPoly& f, const BigInt& e, const UniPoly& m);
// X^{p^j} mod m via Frobenius composition (j >= 1)
UniPoly xq_powmod(const UniPoly& m, int level, int j);
// substitute g into f, reduced mod m
UniPoly poly_compose_mod(const UniPoly& f, const UniPoly& g, const UniPoly& m);

bool is_irreducible(const UniPoly& f);

// all roots of f in F_{p^level}, with multiplicity; deterministic given rng
std::vector<FieldElement> find_roots(const UniPoly& f, int level, Rng& rng);

// full factorization over the coefficient level: list of (monic irreducible,
// multiplicity); deterministic given rng
std::vector<std::pair<UniPoly, int>> factor(const UniPoly& f, Rng& rng);

// Lagrange interpolation through (x_i, y_i) with distinct x_i
UniPoly lagrange(const FieldTower& t, int level, const std::vector<FieldElement>& xs,
                 const std::vector<FieldElement>& ys);

} // namespace quartic
