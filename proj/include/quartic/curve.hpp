#pragma once

#include <array>
#include <optional>
#include <vector>

#include "quartic/poly.hpp"

namespace quartic {

// monomials of a degree-d form, scan order: exponent of x descending, then y
// (degree 4: x^4, x^3y, x^3z, x^2y^2, x^2yz, x^2z^2, xy^3, ..., z^4)
int mono_count(int d);
int mono_index(int d, int ax, int ay);
void mono_exponents(int d, int idx, int& ax, int& ay, int& az);

struct Mat3 {
    std::array<std::array<FieldElement, 3>, 3> m;
    std::array<FieldElement, 3> apply(const std::array<FieldElement, 3>& v) const;
    FieldElement det() const;
    Mat3 inverse() const;
};

// Homogeneous trivariate form of degree 1..4 with coefficients at one level.
class Form {
  public:
    Form() : tower_(nullptr), level_(0), degree_(0) {}
    Form(const FieldTower& t, int level, int degree);
    Form(const FieldTower& t, int level, int degree, std::vector<FieldElement> coeffs);
    static Form from_ints(const FieldTower& t, int level, int degree,
                          const std::vector<int64_t>& coeffs);

    const FieldTower& tower() const { return *tower_; }
    int level() const { return level_; }
    int degree() const { return degree_; }
    bool is_zero() const;
    const std::vector<FieldElement>& coeffs() const { return c_; }
    FieldElement coeff(int idx) const { return c_[idx]; }
    FieldElement coeff(int ax, int ay) const { return c_[mono_index(degree_, ax, ay)]; }

    FieldElement eval(const FieldElement& x, const FieldElement& y, const FieldElement& z) const;
    Form operator*(const Form& o) const;
    Form promoted(int level) const;
    Form composed(const Mat3& M) const; // v -> this(M v)
    Form partial(int var) const;        // var: 0=x, 1=y, 2=z
    // scale so the first nonzero coefficient is 1
    Form normalized() const;

    // dehomogenize z=1 and collect the coefficient of y^j as a polynomial in x
    UniPoly y_coeff_poly(int j) const;

  private:
    const FieldTower* tower_;
    int level_, degree_;
    std::vector<FieldElement> c_;
};

using Quartic = Form; // degree-4 instance

// Projective point, canonical: scaled so the last nonzero coordinate is 1,
// coordinates compressed to the smallest tower level containing all three.
class PlanePoint {
  public:
    PlanePoint() : level_(0) {}
    static PlanePoint make(const FieldElement& x, const FieldElement& y, const FieldElement& z);

    int level() const { return level_; }
    const FieldElement& x() const { return x_; }
    const FieldElement& y() const { return y_; }
    const FieldElement& z() const { return z_; }

    PlanePoint frobenius(int e = 1) const;
    bool operator==(const PlanePoint& o) const;
    bool operator!=(const PlanePoint& o) const { return !(*this == o); }
    void append_bytes(std::string& out) const;
    std::string to_string() const;

  private:
    FieldElement x_, y_, z_;
    int level_;
};

int cmp(const PlanePoint& a, const PlanePoint& b);

// Effective divisor: materialized points with multiplicities plus exact
// degree bookkeeping for Galois orbits whose residue field falls outside the
// tower (possible only for ad-hoc forms, never on the group-law paths).
class EffectiveDivisor {
  public:
    EffectiveDivisor() = default;

    void add_point(const PlanePoint& p, int mult = 1);
    void add_unresolved(int degree, int mult);
    void merge(const EffectiveDivisor& o);
    // exact multiset subtraction; false when o is not contained
    bool subtract(const EffectiveDivisor& o);
    bool contains(const EffectiveDivisor& o) const;

    int total_degree() const;
    bool fully_materialized() const { return unresolved_.empty(); }
    const std::vector<std::pair<PlanePoint, int>>& points() const { return pts_; }
    const std::vector<std::pair<int, int>>& unresolved() const { return unresolved_; }
    int multiplicity_of(const PlanePoint& p) const;
    std::string to_string() const;

  private:
    std::vector<std::pair<PlanePoint, int>> pts_; // canonical order, mult >= 1
    std::vector<std::pair<int, int>> unresolved_; // (orbit degree, mult)
};

// Truncated power-series parametrization of the unique branch of C at P.
struct BranchSeries {
    int level = 0;
    int prec = 0;
    // coordinate series in the local parameter t (constant chart coordinate,
    // t plus offset, solved series)
    std::array<std::vector<FieldElement>, 3> xyz;

    // order of vanishing of h along the branch; prec when indistinguishable
    // from infinity at this precision
    int valuation(const Form& h) const;
};

class StandardCurve {
  public:
    // plane-quartic preprocessing: find a rational line with rational
    // intersection (tangent preferred), move it to z = 0
    static StandardCurve standardize(const Quartic& g);
    // reuse a known change of basis (e.g. one found over a subfield); the
    // tangent flag is read off the z . C divisor shape
    static StandardCurve from_transform(const Quartic& g, const Mat3& M);

    const FieldTower& tower() const { return f_.tower(); }
    int base_level() const { return f_.level(); }
    const Quartic& f() const { return f_; }
    const Quartic& original() const { return g_; }
    const Mat3& change_of_basis() const { return M_; }
    bool tangent_found() const { return tangent_found_; }

    const PlanePoint& P1_inf() const { return p1_; }
    const PlanePoint& P2_inf() const { return p2_; }
    const PlanePoint& P3_inf() const { return p3_; }
    const PlanePoint& P4_inf() const { return p4_; }
    // support of D^inf = P1 + P2 + P3 as a divisor
    const EffectiveDivisor& d_inf() const { return d_inf_; }

    const Form& fx() const { return fx_; }
    const Form& fy() const { return fy_; }
    const Form& fz() const { return fz_; }
    // f(x, y, 1) coefficient of y^j as a polynomial in x (j = 0..4)
    const UniPoly& affine_y_coeff(int j) const { return fz_ypoly_[j]; }

    bool point_on_curve(const PlanePoint& p) const;

    struct Center {
        std::array<FieldElement, 3> c;
        Mat3 M;
        Quartic fM;
    };
    const std::vector<Center>& centers() const { return centers_; }

  private:
    Quartic g_, f_;
    Mat3 M_;
    bool tangent_found_ = false;
    PlanePoint p1_, p2_, p3_, p4_;
    EffectiveDivisor d_inf_;
    Form fx_, fy_, fz_;
    std::array<UniPoly, 5> fz_ypoly_;
    std::vector<Center> centers_;

    void finish_setup();
};

// no common projective zero of the form and its three partials
bool quartic_is_smooth(const Quartic& g);

// intersection divisor h . C, exact Bezout degree 4 deg(h)
EffectiveDivisor intersection_divisor(const Form& h, const StandardCurve& C);
// line case, computed by restricting the quartic to the line
EffectiveDivisor intersect_line(const Quartic& f, const Form& line);
// generic engine on a bare quartic (used by standardize and the tests)
EffectiveDivisor intersect_form(const Quartic& f, const Form& h,
                                const std::vector<StandardCurve::Center>* cache = nullptr);

Form tangent_line_at(const PlanePoint& P, const StandardCurve& C);
Form tangent_line_at(const PlanePoint& P, const Quartic& f);

BranchSeries local_expansion(const PlanePoint& P, const StandardCurve& C, int order);
BranchSeries local_expansion(const PlanePoint& P, const Quartic& f, int order);

// degree-d form (d = 2 or 3) vanishing on S to the assigned multiplicities,
// rational over the base level of C; deterministic choice
Form interpolate(const EffectiveDivisor& S, int d, const StandardCurve& C);

} // namespace quartic
